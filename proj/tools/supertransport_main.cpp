// Batch experiment runner: loads a JSON spec, runs flows / transport /
// verification suites, and writes JSON or CSV reports.
//
// Exit codes: 0 all residuals within tolerance, 1 assertion failure,
// 2 schema error, 3 numerical divergence.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "supt/checks.hpp"
#include "supt/json_io.hpp"
#include "supt/transport.hpp"

namespace fs = std::filesystem;
using supt::json;

namespace {

struct Options {
    std::string spec_path;
    std::string out_dir;
    std::uint64_t seed = 1;
    double tol = 0.0;  // 0 = per-check defaults
    bool csv = false;
};

json load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw supt::schema_error("cannot open spec file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw supt::schema_error("malformed JSON in " + path + ": " + e.what());
    }
}

// Inputs may be inline or {"file": "relative/path.json"}.
json resolve_ref(const json& j, const fs::path& base) {
    if (j.is_object() && j.contains("file")) {
        const fs::path p = base / j.at("file").get<std::string>();
        return load_spec(p.string());
    }
    return j;
}

void write_report(const Options& opt, const std::string& name, const std::string& text) {
    if (opt.out_dir.empty()) {
        std::cout << text;
        return;
    }
    fs::create_directories(opt.out_dir);
    std::ofstream out(fs::path(opt.out_dir) / name, std::ios::binary);
    out << text;
    std::cout << "wrote " << (fs::path(opt.out_dir) / name).string() << "\n";
}

int run_verify_all(const Options& opt, const json&) {
    supt::CheckContext ctx;
    ctx.seed = opt.seed;
    const auto results = supt::run_all_checks(ctx);
    json checks = json::array();
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name
                  << " residual=" << supt::format_double(r.residual)
                  << " tol=" << supt::format_double(r.tol) << "\n";
        checks.push_back({{"name", r.name},
                          {"residual", r.residual},
                          {"tol", r.tol},
                          {"pass", r.pass}});
        all_pass = all_pass && r.pass;
    }
    json report = {{"report_version", 1},
                   {"kind", "verify-all"},
                   {"seed", opt.seed},
                   {"checks", checks},
                   {"pass", all_pass}};
    write_report(opt, "verify_all.json", report.dump(2) + "\n");
    return all_pass ? 0 : 1;
}

int run_flow(const Options& opt, const json& spec) {
    const fs::path base = fs::path(opt.spec_path).parent_path();
    const supt::VectorField X =
        supt::vector_field_from_json(resolve_ref(spec.at("field"), base), "spec.field");
    std::vector<double> x0 = spec.at("x0").get<std::vector<double>>();
    if (static_cast<int>(x0.size()) != X.dim())
        throw supt::schema_error("spec.x0: length must match field dim");
    std::vector<double> times = spec.at("times").get<std::vector<double>>();
    supt::IntegratorOptions iopts;
    if (opt.tol > 0) iopts.tol = opt.tol;

    std::ostringstream csv;
    csv << "t";
    for (int i = 0; i < X.dim(); ++i) csv << ",x" << i;
    csv << "\n";
    json rows = json::array();
    for (double t : times) {
        const auto y = supt::even_flow(X, t, x0, iopts);
        csv << supt::format_double(t);
        for (double v : y) csv << "," << supt::format_double(v);
        csv << "\n";
        rows.push_back({{"t", t}, {"x", y}});
    }
    if (opt.csv) {
        write_report(opt, "flow.csv", csv.str());
    } else {
        json report = {{"report_version", 1}, {"kind", "flow"}, {"rows", rows}};
        write_report(opt, "flow.json", report.dump(2) + "\n");
    }
    return 0;
}

int run_trotter(const Options& opt, const json& spec) {
    const fs::path base = fs::path(opt.spec_path).parent_path();
    const supt::VectorField X =
        supt::vector_field_from_json(resolve_ref(spec.at("field_x"), base), "spec.field_x");
    const supt::VectorField Y =
        supt::vector_field_from_json(resolve_ref(spec.at("field_y"), base), "spec.field_y");
    const std::vector<double> x0 = spec.at("x0").get<std::vector<double>>();
    const double t = spec.value("t", 1.0);
    const int max_exp = spec.value("max_exponent", 10);
    const double min_order = spec.value("min_fitted_order", 0.9);

    const supt::TrotterStudy study = supt::trotter_convergence(X, Y, t, x0, max_exp);
    std::ostringstream csv;
    csv << "n,error,observed_order\n";
    for (const auto& row : study.rows)
        csv << row.n << "," << supt::format_double(row.error) << ","
            << (std::isnan(row.observed_order) ? std::string("")
                                               : supt::format_double(row.observed_order))
            << "\n";
    std::cout << "fitted order: " << supt::format_double(study.fitted_order) << "\n";
    if (opt.csv) {
        write_report(opt, "trotter.csv", csv.str());
    } else {
        json rows = json::array();
        for (const auto& row : study.rows)
            rows.push_back({{"n", row.n}, {"error", row.error}, {"observed_order", row.observed_order}});
        json report = {{"report_version", 1},
                       {"kind", "trotter"},
                       {"fitted_order", study.fitted_order},
                       {"rows", rows}};
        write_report(opt, "trotter.json", report.dump(2) + "\n");
    }
    return study.fitted_order >= min_order ? 0 : 1;
}

int run_odd_flow(const Options& opt, const json& spec) {
    const fs::path base = fs::path(opt.spec_path).parent_path();
    const supt::VectorField X =
        supt::vector_field_from_json(resolve_ref(spec.at("field_x"), base), "spec.field_x");
    const supt::VectorField Y =
        supt::vector_field_from_json(resolve_ref(spec.at("field_y"), base), "spec.field_y");
    const supt::DifferentialForm w =
        supt::form_from_json(resolve_ref(spec.at("form"), base), X.dim(), "spec.form");
    const double tol = opt.tol > 0 ? opt.tol : 1e-12;

    const supt::SuperForm composite = supt::odd_flow_composite_via_diagonal(X, Y, w, 0, 1, 2, 3);
    const supt::SuperForm direct =
        supt::compose_odd_flows(supt::odd_flow(X), supt::odd_flow(Y)).apply(w, 2);
    const double res = supt::max_coeff_distance(composite, direct);

    const supt::SuperForm lhs = supt::odd_flow(X).apply(supt::wedge(w, w), 0);
    const supt::SuperForm rhs = supt::odd_flow(X).apply(w, 0) * supt::odd_flow(X).apply(w, 0);
    const double hom_res = supt::max_coeff_distance(lhs, rhs);

    json report = {{"report_version", 1},
                   {"kind", "odd-flow"},
                   {"composition_residual", res},
                   {"homomorphism_residual", hom_res},
                   {"tol", tol},
                   {"pass", res <= tol && hom_res <= tol}};
    write_report(opt, "odd_flow.json", report.dump(2) + "\n");
    return (res <= tol && hom_res <= tol) ? 0 : 1;
}

supt::SuperPathM path_from_spec(const json& jpath, int dim, int context) {
    std::vector<std::vector<double>> coeffs;
    for (const auto& c : jpath.at("coords")) coeffs.push_back(c.get<std::vector<double>>());
    if (static_cast<int>(coeffs.size()) != dim)
        throw supt::schema_error("spec.path.coords: need one coefficient list per dimension");
    const auto horizon = jpath.at("horizon").get<std::vector<double>>();
    if (horizon.size() != 2 || !(horizon[0] < horizon[1]))
        throw supt::schema_error("spec.path.horizon: need [t0, t1] with t0 < t1");
    supt::SuperPathM c =
        supt::path_from_real_polynomials(dim, context, 0, coeffs, horizon[0], horizon[1]);
    if (jpath.value("kind", "path") == std::string("superpath")) {
        // theta-coefficients: polynomial in t times one S-generator each.
        int gen = 1;
        for (const auto& oc : jpath.at("odd_coords")) {
            const std::vector<double> poly = oc.get<std::vector<double>>();
            const int g = gen++;
            c.odd_coords.push_back([poly, g, context](double t) {
                double v = 0.0, p = 1.0;
                for (double x : poly) {
                    v += x * p;
                    p *= t;
                }
                return supt::GrassmannElement::generator(context, g) * v;
            });
        }
        if (static_cast<int>(c.odd_coords.size()) != dim)
            throw supt::schema_error("spec.path.odd_coords: need one list per dimension");
    }
    return c;
}

int run_transport(const Options& opt, const json& spec) {
    const fs::path base = fs::path(opt.spec_path).parent_path();
    const supt::GradedConnection conn =
        supt::connection_from_json(resolve_ref(spec.at("connection"), base), "spec.connection");
    const int n = conn.bundle().base_dim;
    const int m = conn.bundle().rank();
    const int context = 1 + n;
    supt::SuperPathM c = path_from_spec(spec.at("path"), n, context);
    const double tol = opt.tol > 0 ? opt.tol : 1e-6;

    supt::IntegratorOptions iopts;
    const supt::ConnectionMTransport T(conn, iopts);
    supt::GrassmannVector v0(m, supt::GrassmannElement::scalar(context, 1.0));

    std::vector<std::string> wanted =
        spec.value("checks", std::vector<std::string>{"gluing", "constant-identity"});
    json results = json::array();
    bool pass = true;
    for (const auto& name : wanted) {
        double res = 0.0;
        if (name == "gluing") {
            res = supt::check_gluing(T, c, 0.5 * (c.t0 + c.t1), v0);
        } else if (name == "constant-identity") {
            res = supt::check_constant_identity(T, supt::path_point(c, c.t0), context, 0, v0);
        } else if (name == "q-naturality") {
            supt::SuperPathM cpath = c;
            cpath.odd_coords.clear();
            res = supt::check_q_naturality(conn, T, cpath, v0, {c.t1});
        } else if (name == "reparam") {
            supt::Polynomial b(1), tau(1);
            b.add_term({3}, 1.0 / 3.0);
            b.add_term({1}, 1.0);
            tau.add_term({0}, 1.0);
            supt::SuperPathM cpath = c;
            cpath.odd_coords.clear();
            cpath.t1 = std::min(c.t1, 0.8);
            res = supt::check_reparam_invariance(T, cpath, b, tau, v0, {cpath.t1});
        } else {
            throw supt::schema_error("unknown transport check: " + name);
        }
        results.push_back({{"name", name}, {"residual", res}, {"tol", tol}, {"pass", res <= tol}});
        pass = pass && res <= tol;
        std::cout << (res <= tol ? "[PASS] " : "[FAIL] ") << name
                  << " residual=" << supt::format_double(res) << "\n";
    }
    json report = {{"report_version", 1}, {"kind", "transport"}, {"checks", results}, {"pass", pass}};
    write_report(opt, "transport.json", report.dump(2) + "\n");
    return pass ? 0 : 1;
}

int run_roundtrip(const Options& opt, const json& spec) {
    const fs::path base = fs::path(opt.spec_path).parent_path();
    const supt::GradedConnection conn =
        supt::connection_from_json(resolve_ref(spec.at("connection"), base), "spec.connection");
    if (!conn.is_even()) throw supt::schema_error("roundtrip needs an even connection");
    std::vector<std::vector<double>> probes;
    if (spec.contains("probe_points"))
        for (const auto& p : spec.at("probe_points")) probes.push_back(p.get<std::vector<double>>());
    else
        probes.push_back(std::vector<double>(conn.bundle().base_dim, 0.25));
    const double tol = opt.tol > 0 ? opt.tol : 1e-5;

    const supt::RoundtripReport r = supt::roundtrip_residual(conn, probes);
    const bool pass = r.max_residual <= tol && r.recovered_even;
    json report = {{"report_version", 1},
                   {"kind", "roundtrip"},
                   {"max_residual", r.max_residual},
                   {"gamma_iota_residual", r.gamma_iota_residual},
                   {"evenness_residual", r.evenness_residual},
                   {"recovered_even", r.recovered_even},
                   {"tol", tol},
                   {"pass", pass}};
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << "roundtrip residual="
              << supt::format_double(r.max_residual) << " tol=" << supt::format_double(tol) << "\n";
    write_report(opt, "roundtrip.json", report.dump(2) + "\n");
    return pass ? 0 : 1;
}

int dispatch(const Options& opt) {
    const json spec = load_spec(opt.spec_path);
    const std::string kind = spec.value("kind", "");
    if (kind == "verify-all") return run_verify_all(opt, spec);
    if (kind == "flow") return run_flow(opt, spec);
    if (kind == "trotter") return run_trotter(opt, spec);
    if (kind == "odd-flow") return run_odd_flow(opt, spec);
    if (kind == "transport") return run_transport(opt, spec);
    if (kind == "roundtrip") return run_roundtrip(opt, spec);
    throw supt::schema_error(
        "spec.kind must be one of flow, trotter, odd-flow, transport, roundtrip, verify-all");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"supertransport: flows, graded connections and 1|1 parallel transport"};
    app.require_subcommand(0, 1);

    Options opt;
    app.add_option("--spec", opt.spec_path, "experiment spec (JSON)");
    app.add_option("--out", opt.out_dir, "output directory (default: stdout)");
    app.add_option("--seed", opt.seed, "seed for random probe generation")->default_val(1);
    app.add_option("--tol", opt.tol, "override tolerance (0 = per-check default)")->default_val(0.0);
    bool json_flag = false;
    app.add_flag("--json", json_flag, "JSON reports (default)");
    app.add_flag("--csv", opt.csv, "CSV reports where applicable");

    auto* list = app.add_subcommand("list-checks", "catalog of named verification checks");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        for (const auto& def : supt::check_catalog())
            std::cout << def.name << ": " << def.description << "\n";
        std::cout << supt::check_catalog().size() << " checks\n";
        return 0;
    }

    if (opt.spec_path.empty()) {
        std::cerr << "error: --spec is required (or use the list-checks subcommand)\n";
        return 2;
    }

    try {
        return dispatch(opt);
    } catch (const supt::schema_error& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 2;
    } catch (const supt::divergence_error& e) {
        std::cerr << "divergence: " << e.what() << " (last valid time " << e.last_valid_time
                  << ")\n";
        return 3;
    } catch (const supt::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
