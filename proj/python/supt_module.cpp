#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "supt/checks.hpp"
#include "supt/json_io.hpp"
#include "supt/transport.hpp"

namespace py = pybind11;
using namespace supt;

namespace {

Polynomial poly_from_terms(int dim, const std::vector<std::pair<std::vector<int>, double>>& terms) {
    Polynomial p(dim);
    for (const auto& [e, c] : terms) p.add_term(e, c);
    return p;
}

VectorField field_from_terms(
    int dim, const std::vector<std::vector<std::pair<std::vector<int>, double>>>& comps) {
    std::vector<ScalarField> fields;
    for (const auto& c : comps) fields.push_back(ScalarField(poly_from_terms(dim, c)));
    return VectorField(dim, std::move(fields));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Grassmann algebra, flows, graded connections and 1|1 parallel transport";
    m.attr("__version__") = "0.1.0";

    py::register_exception<supt::error>(m, "SuptError");

    py::class_<GrassmannElement>(m, "GrassmannElement")
        .def(py::init<int>(), py::arg("num_generators"))
        .def_static("scalar", &GrassmannElement::scalar)
        .def_static("generator", &GrassmannElement::generator)
        .def_static("monomial", &GrassmannElement::monomial)
        .def("generators", &GrassmannElement::generators)
        .def("coefficient", &GrassmannElement::coefficient)
        .def("body", &GrassmannElement::body)
        .def("even_part", &GrassmannElement::even_part)
        .def("odd_part", &GrassmannElement::odd_part)
        .def("max_abs", &GrassmannElement::max_abs)
        .def("__add__", [](const GrassmannElement& a, const GrassmannElement& b) { return a + b; })
        .def("__sub__", [](const GrassmannElement& a, const GrassmannElement& b) { return a - b; })
        .def("__mul__", [](const GrassmannElement& a, const GrassmannElement& b) { return a * b; })
        .def("__rmul__", [](const GrassmannElement& a, double s) { return a * s; })
        .def("__repr__", &GrassmannElement::str);

    py::class_<Polynomial>(m, "Polynomial")
        .def(py::init(&poly_from_terms), py::arg("dim"), py::arg("terms"))
        .def("eval", &Polynomial::eval)
        .def("__repr__", &Polynomial::str);

    py::class_<ScalarField>(m, "ScalarField")
        .def(py::init([](const Polynomial& p) { return ScalarField(p); }))
        .def("eval", &ScalarField::eval)
        .def("eval_grassmann", &ScalarField::eval_grassmann)
        .def("__repr__", &ScalarField::str);

    py::class_<VectorField>(m, "VectorField")
        .def(py::init(&field_from_terms), py::arg("dim"), py::arg("component_terms"))
        .def("dim", &VectorField::dim)
        .def("eval", &VectorField::eval);

    py::class_<DifferentialForm>(m, "DifferentialForm")
        .def(py::init<int>(), py::arg("dim"))
        .def_static("dx", &DifferentialForm::dx)
        .def_static("constant", &DifferentialForm::constant)
        .def("add_term",
             [](DifferentialForm& w, const std::vector<int>& indices, const Polynomial& p) {
                 std::uint32_t mask = 0;
                 for (int i : indices) mask |= std::uint32_t{1} << i;
                 w.add_term(mask, ScalarField(p));
             })
        .def("degree", &DifferentialForm::degree)
        .def("__add__", [](const DifferentialForm& a, const DifferentialForm& b) { return a + b; })
        .def("__sub__", [](const DifferentialForm& a, const DifferentialForm& b) { return a - b; })
        .def("max_coeff_abs", &DifferentialForm::max_coeff_abs)
        .def("__repr__", &DifferentialForm::str);

    m.def("wedge", &wedge);
    m.def("exterior_d", &exterior_d);
    m.def("contract", &contract);
    m.def("lie_derivative", &lie_derivative);
    m.def("max_coeff_distance",
          py::overload_cast<const DifferentialForm&, const DifferentialForm&>(&max_coeff_distance));

    m.def(
        "even_flow",
        [](const VectorField& X, double t, const std::vector<double>& x0, double tol) {
            IntegratorOptions opts;
            opts.tol = tol;
            return even_flow(X, t, x0, opts);
        },
        py::arg("X"), py::arg("t"), py::arg("x0"), py::arg("tol") = 1e-10);
    m.def(
        "trotter_flow",
        [](const VectorField& X, const VectorField& Y, double t, const std::vector<double>& x0,
           long n) { return trotter_flow(X, Y, t, x0, n); },
        py::arg("X"), py::arg("Y"), py::arg("t"), py::arg("x0"), py::arg("n"));
    m.def("trotter_convergence",
          [](const VectorField& X, const VectorField& Y, double t, const std::vector<double>& x0,
             int max_exponent) {
              const TrotterStudy s = trotter_convergence(X, Y, t, x0, max_exponent);
              std::vector<std::tuple<long, double, double>> rows;
              for (const auto& r : s.rows) rows.emplace_back(r.n, r.error, r.observed_order);
              return py::make_tuple(rows, s.fitted_order);
          });
    m.def(
        "reparam_flow_even",
        [](const ScalarField& f, const VectorField& X, double t, const std::vector<double>& x0) {
            return reparam_flow_even(f, X, t, x0);
        },
        py::arg("f"), py::arg("X"), py::arg("t"), py::arg("x0"));

    py::class_<GradedBundle>(m, "GradedBundle")
        .def(py::init([](int n, int p, int q) { return GradedBundle{n, p, q}; }), py::arg("base_dim"),
             py::arg("even_rank"), py::arg("odd_rank"))
        .def("rank", &GradedBundle::rank);

    py::class_<GradedConnection>(m, "GradedConnection")
        .def(py::init([](const GradedBundle& bundle,
                         const std::vector<std::vector<DifferentialForm>>& A) {
                 FormMatrix mat(bundle.rank(), bundle.rank(), DifferentialForm::zero(bundle.base_dim));
                 for (int a = 0; a < bundle.rank(); ++a)
                     for (int b = 0; b < bundle.rank(); ++b) mat.at(a, b) = A.at(a).at(b);
                 return GradedConnection(bundle, std::move(mat));
             }),
             py::arg("bundle"), py::arg("A"))
        .def("is_even", &GradedConnection::is_even, py::arg("tol") = 1e-12);

    m.def(
        "connection_from_json",
        [](const std::string& text) {
            return connection_from_json(json::parse(text), "connection");
        },
        "Parse a connection from its JSON schema");

    m.def(
        "bijection_roundtrip_residual",
        [](const GradedConnection& conn, std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            const GradedConnection back = restrict_connection(PiTConnection::pullback(conn), rng);
            double res = 0.0;
            const int mm = conn.bundle().rank();
            for (int a = 0; a < mm; ++a)
                for (int b = 0; b < mm; ++b)
                    res = std::max(res, max_coeff_distance(back.A().at(a, b), conn.A().at(a, b)));
            return res;
        },
        py::arg("conn"), py::arg("seed") = 1);

    m.def(
        "path_transport_endpoint",
        [](const GradedConnection& conn, const std::vector<std::vector<double>>& coords, double t0,
           double t1, const std::vector<double>& v0) {
            const int context = 1;
            const ConnectionMTransport T(conn);
            const SuperPathM c =
                path_from_real_polynomials(conn.bundle().base_dim, context, 0, coords, t0, t1);
            GrassmannVector v;
            for (double x : v0) v.push_back(GrassmannElement::scalar(context, x));
            const TransportValue val = T.transport(c, v).at(t1);
            std::vector<double> out;
            for (const auto& x : val.s1) out.push_back(x.body());
            return out;
        },
        py::arg("conn"), py::arg("coords"), py::arg("t0"), py::arg("t1"), py::arg("v0"),
        "Body of the parallel section at t1 along a polynomial path");

    m.def(
        "roundtrip_residual",
        [](const GradedConnection& conn, const std::vector<std::vector<double>>& probes) {
            const RoundtripReport r = roundtrip_residual(conn, probes);
            return py::make_tuple(r.max_residual, r.recovered_even, r.gamma_iota_residual);
        },
        py::arg("conn"), py::arg("probe_points"));

    py::class_<CheckResult>(m, "CheckResult")
        .def_readonly("name", &CheckResult::name)
        .def_readonly("residual", &CheckResult::residual)
        .def_readonly("tol", &CheckResult::tol)
        .def_readonly("pass_", &CheckResult::pass);

    m.def(
        "run_all_checks",
        [](std::uint64_t seed) {
            CheckContext ctx;
            ctx.seed = seed;
            return run_all_checks(ctx);
        },
        py::arg("seed") = 1);
    m.def(
        "run_check",
        [](const std::string& name, std::uint64_t seed) {
            CheckContext ctx;
            ctx.seed = seed;
            return run_check(name, ctx);
        },
        py::arg("name"), py::arg("seed") = 1);
    m.def("check_names", []() {
        std::vector<std::string> names;
        for (const auto& def : check_catalog()) names.push_back(def.name);
        return names;
    });
}
