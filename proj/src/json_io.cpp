#include "supt/json_io.hpp"

#include <bit>
#include <cstdio>

namespace supt {

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key))
        throw schema_error(where + ": missing required key \"" + key + "\"");
    return j.at(key);
}

int require_int(const json& j, const char* key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_number_integer()) throw schema_error(where + ": \"" + std::string(key) + "\" must be an integer");
    return v.get<int>();
}

}  // namespace

Polynomial polynomial_from_json(const json& j, int dim, const std::string& where) {
    if (!j.is_array()) throw schema_error(where + ": polynomial must be an array of terms");
    Polynomial p(dim);
    int idx = 0;
    for (const auto& term : j) {
        const std::string tw = where + ".poly[" + std::to_string(idx++) + "]";
        const json& exp = require(term, "exp", tw);
        if (!exp.is_array() || static_cast<int>(exp.size()) != dim)
            throw schema_error(tw + ": \"exp\" must be an array of length dim=" + std::to_string(dim));
        std::vector<int> e;
        for (const auto& v : exp) {
            if (!v.is_number_integer() || v.get<int>() < 0)
                throw schema_error(tw + ": exponents must be nonnegative integers");
            e.push_back(v.get<int>());
        }
        const json& c = require(term, "c", tw);
        if (!c.is_number()) throw schema_error(tw + ": \"c\" must be a number");
        p.add_term(e, c.get<double>());
    }
    return p;
}

json polynomial_to_json(const Polynomial& p) {
    json terms = json::array();
    for (const auto& [e, c] : p.terms()) terms.push_back({{"exp", e}, {"c", c}});
    return terms;
}

DifferentialForm form_from_json(const json& j, int dim, const std::string& where) {
    const json& terms = j.is_array() ? j : require(j, "terms", where);
    if (!terms.is_array()) throw schema_error(where + ": \"terms\" must be an array");
    DifferentialForm w(dim);
    int idx = 0;
    for (const auto& term : terms) {
        const std::string tw = where + ".terms[" + std::to_string(idx++) + "]";
        const json& indices = require(term, "indices", tw);
        if (!indices.is_array()) throw schema_error(tw + ": \"indices\" must be an array");
        std::uint32_t mask = 0;
        int prev = -1;
        for (const auto& v : indices) {
            if (!v.is_number_integer()) throw schema_error(tw + ": indices must be integers");
            const int i = v.get<int>();
            if (i <= prev) throw schema_error(tw + ": indices must be strictly increasing");
            if (i < 0 || i >= dim) throw schema_error(tw + ": index out of range for dim=" + std::to_string(dim));
            mask |= std::uint32_t{1} << i;
            prev = i;
        }
        w.add_term(mask, ScalarField(polynomial_from_json(require(term, "poly", tw), dim, tw)));
    }
    return w;
}

json form_to_json(const DifferentialForm& w) {
    json terms = json::array();
    for (const auto& [mask, f] : w.terms()) {
        std::vector<int> indices;
        for (std::uint32_t bit = mask; bit != 0; bit &= bit - 1)
            indices.push_back(std::countr_zero(bit));
        terms.push_back({{"indices", indices}, {"poly", polynomial_to_json(f.poly())}});
    }
    return json{{"dim", w.dim()}, {"terms", terms}};
}

VectorField vector_field_from_json(const json& j, const std::string& where) {
    const int dim = require_int(j, "dim", where);
    if (dim < 1 || dim > 8) throw schema_error(where + ": dim must be in [1, 8]");
    const json& comps = require(j, "components", where);
    if (!comps.is_array() || static_cast<int>(comps.size()) != dim)
        throw schema_error(where + ": \"components\" must be an array of length dim");
    std::vector<ScalarField> fields;
    int idx = 0;
    for (const auto& c : comps)
        fields.push_back(
            ScalarField(polynomial_from_json(c, dim, where + ".components[" + std::to_string(idx++) + "]")));
    return VectorField(dim, std::move(fields));
}

json vector_field_to_json(const VectorField& X) {
    json comps = json::array();
    for (const auto& c : X.components()) comps.push_back(polynomial_to_json(c.poly()));
    return json{{"dim", X.dim()}, {"components", comps}};
}

GrassmannElement grassmann_from_json(const json& j, const std::string& where) {
    const int k = require_int(j, "generators", where);
    if (k < 0 || k > GrassmannElement::max_generators)
        throw schema_error(where + ": generators must be in [0, 8]");
    GrassmannElement v(k);
    const json& terms = require(j, "terms", where);
    if (!terms.is_array()) throw schema_error(where + ": \"terms\" must be an array");
    int idx = 0;
    for (const auto& term : terms) {
        const std::string tw = where + ".terms[" + std::to_string(idx++) + "]";
        const json& subset = require(term, "subset", tw);
        std::uint32_t mask = 0;
        int prev = -1;
        for (const auto& g : subset) {
            const int i = g.get<int>();
            if (i <= prev) throw schema_error(tw + ": subset must be strictly increasing");
            if (i < 0 || i >= k) throw schema_error(tw + ": generator index out of range");
            mask |= std::uint32_t{1} << i;
            prev = i;
        }
        const json& c = require(term, "coeff", tw);
        if (!c.is_number()) throw schema_error(tw + ": \"coeff\" must be a number");
        v.set_coefficient(mask, v.coefficient(mask) + c.get<double>());
    }
    return v;
}

json grassmann_to_json(const GrassmannElement& v) {
    json terms = json::array();
    for (std::uint32_t mask = 0; mask < v.basis_size(); ++mask) {
        if (v.coefficient(mask) == 0.0) continue;
        std::vector<int> subset;
        for (std::uint32_t bit = mask; bit != 0; bit &= bit - 1)
            subset.push_back(std::countr_zero(bit));
        terms.push_back({{"subset", subset}, {"coeff", v.coefficient(mask)}});
    }
    return json{{"generators", v.generators()}, {"terms", terms}};
}

GradedConnection connection_from_json(const json& j, const std::string& where) {
    const int dim = require_int(j, "dim", where);
    const int p = require_int(j, "p", where);
    const int q = require_int(j, "q", where);
    if (dim < 1 || dim > 8) throw schema_error(where + ": dim must be in [1, 8]");
    if (p < 0 || q < 0 || p + q < 1) throw schema_error(where + ": need p, q >= 0 and p + q >= 1");
    const GradedBundle bundle{dim, p, q};
    const int m = bundle.rank();
    const json& A = require(j, "A", where);
    if (!A.is_array() || static_cast<int>(A.size()) != m)
        throw schema_error(where + ": \"A\" must be a " + std::to_string(m) + "x" + std::to_string(m) +
                           " matrix of 1-forms");
    FormMatrix mat(m, m, DifferentialForm::zero(dim));
    for (int a = 0; a < m; ++a) {
        const json& row = A.at(a);
        if (!row.is_array() || static_cast<int>(row.size()) != m)
            throw schema_error(where + ": row " + std::to_string(a) + " of \"A\" has wrong length");
        for (int b = 0; b < m; ++b)
            mat.at(a, b) = form_from_json(row.at(b), dim,
                                          where + ".A[" + std::to_string(a) + "][" + std::to_string(b) + "]");
    }
    GradedConnection conn(bundle, std::move(mat));
    if (j.contains("even") && j.at("even").get<bool>() && !conn.is_even())
        throw schema_error(where + ": connection declared even but A is not block-diagonal");
    return conn;
}

json connection_to_json(const GradedConnection& conn) {
    const int m = conn.bundle().rank();
    json A = json::array();
    for (int a = 0; a < m; ++a) {
        json row = json::array();
        for (int b = 0; b < m; ++b) row.push_back(form_to_json(conn.A().at(a, b)).at("terms"));
        A.push_back(row);
    }
    return json{{"dim", conn.bundle().base_dim},
                {"p", conn.bundle().even_rank},
                {"q", conn.bundle().odd_rank},
                {"even", conn.is_even()},
                {"A", A}};
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
}

}  // namespace supt
