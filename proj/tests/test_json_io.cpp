#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "supt/json_io.hpp"

using namespace supt;

TEST_CASE("polynomial and form schemas round-trip") {
    const json jpoly = json::parse(R"([{"exp": [2, 0], "c": 1.5}, {"exp": [0, 1], "c": -2.0}])");
    const Polynomial p = polynomial_from_json(jpoly, 2, "test");
    CHECK(p.eval({2.0, 1.0}) == 4.0);
    const Polynomial back = polynomial_from_json(polynomial_to_json(p), 2, "test");
    CHECK((p - back).max_abs_coeff() == 0.0);

    const json jform = json::parse(
        R"({"dim": 2, "terms": [{"indices": [0, 1], "poly": [{"exp": [0, 0], "c": 1.0}]},
                                 {"indices": [], "poly": [{"exp": [1, 0], "c": 3.0}]}]})");
    const DifferentialForm w = form_from_json(jform, 2, "test");
    CHECK(w.degree() == 2);
    const DifferentialForm back_w = form_from_json(form_to_json(w), 2, "test");
    CHECK(max_coeff_distance(w, back_w) == 0.0);
}

TEST_CASE("vector fields and grassmann elements round-trip") {
    const json jf = json::parse(
        R"({"dim": 2, "components": [[{"exp": [0, 1], "c": -1.0}], [{"exp": [1, 0], "c": 1.0}]]})");
    const VectorField X = vector_field_from_json(jf, "test");
    CHECK(X.eval({2.0, 3.0})[0] == -3.0);
    const VectorField back = vector_field_from_json(vector_field_to_json(X), "test");
    CHECK(back.eval({2.0, 3.0})[1] == 2.0);

    const json jg = json::parse(
        R"({"generators": 3, "terms": [{"subset": [0, 2], "coeff": 2.0}, {"subset": [], "coeff": 1.0}]})");
    const GrassmannElement v = grassmann_from_json(jg, "test");
    CHECK(v.body() == 1.0);
    CHECK(v.coefficient(0b101) == 2.0);
    const GrassmannElement vb = grassmann_from_json(grassmann_to_json(v), "test");
    CHECK((v - vb).max_abs() == 0.0);
}

TEST_CASE("connection schema with even-flag validation") {
    const std::string good = R"({
        "dim": 1, "p": 1, "q": 1, "even": true,
        "A": [[[{"indices": [0], "poly": [{"exp": [1], "c": 1.0}]}], []],
              [[], [{"indices": [0], "poly": [{"exp": [0], "c": 2.0}]}]]]
    })";
    const GradedConnection conn = connection_from_json(json::parse(good), "test");
    CHECK(conn.is_even());
    CHECK(conn.bundle().rank() == 2);
    const GradedConnection back = connection_from_json(connection_to_json(conn), "test");
    CHECK(max_coeff_distance(back.A().at(0, 0), conn.A().at(0, 0)) == 0.0);

    const std::string bad = R"({
        "dim": 1, "p": 1, "q": 1, "even": true,
        "A": [[[], [{"indices": [0], "poly": [{"exp": [0], "c": 1.0}]}]],
              [[], []]]
    })";
    CHECK_THROWS_AS(connection_from_json(json::parse(bad), "test"), schema_error);
}

TEST_CASE("schema errors carry a location hint") {
    try {
        polynomial_from_json(json::parse(R"([{"exp": [1], "c": "x"}])"), 1, "spec.field");
        FAIL("expected schema error");
    } catch (const schema_error& e) {
        CHECK(std::string(e.what()).find("spec.field") != std::string::npos);
    }
    CHECK_THROWS_AS(form_from_json(json::parse(R"({"terms": [{"indices": [1, 0], "poly": []}]})"), 2,
                                   "w"),
                    schema_error);
    CHECK_THROWS_AS(
        vector_field_from_json(json::parse(R"({"dim": 2, "components": [[]]})"), "f"),
        schema_error);
}

TEST_CASE("report formatting is stable") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1e-12) == "1e-12");
    CHECK(format_double(1.0 / 3.0) == "0.333333333333");
}
