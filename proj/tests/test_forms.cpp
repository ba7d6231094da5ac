#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "supt/forms.hpp"

using namespace supt;

namespace {

ScalarField coord(int dim, int i) { return ScalarField::coordinate(dim, i); }

DifferentialForm f_times_dx(const ScalarField& f, int i) {
    DifferentialForm w(f.dim());
    w.add_term(std::uint32_t{1} << i, f);
    return w;
}

VectorField rfield(int dim, int deg, std::mt19937_64& rng) {
    std::vector<ScalarField> comps;
    for (int i = 0; i < dim; ++i) comps.push_back(ScalarField(random_polynomial(dim, deg, rng)));
    return VectorField(dim, std::move(comps));
}

DifferentialForm rform(int dim, int deg, std::mt19937_64& rng) {
    DifferentialForm w(dim);
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << dim); ++mask)
        if ((rng() & 1) == 0) w.add_term(mask, ScalarField(random_polynomial(dim, deg, rng)));
    return w;
}

}  // namespace

TEST_CASE("exterior derivative on the standard examples") {
    // d(x dy) = dx ^ dy on R^2
    const DifferentialForm xdy = f_times_dx(coord(2, 0), 1);
    const DifferentialForm d1 = exterior_d(xdy);
    CHECK(max_coeff_distance(d1, wedge(DifferentialForm::dx(2, 0), DifferentialForm::dx(2, 1))) == 0.0);

    // d(constant) = 0
    CHECK(exterior_d(DifferentialForm::constant(2, 3.5)).max_coeff_abs() == 0.0);

    // d(x^2 y) = 2xy dx + x^2 dy, checked coefficientwise
    Polynomial x2y(2);
    x2y.add_term({2, 1}, 1.0);
    const DifferentialForm d2 = exterior_d(DifferentialForm::from_scalar(ScalarField(x2y)));
    Polynomial twoxy(2), x2(2);
    twoxy.add_term({1, 1}, 2.0);
    x2.add_term({2, 0}, 1.0);
    DifferentialForm want(2);
    want.add_term(0b01, ScalarField(twoxy));
    want.add_term(0b10, ScalarField(x2));
    CHECK(max_coeff_distance(d2, want) == 0.0);
}

TEST_CASE("contraction on the standard examples") {
    // iota_{d/dx}(dx ^ dy) = dy
    const DifferentialForm dxdy = wedge(DifferentialForm::dx(2, 0), DifferentialForm::dx(2, 1));
    CHECK(max_coeff_distance(contract(VectorField::coordinate(2, 0), dxdy),
                             DifferentialForm::dx(2, 1)) == 0.0);

    // iota_X of a 0-form is zero
    std::mt19937_64 rng(23);
    CHECK(contract(rfield(2, 2, rng), DifferentialForm::from_scalar(coord(2, 1))).max_coeff_abs() ==
          0.0);

    // iota_{x d/dy}(dy ^ dz) = x dz
    VectorField xdy_field(3, {ScalarField::constant(3, 0.0), coord(3, 0), ScalarField::constant(3, 0.0)});
    const DifferentialForm dydz = wedge(DifferentialForm::dx(3, 1), DifferentialForm::dx(3, 2));
    CHECK(max_coeff_distance(contract(xdy_field, dydz), f_times_dx(coord(3, 0), 2)) == 0.0);
}

TEST_CASE("Lie derivative on the standard examples") {
    // L_{d/dx}(x dy) = dy (hand: Cartan formula)
    const DifferentialForm xdy = f_times_dx(coord(2, 0), 1);
    CHECK(max_coeff_distance(lie_derivative(VectorField::coordinate(2, 0), xdy),
                             DifferentialForm::dx(2, 1)) == 0.0);

    // L_X of a constant 0-form is 0
    std::mt19937_64 rng(29);
    CHECK(lie_derivative(rfield(2, 2, rng), DifferentialForm::constant(2, 4.0)).max_coeff_abs() ==
          0.0);

    // L_{d/dx}(dx) = 0
    CHECK(lie_derivative(VectorField::coordinate(2, 0), DifferentialForm::dx(2, 0)).max_coeff_abs() ==
          0.0);
}

TEST_CASE("wedge algebra") {
    const DifferentialForm dx = DifferentialForm::dx(2, 0), dy = DifferentialForm::dx(2, 1);
    CHECK(max_coeff_distance(wedge(dx, dy), wedge(dy, dx) * (-1.0)) == 0.0);
    CHECK(wedge(dx, dx).max_coeff_abs() == 0.0);
    // f ^ w = f w for 0-forms
    const DifferentialForm f = DifferentialForm::from_scalar(coord(2, 0));
    CHECK(max_coeff_distance(wedge(f, dy), coord(2, 0) * dy) == 0.0);
    CHECK_THROWS_AS(wedge(dx, DifferentialForm::dx(3, 0)), algebra_error);
}

TEST_CASE("graded-commutativity and associativity of the wedge on random forms") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 25; ++i) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const DifferentialForm a = rform(n, 2, rng), b = rform(n, 2, rng), c = rform(n, 2, rng);
        CHECK(max_coeff_distance(wedge(wedge(a, b), c), wedge(a, wedge(b, c))) <= 1e-12);
    }
}

TEST_CASE("d^2 = 0 and the Cartan formula on random polynomial data") {
    std::mt19937_64 rng(37);
    for (int i = 0; i < 25; ++i) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const DifferentialForm w = rform(n, 2, rng);
        CHECK(exterior_d(exterior_d(w)).max_coeff_abs() <= 1e-12);
        const VectorField X = rfield(n, 2, rng);
        const DifferentialForm cartan = exterior_d(contract(X, w)) + contract(X, exterior_d(w));
        CHECK(max_coeff_distance(lie_derivative(X, w), cartan) <= 1e-12);
    }
}

TEST_CASE("bracket identities") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 20; ++i) {
        const int n = 2;
        const VectorField X = rfield(n, 2, rng), Y = rfield(n, 2, rng);
        const DifferentialForm w = rform(n, 2, rng);
        CHECK((contract(X, contract(Y, w)) + contract(Y, contract(X, w))).max_coeff_abs() <= 1e-12);
        const DifferentialForm li =
            lie_derivative(X, contract(Y, w)) - contract(Y, lie_derivative(X, w));
        CHECK(max_coeff_distance(li, contract(lie_bracket(X, Y), w)) <= 1e-12);
        const DifferentialForm ll =
            lie_derivative(X, lie_derivative(Y, w)) - lie_derivative(Y, lie_derivative(X, w));
        CHECK(max_coeff_distance(ll, lie_derivative(lie_bracket(X, Y), w)) <= 1e-12);
    }
}

TEST_CASE("function linearity of iota and the multiplier rule for L") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 15; ++i) {
        const int n = 2;
        const ScalarField f = ScalarField(random_polynomial(n, 2, rng));
        const VectorField X = rfield(n, 2, rng);
        const DifferentialForm w = rform(n, 2, rng);
        CHECK(max_coeff_distance(contract(f * X, w), f * contract(X, w)) <= 1e-12);
        const DifferentialForm rhs =
            f * lie_derivative(X, w) +
            wedge(exterior_d(DifferentialForm::from_scalar(f)), contract(X, w));
        CHECK(max_coeff_distance(lie_derivative(f * X, w), rhs) <= 1e-12);
    }
}

TEST_CASE("pi pullback and the degree-0 restriction compose to the identity") {
    std::mt19937_64 rng(47);
    const ScalarField f = ScalarField(random_polynomial(2, 3, rng));
    CHECK((i_restrict(pi_pullback(f)) - f).poly().max_abs_coeff() == 0.0);
}

TEST_CASE("form evaluation on the odd tangent bundle is multiplicative") {
    std::mt19937_64 rng(53);
    const int n = 2, k = 4;
    for (int i = 0; i < 15; ++i) {
        const DifferentialForm a = rform(n, 2, rng), b = rform(n, 2, rng);
        GrassmannVector x = {GrassmannElement::scalar(k, 0.3), GrassmannElement::scalar(k, -0.8)};
        GrassmannVector xi = {GrassmannElement::generator(k, 0), GrassmannElement::generator(k, 1)};
        const GrassmannElement lhs = wedge(a, b).eval_grassmann(x, xi);
        const GrassmannElement rhs = a.eval_grassmann(x, xi) * b.eval_grassmann(x, xi);
        CHECK((lhs - rhs).max_abs() <= 1e-12);
    }
}

TEST_CASE("parity and degree bookkeeping") {
    DifferentialForm w(2);
    w.add_term(0b01, ScalarField::constant(2, 1.0));
    CHECK(w.parity() == Parity::Odd);
    w.add_term(0b11, ScalarField::constant(2, 1.0));
    CHECK(!w.parity().has_value());
    CHECK(w.degree() == 2);
    CHECK_FALSE(w.is_homogeneous_degree());
}
