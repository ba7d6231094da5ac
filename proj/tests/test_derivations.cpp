#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "supt/derivations.hpp"

using namespace supt;

namespace {

DifferentialForm zero2() { return DifferentialForm::zero(2); }

PiTDerivation dx_times_iota(int coeff_index, int field_index) {
    // (dx^{coeff}) * iota_{d/dx^{field}} on R^2, an even derivation.
    std::vector<DifferentialForm> a = {zero2(), zero2()};
    std::vector<DifferentialForm> b = {zero2(), zero2()};
    b[field_index] = DifferentialForm::dx(2, coeff_index);
    return PiTDerivation(Parity::Even, a, b);
}

}  // namespace

TEST_CASE("apply: pure contraction and coefficiented contractions") {
    // iota_{d/dx} dx = 1
    const PiTDerivation iota_x = PiTDerivation::iota(VectorField::coordinate(2, 0));
    CHECK(max_coeff_distance(iota_x.apply(DifferentialForm::dx(2, 0)),
                             DifferentialForm::constant(2, 1.0)) == 0.0);

    // (dx iota_{d/dx}) dy = 0
    CHECK(dx_times_iota(0, 0).apply(DifferentialForm::dx(2, 1)).max_coeff_abs() == 0.0);

    // (dy iota_{d/dx}) dx = dy
    CHECK(max_coeff_distance(dx_times_iota(1, 0).apply(DifferentialForm::dx(2, 0)),
                             DifferentialForm::dx(2, 1)) == 0.0);
}

TEST_CASE("graded Leibniz rule of apply") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        const int n = 2;
        DifferentialForm w(n), e(n);
        w.add_term(0b01, ScalarField(random_polynomial(n, 2, rng)));  // odd form
        e.add_term(0b00, ScalarField(random_polynomial(n, 2, rng)));
        e.add_term(0b11, ScalarField(random_polynomial(n, 2, rng)));  // even form
        const PiTDerivation V = PiTDerivation::exterior(n);            // odd derivation
        const DifferentialForm lhs = V.apply(wedge(w, e));
        const DifferentialForm rhs =
            wedge(V.apply(w), e) - wedge(w, V.apply(e));  // (-1)^{|w|} with |w| odd
        CHECK(max_coeff_distance(lhs, rhs) <= 1e-12);
    }
}

TEST_CASE("graded bracket on the standard examples") {
    const PiTDerivation ix = PiTDerivation::iota(VectorField::coordinate(2, 0));
    const PiTDerivation iy = PiTDerivation::iota(VectorField::coordinate(2, 1));
    CHECK(graded_bracket(ix, iy).is_zero());

    // [L_{d/dx}, iota_{x d/dy}] = iota_{d/dy}
    VectorField x_dy(2, {ScalarField::constant(2, 0.0), ScalarField::coordinate(2, 0)});
    const PiTDerivation lhs =
        graded_bracket(PiTDerivation::lie(VectorField::coordinate(2, 0)), PiTDerivation::iota(x_dy));
    const PiTDerivation want = PiTDerivation::iota(VectorField::coordinate(2, 1));
    CHECK((lhs + (-1.0) * want).max_coeff_abs() <= 1e-12);

    // [d, d] = 0 i.e. d^2 = 0
    const PiTDerivation d = PiTDerivation::exterior(2);
    CHECK(graded_bracket(d, d).is_zero());
}

TEST_CASE("derivation square of d + iota is a Lie derivative (Cartan)") {
    const int n = 1;
    const PiTDerivation X =
        PiTDerivation::exterior(n) + PiTDerivation::iota(VectorField::coordinate(n, 0));
    const PiTDerivation sq = derivation_square(X);
    const PiTDerivation want = PiTDerivation::lie(VectorField::coordinate(n, 0));
    CHECK((sq + (-1.0) * want).max_coeff_abs() <= 1e-12);
}

TEST_CASE("decomposition: images of coordinates give the normal form") {
    // V = d: a_i = dx^i, b_i = 0.
    const int n = 2;
    const PiTDerivation d = PiTDerivation::exterior(n);
    RawDerivation raw;
    raw.parity = Parity::Odd;
    for (int i = 0; i < n; ++i) {
        raw.images_x.push_back(d.apply(DifferentialForm::from_scalar(ScalarField::coordinate(n, i))));
        raw.images_dx.push_back(d.apply(DifferentialForm::dx(n, i)));
    }
    raw.action = [&d](const DifferentialForm& w) { return d.apply(w); };
    const PiTDerivation back = decompose_derivation(raw);
    for (int i = 0; i < n; ++i) {
        CHECK(max_coeff_distance(back.lie_coeff(i), DifferentialForm::dx(n, i)) == 0.0);
        CHECK(back.contract_coeff(i).max_coeff_abs() == 0.0);
    }

    // V = iota_{d/dx}: a = 0, b_0 = 1.
    RawDerivation raw2;
    raw2.parity = Parity::Odd;
    raw2.images_x = {zero2(), zero2()};
    raw2.images_dx = {DifferentialForm::constant(2, 1.0), zero2()};
    const PiTDerivation V2 = decompose_derivation(raw2);
    CHECK(max_coeff_distance(V2.contract_coeff(0), DifferentialForm::constant(2, 1.0)) == 0.0);
    CHECK(V2.lie_coeff(0).max_coeff_abs() == 0.0);

    // V = dy L_{d/dx}: a_0 = dy, everything else 0.
    RawDerivation raw3;
    raw3.parity = Parity::Odd;
    raw3.images_x = {DifferentialForm::dx(2, 1), zero2()};
    raw3.images_dx = {zero2(), zero2()};
    const PiTDerivation V3 = decompose_derivation(raw3);
    CHECK(max_coeff_distance(V3.lie_coeff(0), DifferentialForm::dx(2, 1)) == 0.0);
    CHECK(V3.contract_coeff(0).max_coeff_abs() == 0.0);
    CHECK(V3.lie_coeff(1).max_coeff_abs() == 0.0);
}

TEST_CASE("decomposition rejects parity-inconsistent input") {
    RawDerivation raw;
    raw.parity = Parity::Odd;
    // An odd derivation must send even x^i to odd forms; a 0-form image is wrong.
    raw.images_x = {DifferentialForm::constant(2, 1.0), zero2()};
    raw.images_dx = {zero2(), zero2()};
    CHECK_THROWS_AS(decompose_derivation(raw), algebra_error);
}

TEST_CASE("decomposition flags Leibniz-inconsistent actions") {
    RawDerivation raw;
    raw.parity = Parity::Odd;
    raw.images_x = {DifferentialForm::dx(2, 0), zero2()};
    raw.images_dx = {zero2(), zero2()};
    raw.action = [](const DifferentialForm& w) {
        return w;  // not the derivation with those images
    };
    CHECK_THROWS_AS(decompose_derivation(raw), algebra_error);
}

TEST_CASE("apply shifts the form parity by the derivation parity") {
    std::mt19937_64 rng(7);
    const int n = 2;
    DifferentialForm even_form(n);
    even_form.add_term(0b11, ScalarField(random_polynomial(n, 2, rng)));
    const DifferentialForm out = PiTDerivation::exterior(n).apply(even_form);
    if (!out.terms().empty()) CHECK(out.parity() == Parity::Odd);
    const DifferentialForm out2 =
        PiTDerivation::lie(VectorField::coordinate(n, 0)).apply(even_form);
    if (!out2.terms().empty()) CHECK(out2.parity() == Parity::Even);
}

TEST_CASE("super forms: left-theta multiplication signs") {
    const int n = 2;
    // (theta0 dx) * (dy) keeps theta on the left; (dy)*(theta0 dx) crosses dy.
    SuperForm a(n, {0, 1});
    a.add_part(0b01, DifferentialForm::dx(n, 0));
    SuperForm b(n, {0, 1});
    b.add_part(0, DifferentialForm::dx(n, 1));
    const SuperForm ab = a * b;  // theta0 (dx ^ dy)
    const SuperForm ba = b * a;  // dy theta0 dx = -theta0 (dy ^ dx) = theta0 (dx ^ dy)
    CHECK(max_coeff_distance(ab, ba) <= 1e-12);
    CHECK(max_coeff_distance(
              ab.part(0b01),
              wedge(DifferentialForm::dx(n, 0), DifferentialForm::dx(n, 1))) == 0.0);

    // theta0 * theta1 ordering sign via the diagonal substitution to one theta.
    SuperForm t0(n, {0, 1}), t1(n, {0, 1});
    t0.add_part(0b01, DifferentialForm::constant(n, 1.0));
    t1.add_part(0b10, DifferentialForm::constant(n, 1.0));
    const SuperForm prod = t0 * t1;
    CHECK(max_coeff_distance(prod.part(0b11), DifferentialForm::constant(n, 1.0)) == 0.0);
    const SuperForm swapped = t1 * t0;
    CHECK(max_coeff_distance(swapped.part(0b11), DifferentialForm::constant(n, -1.0)) == 0.0);
}
