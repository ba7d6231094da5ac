#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "supt/bundles.hpp"

using namespace supt;

namespace {

GradedConnection random_even_connection(int n, int p, int q, int deg, std::mt19937_64& rng) {
    const GradedBundle bundle{n, p, q};
    const int m = bundle.rank();
    FormMatrix A(m, m, DifferentialForm::zero(n));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            if (bundle.fiber_parity(a) != bundle.fiber_parity(b)) continue;
            DifferentialForm w(n);
            for (int l = 0; l < n; ++l)
                w.add_term(std::uint32_t{1} << l, ScalarField(random_polynomial(n, deg, rng)));
            A.at(a, b) = std::move(w);
        }
    return GradedConnection(bundle, std::move(A));
}

SectionM random_section(int n, int m, int deg, std::mt19937_64& rng) {
    SectionM s;
    for (int a = 0; a < m; ++a) s.push_back(ScalarField(random_polynomial(n, deg, rng)));
    return s;
}

VectorField rfield(int n, int deg, std::mt19937_64& rng) {
    std::vector<ScalarField> comps;
    for (int i = 0; i < n; ++i) comps.push_back(ScalarField(random_polynomial(n, deg, rng)));
    return VectorField(n, std::move(comps));
}

}  // namespace

TEST_CASE("covariant derivative downstairs") {
    // Flat connection, constant section: zero.
    const GradedConnection flat = GradedConnection::flat(GradedBundle{1, 1, 0});
    const SectionM constant = {ScalarField::constant(1, 2.0)};
    CHECK(covariant_derivative_M(flat, VectorField::coordinate(1, 0), constant)[0]
              .poly()
              .max_abs_coeff() == 0.0);

    // R, rank 1|0, A = a dx, s = 1, X = d/dx: result a.
    const double a = 0.7;
    FormMatrix A(1, 1, DifferentialForm::dx(1, 0) * a);
    const GradedConnection conn(GradedBundle{1, 1, 0}, A);
    const SectionM one = {ScalarField::constant(1, 1.0)};
    const ScalarField r = covariant_derivative_M(conn, VectorField::coordinate(1, 0), one)[0];
    CHECK((r - ScalarField::constant(1, a)).poly().max_abs_coeff() == 0.0);
}

TEST_CASE("Leibniz rule for the covariant derivative") {
    std::mt19937_64 rng(71);
    for (int i = 0; i < 10; ++i) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const GradedConnection conn = random_even_connection(n, 1, 1, 2, rng);
        const VectorField X = rfield(n, 1, rng);
        const ScalarField f = ScalarField(random_polynomial(n, 2, rng));
        const SectionM s = random_section(n, 2, 2, rng);
        SectionM fs;
        for (const auto& c : s) fs.push_back(f * c);
        const SectionM lhs = covariant_derivative_M(conn, X, fs);
        const SectionM ds = covariant_derivative_M(conn, X, s);
        ScalarField xf = ScalarField::constant(n, 0.0);
        for (int j = 0; j < n; ++j) xf = xf + X.component(j) * f.partial(j);
        for (int aa = 0; aa < 2; ++aa)
            CHECK((lhs[aa] - (xf * s[aa] + f * ds[aa])).poly().max_abs_coeff() <= 1e-12);
    }
}

TEST_CASE("pullback pairings reproduce the three displayed identities") {
    std::mt19937_64 rng(73);
    for (int i = 0; i < 6; ++i) {
        const int n = 1 + static_cast<int>(rng() % 2);
        const GradedConnection conn = random_even_connection(n, 1, 1, 2, rng);
        const PiTConnection pb = PiTConnection::pullback(conn);
        const SectionM s = random_section(n, 2, 2, rng);
        const VectorField X = rfield(n, 2, rng);

        // <nabla(pi*s), iota_X> = 0
        CHECK(max_coeff_abs(pullback_pairing(pb, s, PiTDerivation::iota(X))) == 0.0);

        // <nabla(pi*s), L_X> = nabla_X s, pulled back (0-forms).
        const PiTSection lie_val = pullback_pairing(pb, s, PiTDerivation::lie(X));
        const SectionM want = covariant_derivative_M(conn, X, s);
        for (int aa = 0; aa < 2; ++aa) {
            for (const auto& [mask, f] : lie_val[aa].terms()) CHECK(mask == 0);
            CHECK((lie_val[aa].coefficient(0) - want[aa]).poly().max_abs_coeff() <= 1e-12);
        }

        // <nabla(pi*s), d> = nabla s with 1-form components.
        const PiTSection d_val = pullback_pairing(pb, s, PiTDerivation::exterior(n));
        for (int aa = 0; aa < 2; ++aa) {
            DifferentialForm want_a = exterior_d(DifferentialForm::from_scalar(s[aa]));
            for (int bb = 0; bb < 2; ++bb) want_a += s[bb] * conn.A().at(aa, bb);
            CHECK(max_coeff_distance(d_val[aa], want_a) <= 1e-12);
        }
    }
}

TEST_CASE("odd-triviality criterion accepts pullbacks and flags violations") {
    std::mt19937_64 rng(79);
    const int n = 2;
    const GradedConnection conn = random_even_connection(n, 1, 1, 2, rng);
    const PiTConnection good = PiTConnection::pullback(conn);
    CHECK(is_odd_trivial(good, rng).odd_trivial);

    // Nonzero iota-coefficient: pairs with iota-directions.
    std::vector<FormMatrix> gl, gi;
    for (int l = 0; l < n; ++l) {
        gl.push_back(good.gamma_lie(l));
        gi.push_back(good.gamma_iota(l));
    }
    gi[1].at(0, 1) = DifferentialForm::from_scalar(ScalarField::coordinate(n, 0));
    const auto bad1 = is_odd_trivial(PiTConnection(conn.bundle(), gl, gi), rng);
    CHECK_FALSE(bad1.odd_trivial);
    CHECK(bad1.witness.find("iota") != std::string::npos);

    // 2-form L-coefficient: the pairing leaves the pulled-back sections.
    std::vector<FormMatrix> gl2 = gl, gi2;
    for (int l = 0; l < n; ++l) gi2.push_back(FormMatrix(2, 2, DifferentialForm::zero(n)));
    DifferentialForm two(n);
    two.add_term(0b11, ScalarField::constant(n, 1.0));
    gl2[0].at(1, 1) += two;
    const auto bad2 = is_odd_trivial(PiTConnection(conn.bundle(), gl2, gi2), rng);
    CHECK_FALSE(bad2.odd_trivial);
    CHECK(bad2.witness.find("not pulled back") != std::string::npos);
}

TEST_CASE("restriction inverts the pullback and preserves evenness") {
    std::mt19937_64 rng(83);
    for (int i = 0; i < 6; ++i) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const int p = 1 + static_cast<int>(rng() % 2);
        const int q = 1 + static_cast<int>(rng() % 2);
        const GradedConnection conn = random_even_connection(n, p, q, 2, rng);
        const GradedConnection back = restrict_connection(PiTConnection::pullback(conn), rng);
        const int m = conn.bundle().rank();
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                CHECK(max_coeff_distance(back.A().at(a, b), conn.A().at(a, b)) <= 1e-12);
        CHECK(back.is_even());
    }

    // Flat in, zero out.
    std::mt19937_64 rng2(5);
    const GradedConnection flat = GradedConnection::flat(GradedBundle{2, 1, 1});
    const GradedConnection zero = restrict_connection(PiTConnection::pullback(flat), rng2);
    CHECK(zero.A().at(0, 0).max_coeff_abs() == 0.0);

    // Restriction refuses connections that are not odd-trivial.
    std::vector<FormMatrix> gl(2, FormMatrix(2, 2, DifferentialForm::zero(2)));
    std::vector<FormMatrix> gi(2, FormMatrix(2, 2, DifferentialForm::zero(2)));
    gi[0].at(0, 0) = DifferentialForm::constant(2, 1.0);
    CHECK_THROWS_AS(restrict_connection(PiTConnection(GradedBundle{2, 1, 1}, gl, gi), rng2),
                    supt::error);
}

TEST_CASE("odd curvature vanishes for pullback connections") {
    std::mt19937_64 rng(89);
    const int n = 2;
    const GradedConnection conn = random_even_connection(n, 1, 1, 2, rng);
    const PiTConnection pb = PiTConnection::pullback(conn);
    PiTSection s;
    for (int a = 0; a < 2; ++a) {
        DifferentialForm w(n);
        w.add_term(0, ScalarField(random_polynomial(n, 2, rng)));
        w.add_term(0b01, ScalarField(random_polynomial(n, 1, rng)));
        s.push_back(std::move(w));
    }
    const PiTDerivation X = PiTDerivation::iota(rfield(n, 2, rng));
    const PiTDerivation Y = PiTDerivation::iota(rfield(n, 2, rng));
    CHECK(max_coeff_abs(odd_curvature(pb, X, Y, s)) <= 1e-12);
    CHECK(max_coeff_abs(odd_curvature(pb, X, X, s)) <= 1e-12);

    // Even-coefficient combinations of contraction fields stay flat.
    DifferentialForm even_coeff(n);
    even_coeff.add_term(0, ScalarField(random_polynomial(n, 1, rng)));
    even_coeff.add_term(0b11, ScalarField(random_polynomial(n, 1, rng)));
    CHECK(max_coeff_abs(odd_curvature(pb, even_coeff * X, Y, s)) <= 1e-12);

    CHECK_THROWS_AS(odd_curvature(pb, PiTDerivation::lie(rfield(n, 1, rng)), Y, s), algebra_error);
}

TEST_CASE("connection matrices must be 1-forms and evenness is structural") {
    FormMatrix bad(1, 1, DifferentialForm::constant(1, 1.0));
    CHECK_THROWS_AS(GradedConnection(GradedBundle{1, 1, 0}, bad), algebra_error);

    std::mt19937_64 rng(97);
    const GradedConnection even = random_even_connection(2, 1, 1, 1, rng);
    CHECK(even.is_even());
    FormMatrix offblock(2, 2, DifferentialForm::zero(2));
    offblock.at(0, 1) = DifferentialForm::dx(2, 0);
    const GradedConnection uneven(GradedBundle{2, 1, 1}, offblock);
    CHECK_FALSE(uneven.is_even());
}

TEST_CASE("grassmann matrix inverse handles nilpotent souls") {
    std::mt19937_64 rng(101);
    const int k = 3, m = 2;
    GrassmannMatrix A(m, m, GrassmannElement::zero(k));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            GrassmannElement v(k);
            for (std::uint32_t mask = 0; mask < v.basis_size(); ++mask)
                v.set_coefficient(mask, static_cast<double>(static_cast<int>(rng() % 9) - 4) * 0.25);
            if (i == j) v.set_coefficient(0, v.body() + 2.0);  // keep the body invertible
            A.at(i, j) = v;
        }
    const GrassmannMatrix I = grassmann_inverse(A) * A;
    CHECK(max_abs(I - grassmann_identity(m, k)) <= 1e-12);
}
