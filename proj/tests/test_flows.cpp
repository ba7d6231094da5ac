#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "supt/flows.hpp"

using namespace supt;

namespace {

VectorField rotation() {
    Polynomial mx(2), my(2);
    mx.add_term({0, 1}, -1.0);
    my.add_term({1, 0}, 1.0);
    return VectorField(2, {ScalarField(mx), ScalarField(my)});
}

VectorField translation_x(int dim) {
    std::vector<ScalarField> comps(dim, ScalarField::constant(dim, 0.0));
    comps[0] = ScalarField::constant(dim, 1.0);
    return VectorField(dim, std::move(comps));
}

VectorField linear_1d() {  // x d/dx
    return VectorField(1, {ScalarField::coordinate(1, 0)});
}

}  // namespace

TEST_CASE("even flows: translation, rotation, exponential") {
    const std::vector<double> origin2 = {0.0, 0.0};
    CHECK(even_flow(translation_x(2), 1.0, origin2)[0] == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> e1 = {1.0, 0.0};
    const auto rot = even_flow(rotation(), M_PI / 2, e1);
    CHECK(std::abs(rot[0]) <= 1e-8);
    CHECK(std::abs(rot[1] - 1.0) <= 1e-8);

    const std::vector<double> one = {1.0};
    CHECK(std::abs(even_flow(linear_1d(), 1.0, one)[0] - std::exp(1.0)) <= 1e-8);
}

TEST_CASE("even flow transports nilpotent corrections (variational data)") {
    // x(t) = x0 e^t; seeding x0 = 1 + g0 g1 must produce e (1 + g0 g1).
    const GrassmannVector x0 = {GrassmannElement::scalar(2, 1.0) +
                                GrassmannElement::generator(2, 0) * GrassmannElement::generator(2, 1)};
    const GrassmannVector y = even_flow(linear_1d(), 1.0, x0);
    CHECK(std::abs(y[0].body() - std::exp(1.0)) <= 1e-8);
    CHECK(std::abs(y[0].coefficient(0b11) - std::exp(1.0)) <= 1e-8);
}

TEST_CASE("flow divergence reports the last valid time") {
    // dx/dt = x^2 from 1 blows up at t = 1.
    Polynomial sq(1);
    sq.add_term({2}, 1.0);
    const VectorField X(1, {ScalarField(sq)});
    const std::vector<double> start = {1.0};
    try {
        even_flow(X, 2.0, start);
        FAIL("expected divergence");
    } catch (const divergence_error& e) {
        // The blow-up is at t = 1; the report is grid-resolution-limited.
        CHECK(e.last_valid_time <= 1.5);
        CHECK(e.last_valid_time >= 0.5);
    }
}

TEST_CASE("trotter: commuting fields compose exactly") {
    const VectorField X = translation_x(2);
    VectorField Y(2, {ScalarField::constant(2, 0.0), ScalarField::constant(2, 1.0)});
    for (long n : {1L, 3L, 8L}) {
        const auto y = trotter_flow(X, Y, 1.0, {0.0, 0.0}, n);
        CHECK(std::abs(y[0] - 1.0) <= 1e-10);
        CHECK(std::abs(y[1] - 1.0) <= 1e-10);
    }
}

TEST_CASE("trotter: rotation + translation converges with order about one") {
    const TrotterStudy study = trotter_convergence(rotation(), translation_x(2), 1.0, {1.0, 0.0}, 10);
    CHECK(study.rows.back().n == 1024);
    CHECK(study.rows.back().error < 5e-3);
    CHECK(study.fitted_order >= 0.9);
    // Error halves as n doubles, eventually.
    const auto& rows = study.rows;
    for (std::size_t j = 5; j < rows.size(); ++j)
        CHECK(rows[j].error < 0.75 * rows[j - 1].error);
}

TEST_CASE("odd flow action and its composition") {
    // X = d/dx, w = dx ^ dy -> theta-part iota_X w = dy.
    const DifferentialForm dxdy = wedge(DifferentialForm::dx(2, 0), DifferentialForm::dx(2, 1));
    const SuperForm img = odd_flow(VectorField::coordinate(2, 0)).apply(dxdy, 0);
    CHECK(max_coeff_distance(img.part(0), dxdy) == 0.0);
    CHECK(max_coeff_distance(img.part(1), DifferentialForm::dx(2, 1)) == 0.0);

    // 0-forms are unchanged.
    const SuperForm f_img =
        odd_flow(rotation()).apply(DifferentialForm::from_scalar(ScalarField::coordinate(2, 0)), 0);
    CHECK(f_img.part(1).max_coeff_abs() == 0.0);

    // X = 0 acts as the identity.
    const SuperForm z_img = odd_flow(VectorField::zero(2)).apply(dxdy, 0);
    CHECK(z_img.part(1).max_coeff_abs() == 0.0);
}

TEST_CASE("composite of odd flows through the diagonal") {
    // X = d/dx, Y = d/dy on dx ^ dy: theta-part = dy - dx.
    const DifferentialForm dxdy = wedge(DifferentialForm::dx(2, 0), DifferentialForm::dx(2, 1));
    const SuperForm composite = odd_flow_composite_via_diagonal(
        VectorField::coordinate(2, 0), VectorField::coordinate(2, 1), dxdy, 0, 1, 2, 3);
    const DifferentialForm want = DifferentialForm::dx(2, 1) - DifferentialForm::dx(2, 0);
    CHECK(max_coeff_distance(composite.part(1), want) == 0.0);
    CHECK(max_coeff_distance(composite.part(0), dxdy) == 0.0);

    // X = Y doubles the contraction.
    const SuperForm doubled = odd_flow_composite_via_diagonal(
        VectorField::coordinate(2, 0), VectorField::coordinate(2, 0), dxdy, 0, 1, 2, 3);
    CHECK(max_coeff_distance(doubled.part(1), DifferentialForm::dx(2, 1) * 2.0) == 0.0);

    // Composition with the zero field is the other action.
    const SuperForm with_zero = odd_flow_composite_via_diagonal(
        VectorField::zero(2), VectorField::coordinate(2, 0), dxdy, 0, 1, 2, 3);
    const SuperForm alone = odd_flow(VectorField::coordinate(2, 0)).apply(dxdy, 2);
    CHECK(max_coeff_distance(with_zero, alone) <= 1e-12);
}

TEST_CASE("composite equals the flow of the sum, exactly, on random data") {
    std::mt19937_64 rng(61);
    for (int i = 0; i < 30; ++i) {
        const int n = 1 + static_cast<int>(rng() % 3);
        std::vector<ScalarField> cx, cy;
        for (int j = 0; j < n; ++j) {
            cx.push_back(ScalarField(random_polynomial(n, 2, rng)));
            cy.push_back(ScalarField(random_polynomial(n, 2, rng)));
        }
        const VectorField X(n, cx), Y(n, cy);
        DifferentialForm w(n);
        for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask)
            if ((rng() & 1) == 0) w.add_term(mask, ScalarField(random_polynomial(n, 2, rng)));
        const SuperForm via_diag = odd_flow_composite_via_diagonal(X, Y, w, 0, 1, 2, 3);
        const SuperForm direct = compose_odd_flows(odd_flow(X), odd_flow(Y)).apply(w, 2);
        CHECK(max_coeff_distance(via_diag, direct) <= 1e-12);
    }
}

TEST_CASE("reparametrized even flows") {
    // f = 2: s(t) = 2t.
    const ScalarField two = ScalarField::constant(1, 2.0);
    CHECK(std::abs(reparam_flow_even(two, translation_x(1), 1.0, {0.0})[0] - 2.0) <= 1e-9);

    // f = 1 reduces to the plain flow.
    const ScalarField one = ScalarField::constant(1, 1.0);
    const std::vector<double> start = {1.0};
    CHECK(std::abs(reparam_flow_even(one, linear_1d(), 0.8, start)[0] -
                   even_flow(linear_1d(), 0.8, start)[0]) <= 1e-9);

    // f = 1 + x^2 with X = d/dx from 0: tan t.
    Polynomial fp(1);
    fp.add_term({0}, 1.0);
    fp.add_term({2}, 1.0);
    IntegratorOptions opts;
    opts.tol = 1e-9;
    for (double t : {0.4, 1.0}) {
        const double got = reparam_flow_even(ScalarField(fp), translation_x(1), t, {0.0}, opts)[0];
        CHECK(std::abs(got - std::tan(t)) <= 1e-6);
    }

    // Nonpositive factors are rejected.
    CHECK_THROWS_AS(reparam_flow_even(ScalarField::constant(1, -1.0), translation_x(1), 1.0, {0.0}),
                    supt::error);
}

TEST_CASE("trajectory equivalence") {
    // Y = 2X: same trajectories, phi(t) = 2t.
    const VectorField X = linear_1d();
    const VectorField Y = 2.0 * X;
    const auto r1 = trajectory_equivalence_check(X, Y, {1.0}, {0.2, 0.5});
    CHECK(r1.same_trajectories);
    CHECK(r1.trajectory_residual <= 1e-6);

    // Y = (1 + x^2) X on R with X = d/dx.
    Polynomial fp(1);
    fp.add_term({0}, 1.0);
    fp.add_term({2}, 1.0);
    const VectorField Y2 = ScalarField(fp) * translation_x(1);
    const auto r2 = trajectory_equivalence_check(translation_x(1), Y2, {0.0}, {0.3, 0.8},
                                                 ScalarField(fp));
    CHECK(r2.same_trajectories);
    CHECK(r2.trajectory_residual <= 1e-6);

    // A rotated field is not a positive multiple: counterexample returned.
    const auto r3 = trajectory_equivalence_check(translation_x(2), rotation(), {1.0, 1.0}, {0.5});
    CHECK_FALSE(r3.same_trajectories);
    CHECK(r3.counterexample.has_value());
}

TEST_CASE("flows of f iota_X: closed forms, laws and preconditions") {
    // R^2, f = dy, X = d/dx: dx -> dx + t dy.
    const FIotaFlow xf0(DifferentialForm::dx(2, 1), VectorField::coordinate(2, 0),
                        FIotaFlow::Mode::Xf0);
    const DifferentialForm moved = xf0.apply(0.7, DifferentialForm::dx(2, 0));
    CHECK(max_coeff_distance(moved, DifferentialForm::dx(2, 0) + DifferentialForm::dx(2, 1) * 0.7) ==
          0.0);
    CHECK(max_coeff_distance(xf0.apply(0.0, moved), moved) == 0.0);

    // R, f = dx, X = d/dx: dx -> e^t dx.
    const FIotaFlow xf1(DifferentialForm::dx(1, 0), VectorField::coordinate(1, 0),
                        FIotaFlow::Mode::Xf1);
    const DifferentialForm scaled = xf1.apply(0.9, DifferentialForm::dx(1, 0));
    CHECK(max_coeff_distance(scaled, DifferentialForm::dx(1, 0) * std::exp(0.9)) <= 1e-12);

    // Group law (Xf0) and cocycle law (Xf1) hold exactly.
    std::mt19937_64 rng(67);
    DifferentialForm w(2);
    w.add_term(0b01, ScalarField(random_polynomial(2, 2, rng)));
    w.add_term(0b11, ScalarField(random_polynomial(2, 2, rng)));
    CHECK(max_coeff_distance(xf0.apply(0.3, xf0.apply(0.5, w)), xf0.apply(0.8, w)) <= 1e-12);
    DifferentialForm w1(1);
    w1.add_term(0b1, ScalarField(random_polynomial(1, 2, rng)));
    CHECK(max_coeff_distance(xf1.apply(0.3, xf1.apply(0.5, w1)), xf1.apply(0.8, w1)) <= 1e-12);

    // Wrong mode: iota_{d/dx} dx = 1 != 0, reported.
    CHECK_THROWS_WITH_AS(FIotaFlow(DifferentialForm::dx(1, 0), VectorField::coordinate(1, 0),
                                   FIotaFlow::Mode::Xf0),
                         doctest::Contains("iota_X f"), supt::error);
}

TEST_CASE("super flow of iota_X: t-independent, theta-part is the contraction") {
    const SuperFlow flow(PiTDerivation::iota(VectorField::coordinate(2, 0)));
    CHECK(flow.regime() == SuperFlow::Regime::Nilpotent);  // X^2 = 0
    const DifferentialForm dxdy = wedge(DifferentialForm::dx(2, 0), DifferentialForm::dx(2, 1));
    for (double t : {0.0, 1.3}) {
        const SuperForm v = flow.apply(t, 0, dxdy);
        CHECK(max_coeff_distance(v.part(0), dxdy) <= 1e-12);
        CHECK(max_coeff_distance(v.part(1), DifferentialForm::dx(2, 1)) <= 1e-12);
    }
}

TEST_CASE("super flow of d: w + theta dw") {
    const SuperFlow flow(PiTDerivation::exterior(2));
    Polynomial xy(2);
    xy.add_term({1, 1}, 1.0);
    const DifferentialForm w = DifferentialForm::from_scalar(ScalarField(xy));
    const SuperForm v = flow.apply(2.0, 0, w);
    CHECK(max_coeff_distance(v.part(0), w) == 0.0);
    CHECK(max_coeff_distance(v.part(1), exterior_d(w)) == 0.0);
}

TEST_CASE("super flow with X^2 = L_{d/dx} shifts coefficients") {
    // X = d + iota_{d/dx} on R: e^{-t X^2}(x dx) has coefficient x - t.
    const PiTDerivation X =
        PiTDerivation::exterior(1) + PiTDerivation::iota(VectorField::coordinate(1, 0));
    const SuperFlow flow(X);
    CHECK(flow.regime() == SuperFlow::Regime::LieField);
    Polynomial xp(1);
    xp.add_term({1}, 1.0);
    DifferentialForm w(1);
    w.add_term(0b1, ScalarField(xp));  // x dx
    const double t = 0.6;
    const DifferentialForm moved = flow.exp_minus_t_square(t, w);
    for (double x : {-0.5, 0.2, 1.0}) {
        const GrassmannVector gx = {GrassmannElement::scalar(1, x)};
        const GrassmannVector xi = {GrassmannElement::generator(1, 0)};
        const double got = moved.eval_grassmann(gx, xi).coefficient(0b1);
        CHECK(got == doctest::Approx(x - t).epsilon(1e-8));
    }
}

TEST_CASE("super flow rejects generators outside the supported regimes") {
    // X = (x dx) L_{d/dx} + iota_{d/dx}: X^2 has a 0-form L-part x with
    // non-exact iota-part, and is not nilpotent.
    DifferentialForm xdx(1);
    Polynomial xp(1);
    xp.add_term({1}, 1.0);
    xdx.add_term(0b1, ScalarField(xp));
    const PiTDerivation X = xdx * PiTDerivation::lie(VectorField::coordinate(1, 0)) +
                            PiTDerivation::iota(VectorField::coordinate(1, 0));
    const SuperFlow flow(X);
    CHECK(flow.regime() == SuperFlow::Regime::Nilpotent);
    Polynomial x2(1);
    x2.add_term({2}, 1.0);
    CHECK_THROWS_AS(flow.exp_minus_t_square(1.0, DifferentialForm::from_scalar(ScalarField(x2))),
                    unsupported_generator);
}

TEST_CASE("pullbacks along even flows") {
    // Translation: (x dx) -> (x + t) dx.
    Polynomial xp(1);
    xp.add_term({1}, 1.0);
    DifferentialForm w(1);
    w.add_term(0b1, ScalarField(xp));
    const DifferentialForm moved = pullback_along_even_flow(translation_x(1), 0.7, w);
    for (double x : {-1.0, 0.3}) {
        const GrassmannVector gx = {GrassmannElement::scalar(1, x)};
        const GrassmannVector xi = {GrassmannElement::generator(1, 0)};
        CHECK(moved.eval_grassmann(gx, xi).coefficient(0b1) ==
              doctest::Approx(x + 0.7).epsilon(1e-9));
    }

    // t = 0 is the identity.
    CHECK(max_coeff_distance(pullback_along_even_flow(translation_x(1), 0.0, w), w) == 0.0);

    // Rotations preserve the area form.
    const DifferentialForm area = wedge(DifferentialForm::dx(2, 0), DifferentialForm::dx(2, 1));
    const DifferentialForm rotated = pullback_along_even_flow(rotation(), 1.1, area);
    const GrassmannVector gx = {GrassmannElement::scalar(2, 0.4), GrassmannElement::scalar(2, -0.2)};
    const GrassmannVector xi = {GrassmannElement::generator(2, 0), GrassmannElement::generator(2, 1)};
    CHECK((rotated.eval_grassmann(gx, xi) - area.eval_grassmann(gx, xi)).max_abs() <= 1e-8);
}

TEST_CASE("odd reparametrization lemma verification") {
    const SuperFlow flow(PiTDerivation::exterior(2));
    DifferentialForm w(2);
    Polynomial xy(2);
    xy.add_term({1, 1}, 1.0);
    w.add_term(0, ScalarField(xy));
    w.add_term(0b01, ScalarField::coordinate(2, 1));
    const std::vector<double> times = {0.0, 0.5, 1.0};
    const std::vector<std::vector<double>> pts = {{0.3, -0.2}};

    // f = 1, phi = id: both residuals vanish.
    Polynomial id_b(1), one_tau(1);
    id_b.add_term({1}, 1.0);
    one_tau.add_term({0}, 1.0);
    const auto ok = verify_odd_reparam_lemma(1.0, flow, id_b, one_tau, w, times, pts);
    CHECK(ok.distribution_residual <= 1e-12);
    CHECK(ok.flow_equation_residual <= 1e-12);

    // f = c: phi = (c^2 t, c theta) passes.
    const double c = 1.5;
    Polynomial bc(1), tc(1);
    bc.add_term({1}, c * c);
    tc.add_term({0}, c);
    const auto good = verify_odd_reparam_lemma(c, flow, bc, tc, w, times, pts);
    CHECK(good.distribution_residual <= 1e-10);
    CHECK(good.flow_equation_residual <= 1e-10);

    // (t, c theta) with c != 1 violates the distribution condition.
    Polynomial plain(1);
    plain.add_term({1}, 1.0);
    const auto bad = verify_odd_reparam_lemma(c, flow, plain, tc, w, times, pts);
    CHECK(bad.distribution_residual > 0.1);
    CHECK(bad.offending_time.has_value());
}
