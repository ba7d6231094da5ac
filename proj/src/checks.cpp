#include "supt/checks.hpp"

#include <cmath>
#include <random>

#include "supt/json_io.hpp"
#include "supt/transport.hpp"

namespace supt {

namespace {

using Rng = std::mt19937_64;

ScalarField rpoly(int dim, int deg, Rng& rng) { return ScalarField(random_polynomial(dim, deg, rng)); }

VectorField rfield(int dim, int deg, Rng& rng) {
    std::vector<ScalarField> comps;
    for (int i = 0; i < dim; ++i) comps.push_back(rpoly(dim, deg, rng));
    return VectorField(dim, std::move(comps));
}

DifferentialForm rform(int dim, int deg, Rng& rng) {
    DifferentialForm w(dim);
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << dim); ++mask)
        if ((rng() & 1) == 0) w.add_term(mask, rpoly(dim, deg, rng));
    return w;
}

GrassmannElement relement(int k, Rng& rng) {
    GrassmannElement v(k);
    for (std::uint32_t m = 0; m < v.basis_size(); ++m)
        v.set_coefficient(m, static_cast<double>(static_cast<int>(rng() % 9) - 4) * 0.5);
    return v;
}

CheckResult make(const std::string& name, double residual, double tol) {
    return CheckResult{name, residual, tol, residual <= tol};
}

int rdim(Rng& rng) { return 1 + static_cast<int>(rng() % 3); }

// A connection with random even block-diagonal polynomial matrix.
GradedConnection random_even_connection(int n, int p, int q, int deg, Rng& rng) {
    const GradedBundle bundle{n, p, q};
    const int m = bundle.rank();
    FormMatrix A(m, m, DifferentialForm::zero(n));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            if (bundle.fiber_parity(a) != bundle.fiber_parity(b)) continue;
            DifferentialForm w(n);
            for (int l = 0; l < n; ++l) w.add_term(std::uint32_t{1} << l, rpoly(n, deg, rng));
            A.at(a, b) = std::move(w);
        }
    return GradedConnection(bundle, std::move(A));
}

// ---------------------------------------------------------------------------

CheckResult grassmann_associativity(const CheckContext& ctx) {
    Rng rng(ctx.seed);
    double res = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
        const int k = 2 + static_cast<int>(rng() % 3);
        const auto a = relement(k, rng), b = relement(k, rng), c = relement(k, rng);
        res = std::max(res, ((a * b) * c - a * (b * c)).max_abs());
    }
    return make("grassmann-associativity", res, 1e-12);
}

CheckResult grassmann_graded_commutativity(const CheckContext& ctx) {
    Rng rng(ctx.seed + 1);
    double res = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
        const int k = 2 + static_cast<int>(rng() % 3);
        const auto a = relement(k, rng), b = relement(k, rng);
        for (const auto& [pa, xa] : {std::pair{1.0, a.even_part()}, std::pair{-1.0, a.odd_part()}})
            for (const auto& [pb, xb] : {std::pair{1.0, b.even_part()}, std::pair{-1.0, b.odd_part()}}) {
                const double sign = (pa < 0 && pb < 0) ? -1.0 : 1.0;
                res = std::max(res, (xa * xb - sign * (xb * xa)).max_abs());
            }
    }
    return make("grassmann-graded-commutativity", res, 1e-12);
}

CheckResult grassmann_nilpotency(const CheckContext& ctx) {
    Rng rng(ctx.seed + 2);
    double res = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
        const int k = 2 + static_cast<int>(rng() % 3);
        const GrassmannElement soul = relement(k, rng).soul();
        res = std::max(res, soul.pow(k + 1).max_abs());
    }
    return make("grassmann-nilpotency", res, 0.0);
}

CheckResult super_eval_ring_hom(const CheckContext& ctx) {
    Rng rng(ctx.seed + 3);
    double res = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
        const int n = rdim(rng);
        const ScalarField f = rpoly(n, 2, rng), g = rpoly(n, 2, rng);
        GrassmannVector x;
        for (int j = 0; j < n; ++j) x.push_back(relement(4, rng).even_part());
        res = std::max(res, ((f * g).eval_grassmann(x) -
                             f.eval_grassmann(x) * g.eval_grassmann(x))
                                .max_abs());
    }
    return make("super-eval-ring-homomorphism", res, 1e-12);
}

CheckResult super_eval_chain_rule(const CheckContext& ctx) {
    Rng rng(ctx.seed + 4);
    double res = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
        const int n = rdim(rng);
        const Polynomial g = random_polynomial(n, 2, rng);
        const Polynomial f1 = random_polynomial(1, 3, rng);
        // Compose f1(g) symbolically.
        Polynomial comp(n);
        for (const auto& [e, c] : f1.terms()) {
            Polynomial t = Polynomial::constant(n, c);
            for (int m = 0; m < e[0]; ++m) t = t * g;
            comp += t;
        }
        GrassmannVector x;
        for (int j = 0; j < n; ++j) x.push_back(relement(4, rng).even_part());
        const GrassmannElement inner = g.eval_grassmann(x);
        res = std::max(res, (comp.eval_grassmann(x) - f1.eval_grassmann({inner})).max_abs());
    }
    return make("super-eval-chain-rule", res, 1e-12);
}

CheckResult d_squared_zero(const CheckContext& ctx) {
    Rng rng(ctx.seed + 5);
    double res = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
        const int n = rdim(rng);
        res = std::max(res, exterior_d(exterior_d(rform(n, 2, rng))).max_coeff_abs());
    }
    return make("d-squared-zero", res, 1e-12);
}

CheckResult cartan_formula(const CheckContext& ctx) {
    Rng rng(ctx.seed + 6);
    double res = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
        const int n = rdim(rng);
        const VectorField X = rfield(n, 2, rng);
        const DifferentialForm w = rform(n, 2, rng);
        const DifferentialForm lhs = lie_derivative(X, w);
        const DifferentialForm rhs = exterior_d(contract(X, w)) + contract(X, exterior_d(w));
        res = std::max(res, max_coeff_distance(lhs, rhs));
    }
    return make("cartan-formula", res, 1e-12);
}

CheckResult iota_anticommutation(const CheckContext& ctx) {
    Rng rng(ctx.seed + 7);
    double res = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
        const int n = rdim(rng);
        const VectorField X = rfield(n, 2, rng), Y = rfield(n, 2, rng);
        const DifferentialForm w = rform(n, 2, rng);
        res = std::max(res,
                       (contract(X, contract(Y, w)) + contract(Y, contract(X, w))).max_coeff_abs());
    }
    return make("iota-anticommutation", res, 1e-12);
}

CheckResult lie_iota_bracket(const CheckContext& ctx) {
    Rng rng(ctx.seed + 8);
    double res = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
        const int n = rdim(rng);
        const VectorField X = rfield(n, 2, rng), Y = rfield(n, 2, rng);
        const DifferentialForm w = rform(n, 2, rng);
        const DifferentialForm lhs =
            lie_derivative(X, contract(Y, w)) - contract(Y, lie_derivative(X, w));
        res = std::max(res, max_coeff_distance(lhs, contract(lie_bracket(X, Y), w)));
    }
    return make("lie-iota-bracket", res, 1e-12);
}

CheckResult lie_lie_bracket(const CheckContext& ctx) {
    Rng rng(ctx.seed + 9);
    double res = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
        const int n = rdim(rng);
        const VectorField X = rfield(n, 1, rng), Y = rfield(n, 1, rng);
        const DifferentialForm w = rform(n, 2, rng);
        const DifferentialForm lhs =
            lie_derivative(X, lie_derivative(Y, w)) - lie_derivative(Y, lie_derivative(X, w));
        res = std::max(res, max_coeff_distance(lhs, lie_derivative(lie_bracket(X, Y), w)));
    }
    return make("lie-lie-bracket", res, 1e-12);
}

CheckResult iota_function_linearity(const CheckContext& ctx) {
    Rng rng(ctx.seed + 10);
    double res = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
        const int n = rdim(rng);
        const ScalarField f = rpoly(n, 2, rng);
        const VectorField X = rfield(n, 2, rng);
        const DifferentialForm w = rform(n, 2, rng);
        res = std::max(res, max_coeff_distance(contract(f * X, w), f * contract(X, w)));
    }
    return make("iota-function-linearity", res, 1e-12);
}

CheckResult lie_function_multiplier(const CheckContext& ctx) {
    Rng rng(ctx.seed + 11);
    double res = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
        const int n = rdim(rng);
        const ScalarField f = rpoly(n, 2, rng);
        const VectorField X = rfield(n, 2, rng);
        const DifferentialForm w = rform(n, 2, rng);
        const DifferentialForm lhs = lie_derivative(f * X, w);
        const DifferentialForm rhs =
            f * lie_derivative(X, w) +
            wedge(exterior_d(DifferentialForm::from_scalar(f)), contract(X, w));
        res = std::max(res, max_coeff_distance(lhs, rhs));
    }
    return make("lie-function-multiplier", res, 1e-12);
}

CheckResult derivation_normal_form_roundtrip(const CheckContext& ctx) {
    Rng rng(ctx.seed + 12);
    double res = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
        const int n = rdim(rng);
        // Random even derivation: even a, odd b.
        std::vector<DifferentialForm> a, b;
        for (int l = 0; l < n; ++l) {
            DifferentialForm ea(n);
            ea.add_term(0, rpoly(n, 2, rng));
            a.push_back(ea);
            DifferentialForm ob(n);
            ob.add_term(1, rpoly(n, 2, rng));
            b.push_back(ob);
        }
        const PiTDerivation V(Parity::Even, a, b);
        RawDerivation raw;
        raw.parity = Parity::Even;
        for (int l = 0; l < n; ++l) {
            raw.images_x.push_back(V.apply(DifferentialForm::from_scalar(ScalarField::coordinate(n, l))));
            raw.images_dx.push_back(V.apply(DifferentialForm::dx(n, l)));
        }
        raw.action = [&V](const DifferentialForm& w) { return V.apply(w); };
        const PiTDerivation W = decompose_derivation(raw);
        for (int l = 0; l < n; ++l) {
            res = std::max(res, max_coeff_distance(V.lie_coeff(l), W.lie_coeff(l)));
            res = std::max(res, max_coeff_distance(V.contract_coeff(l), W.contract_coeff(l)));
        }
    }
    return make("derivation-normal-form-roundtrip", res, 1e-12);
}

CheckResult graded_jacobi(const CheckContext& ctx) {
    Rng rng(ctx.seed + 13);
    double res = 0.0;
    for (int i = 0; i < ctx.instances / 4 + 1; ++i) {
        const int n = 2;
        const PiTDerivation U = PiTDerivation::iota(rfield(n, 1, rng));
        const PiTDerivation V = PiTDerivation::lie(rfield(n, 1, rng));
        const PiTDerivation W = PiTDerivation::exterior(n);
        // [U,[V,W]] = [[U,V],W] + (-1)^{|U||V|}[V,[U,W]] with |U| odd, |V| even.
        const PiTDerivation lhs = graded_bracket(U, graded_bracket(V, W));
        const PiTDerivation rhs =
            graded_bracket(graded_bracket(U, V), W) + graded_bracket(V, graded_bracket(U, W));
        res = std::max(res, (lhs + (-1.0) * rhs).max_coeff_abs());
    }
    return make("graded-jacobi", res, 1e-12);
}

// ---------------------------------------------------------------------------
// Flows
// ---------------------------------------------------------------------------

VectorField rotation_field() {
    // (-y, x) on R^2
    Polynomial mx(2), my(2);
    mx.add_term({0, 1}, -1.0);
    my.add_term({1, 0}, 1.0);
    return VectorField(2, {ScalarField(mx), ScalarField(my)});
}

VectorField translation_field() {
    return VectorField(2, {ScalarField::constant(2, 1.0), ScalarField::constant(2, 0.0)});
}

CheckResult trotter_derivative(const CheckContext&) {
    // Finite-difference d/dt at 0 of the n-fold composite equals (X+Y)(x).
    const VectorField X = rotation_field(), Y = translation_field();
    const std::vector<double> x0 = {0.7, -0.3};
    const auto sum = (X + Y).eval(x0);
    double res = 0.0;
    const double h = 1e-5;
    for (long n : {1L, 2L, 4L}) {
        const auto fp = trotter_flow(X, Y, h, x0, n);
        const auto fm = trotter_flow(X, Y, -h, x0, n);
        for (int i = 0; i < 2; ++i)
            res = std::max(res, std::abs((fp[i] - fm[i]) / (2 * h) - sum[i]));
    }
    return make("trotter-derivative", res, 1e-6);
}

CheckResult trotter_convergence_check(const CheckContext&) {
    const TrotterStudy study =
        trotter_convergence(rotation_field(), translation_field(), 1.0, {1.0, 0.0}, 10);
    const double err_last = study.rows.back().error;
    const bool ok = study.fitted_order >= 0.9 && err_last < 5e-3;
    CheckResult r{"trotter-convergence", err_last, 5e-3, ok};
    return r;
}

CheckResult trotter_group_law(const CheckContext&) {
    // Group law of the limit flow on rational probes.
    const VectorField Z = rotation_field() + translation_field();
    IntegratorOptions opts;
    double res = 0.0;
    for (const auto& [t, s] : {std::pair{0.5, 0.25}, std::pair{1.0, 0.5}, std::pair{0.75, -0.5}}) {
        const auto a = even_flow(Z, t, even_flow(Z, s, {1.0, 0.0}, opts), opts);
        const auto b = even_flow(Z, t + s, {1.0, 0.0}, opts);
        for (int i = 0; i < 2; ++i) res = std::max(res, std::abs(a[i] - b[i]));
    }
    return make("trotter-group-law", res, 10 * IntegratorOptions{}.tol);
}

CheckResult odd_flow_homomorphism(const CheckContext& ctx) {
    Rng rng(ctx.seed + 14);
    double res = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
        const int n = rdim(rng);
        const VectorField X = rfield(n, 2, rng);
        const OddFlowAction act = odd_flow(X);
        const DifferentialForm w = rform(n, 2, rng), e = rform(n, 2, rng);
        const SuperForm lhs = act.apply(wedge(w, e), 0);
        const SuperForm rhs = act.apply(w, 0) * act.apply(e, 0);
        res = std::max(res, max_coeff_distance(lhs, rhs));
    }
    return make("odd-flow-homomorphism", res, 1e-12);
}

CheckResult odd_flow_composition(const CheckContext& ctx) {
    Rng rng(ctx.seed + 15);
    double res = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
        const int n = rdim(rng);
        const VectorField X = rfield(n, 2, rng), Y = rfield(n, 2, rng);
        const DifferentialForm w = rform(n, 2, rng);
        const SuperForm composite = odd_flow_composite_via_diagonal(X, Y, w, 0, 1, 2, 3);
        SuperForm direct = compose_odd_flows(odd_flow(X), odd_flow(Y)).apply(w, 2);
        res = std::max(res, max_coeff_distance(composite, direct));
    }
    return make("odd-flow-composition", res, 1e-12);
}

CheckResult reparam_even_flow_check(const CheckContext&) {
    // f(x) = 1 + x^2, X = d/dx: flow of fX from 0 is tan(t).
    Polynomial fp(1);
    fp.add_term({0}, 1.0);
    fp.add_term({2}, 1.0);
    const ScalarField f(fp);
    const VectorField X(1, {ScalarField::constant(1, 1.0)});
    IntegratorOptions opts;
    opts.tol = 1e-9;
    double res = 0.0;
    const std::vector<double> origin = {0.0};
    for (double t : {0.3, 0.7, 1.0}) {
        const double via_reparam = reparam_flow_even(f, X, t, origin, opts)[0];
        res = std::max(res, std::abs(via_reparam - std::tan(t)));
        const double via_direct = even_flow(f * X, t, origin, opts)[0];
        res = std::max(res, std::abs(via_reparam - via_direct));
    }
    return make("reparam-even-flow", res, 1e-6);
}

CheckResult trajectory_equivalence(const CheckContext&) {
    // Y = (1 + x^2) X shares directed trajectories with X = d/dx; a rotated
    // field does not.
    Polynomial fp(1);
    fp.add_term({0}, 1.0);
    fp.add_term({2}, 1.0);
    const VectorField X(1, {ScalarField::constant(1, 1.0)});
    const VectorField Y = ScalarField(fp) * X;
    IntegratorOptions opts;
    opts.tol = 1e-9;
    const auto same = trajectory_equivalence_check(X, Y, {0.0}, {0.3, 0.8}, ScalarField(fp), opts);

    Polynomial mx(2), my(2);
    mx.add_term({0, 1}, -1.0);
    my.add_term({1, 0}, 1.0);
    const VectorField rot(2, {ScalarField(mx), ScalarField(my)});
    const VectorField trans(2, {ScalarField::constant(2, 1.0), ScalarField::constant(2, 0.0)});
    const auto differ = trajectory_equivalence_check(trans, rot, {1.0, 1.0}, {0.5});

    const bool ok = same.same_trajectories && same.trajectory_residual <= 1e-6 &&
                    !differ.same_trajectories && differ.counterexample.has_value();
    return CheckResult{"trajectory-equivalence", same.trajectory_residual, 1e-6, ok};
}

CheckResult flow_f_iota_group_law(const CheckContext&) {
    // R^2, f = dy, X = d/dx: iota_X f = 0.
    const FIotaFlow flow(DifferentialForm::dx(2, 1), VectorField::coordinate(2, 0),
                         FIotaFlow::Mode::Xf0);
    DifferentialForm w(2);
    Polynomial c(2);
    c.add_term({1, 1}, 1.0);
    w.add_term(1, ScalarField(c));
    w.add_term(3, ScalarField::constant(2, 2.0));
    double res = 0.0;
    for (const auto& [t, s] : {std::pair{0.4, 0.7}, std::pair{-0.5, 1.2}}) {
        res = std::max(res, max_coeff_distance(flow.apply(t, flow.apply(s, w)), flow.apply(t + s, w)));
    }
    return make("flow-f-iota-group-law", res, 1e-12);
}

CheckResult flow_f_iota_cocycle(const CheckContext&) {
    // R, f = dx, X = d/dx: iota_X f = 1.
    const FIotaFlow flow(DifferentialForm::dx(1, 0), VectorField::coordinate(1, 0),
                         FIotaFlow::Mode::Xf1);
    DifferentialForm w(1);
    Polynomial c(1);
    c.add_term({2}, 1.0);
    w.add_term(1, ScalarField(c));
    double res = 0.0;
    for (const auto& [t, s] : {std::pair{0.4, 0.7}, std::pair{-0.5, 0.9}})
        res = std::max(res, max_coeff_distance(flow.apply(t, flow.apply(s, w)), flow.apply(t + s, w)));
    return make("flow-f-iota-cocycle", res, 1e-12);
}

CheckResult super_flow_theta_derivative(const CheckContext& ctx) {
    Rng rng(ctx.seed + 16);
    double res = 0.0;
    for (int i = 0; i < 8; ++i) {
        const int n = 1 + static_cast<int>(rng() % 2);
        const SuperFlow flow(PiTDerivation::exterior(n));
        const DifferentialForm w = rform(n, 2, rng);
        const SuperForm v = flow.apply(0.0, 0, w);
        res = std::max(res, max_coeff_distance(v.part(1), flow.generator().apply(w)));
        res = std::max(res, max_coeff_distance(v.part(0), w));
    }
    return make("super-flow-theta-derivative", res, 1e-12);
}

CheckResult super_flow_t_derivative(const CheckContext&) {
    // X = d + iota_{d/dx} on R has X^2 = L_{d/dx}; FD of the even part at 0.
    const int n = 1;
    const PiTDerivation X = PiTDerivation::exterior(n) + PiTDerivation::iota(VectorField::coordinate(n, 0));
    const SuperFlow flow(X);
    Polynomial xp(1);
    xp.add_term({1}, 1.0);
    DifferentialForm w(1);
    w.add_term(1, ScalarField(xp));  // x dx
    const double h = 1e-4;
    const DifferentialForm fd =
        (flow.exp_minus_t_square(h, w) - flow.exp_minus_t_square(-h, w)) * (1.0 / (2 * h));
    const DifferentialForm want = flow.square().apply(w) * (-1.0);
    double res = 0.0;
    for (double x : {-0.4, 0.1, 0.8}) {
        GrassmannVector gx = {GrassmannElement::scalar(1, x)};
        GrassmannVector xi = {GrassmannElement::generator(1, 0)};
        res = std::max(res, (fd.eval_grassmann(gx, xi) - want.eval_grassmann(gx, xi)).max_abs());
    }
    return make("super-flow-t-derivative", res, 1e-6);
}

CheckResult pullback_flow_lie_derivative(const CheckContext& ctx) {
    Rng rng(ctx.seed + 17);
    const int n = 2;
    const VectorField Z = rfield(n, 1, rng);
    const DifferentialForm w = rform(n, 2, rng);
    const DifferentialForm want = lie_derivative(Z, w);
    const double h = 1e-4;
    const DifferentialForm fd =
        (pullback_along_even_flow(Z, h, w) - pullback_along_even_flow(Z, -h, w)) * (1.0 / (2 * h));
    double res = 0.0;
    for (double x : {-0.3, 0.4}) {
        GrassmannVector gx = {GrassmannElement::scalar(n, x), GrassmannElement::scalar(n, 0.2)};
        GrassmannVector xi = {GrassmannElement::generator(n, 0), GrassmannElement::generator(n, 1)};
        res = std::max(res, (fd.eval_grassmann(gx, xi) - want.eval_grassmann(gx, xi)).max_abs());
    }
    return make("pullback-flow-lie-derivative", res, 1e-6);
}

CheckResult odd_reparam_lemma(const CheckContext&) {
    // Constant f = c, X = d: phi = (c^2 t, c theta) passes; (t, c theta) fails.
    const double c = 1.5;
    const SuperFlow flow(PiTDerivation::exterior(2));
    Polynomial b_ok(1), tau(1), b_bad(1);
    b_ok.add_term({1}, c * c);
    b_bad.add_term({1}, 1.0);
    tau.add_term({0}, c);
    DifferentialForm w(2);
    Polynomial xy(2);
    xy.add_term({1, 1}, 1.0);
    w.add_term(0, ScalarField(xy));
    w.add_term(1, ScalarField::coordinate(2, 1));
    const std::vector<double> times = {0.0, 0.5, 1.0};
    const std::vector<std::vector<double>> pts = {{0.3, -0.2}, {1.0, 0.5}};
    const auto ok = verify_odd_reparam_lemma(c, flow, b_ok, tau, w, times, pts);
    const auto bad = verify_odd_reparam_lemma(c, flow, b_bad, tau, w, times, pts);
    const double good_res = std::max(ok.distribution_residual, ok.flow_equation_residual);
    const bool negative_detected = bad.distribution_residual > 1e-3;
    return CheckResult{"odd-reparam-lemma", good_res, 1e-10, good_res <= 1e-10 && negative_detected};
}

// ---------------------------------------------------------------------------
// Bundles
// ---------------------------------------------------------------------------

CheckResult connection_leibniz(const CheckContext& ctx) {
    Rng rng(ctx.seed + 18);
    double res = 0.0;
    for (int i = 0; i < ctx.instances / 4 + 1; ++i) {
        const int n = rdim(rng);
        const GradedConnection conn = random_even_connection(n, 1, 1, 2, rng);
        const VectorField X = rfield(n, 1, rng);
        const ScalarField f = rpoly(n, 2, rng);
        SectionM s = {rpoly(n, 2, rng), rpoly(n, 2, rng)};
        SectionM fs = {f * s[0], f * s[1]};
        const SectionM lhs = covariant_derivative_M(conn, X, fs);
        const SectionM base = covariant_derivative_M(conn, X, s);
        ScalarField xf = ScalarField::constant(n, 0.0);
        for (int j = 0; j < n; ++j) xf = xf + X.component(j) * f.partial(j);
        for (int a = 0; a < 2; ++a) {
            const ScalarField rhs = xf * s[a] + f * base[a];
            res = std::max(res, (lhs[a] - rhs).poly().max_abs_coeff());
        }
    }
    return make("connection-leibniz", res, 1e-12);
}

CheckResult odd_triviality(const CheckContext& ctx) {
    Rng rng(ctx.seed + 19);
    double res = 0.0;
    bool all = true;
    for (int i = 0; i < 4; ++i) {
        const int n = 1 + static_cast<int>(rng() % 2);
        const GradedConnection conn = random_even_connection(n, 1, 1, 2, rng);
        const auto report = is_odd_trivial(PiTConnection::pullback(conn), rng, 8);
        all = all && report.odd_trivial;
        res = std::max(res, report.max_residual);
    }
    return CheckResult{"odd-triviality", res, 1e-9, all};
}

CheckResult odd_triviality_violations(const CheckContext& ctx) {
    Rng rng(ctx.seed + 20);
    const int n = 2;
    const GradedConnection conn = random_even_connection(n, 1, 1, 1, rng);
    // Perturb with a nonzero iota-coefficient: pairs with iota_{d/dx0}.
    PiTConnection bad = PiTConnection::pullback(conn);
    std::vector<FormMatrix> gl, gi;
    for (int l = 0; l < n; ++l) {
        gl.push_back(bad.gamma_lie(l));
        gi.push_back(bad.gamma_iota(l));
    }
    gi[0].at(0, 0) = DifferentialForm::constant(n, 1.0);
    const auto rep1 = is_odd_trivial(PiTConnection(conn.bundle(), gl, gi), rng, 4);
    // Perturb the L-coefficient with a 2-form: no longer pulled back.
    std::vector<FormMatrix> gl2 = gl, gi2;
    for (int l = 0; l < n; ++l) gi2.push_back(FormMatrix(2, 2, DifferentialForm::zero(n)));
    DifferentialForm two(n);
    two.add_term(3, ScalarField::constant(n, 1.0));
    gl2[1].at(1, 0) += two;
    const auto rep2 = is_odd_trivial(PiTConnection(conn.bundle(), gl2, gi2), rng, 4);
    const bool ok = !rep1.odd_trivial && !rep1.witness.empty() && !rep2.odd_trivial &&
                    !rep2.witness.empty();
    return CheckResult{"odd-triviality-violations", ok ? 0.0 : 1.0, 0.5, ok};
}

CheckResult odd_flatness(const CheckContext& ctx) {
    Rng rng(ctx.seed + 21);
    double res = 0.0;
    for (int i = 0; i < 4; ++i) {
        const int n = 2;
        const GradedConnection conn = random_even_connection(n, 1, 1, 2, rng);
        const PiTConnection pb = PiTConnection::pullback(conn);
        PiTSection s = {rform(n, 1, rng), rform(n, 1, rng)};
        const PiTDerivation X = PiTDerivation::iota(rfield(n, 2, rng));
        const PiTDerivation Y = PiTDerivation::iota(rfield(n, 2, rng));
        res = std::max(res, max_coeff_abs(odd_curvature(pb, X, Y, s)));
        // Even-coefficient combinations of iota-type fields stay flat.
        DifferentialForm ev(n);
        ev.add_term(0, rpoly(n, 1, rng));
        ev.add_term(3, rpoly(n, 1, rng));
        const PiTDerivation Xc = ev * X;
        res = std::max(res, max_coeff_abs(odd_curvature(pb, Xc, Y, s)));
    }
    return make("odd-flatness", res, 1e-12);
}

CheckResult d_pairing(const CheckContext& ctx) {
    Rng rng(ctx.seed + 22);
    double res = 0.0;
    for (int i = 0; i < 4; ++i) {
        const int n = rdim(rng);
        const GradedConnection conn = random_even_connection(n, 1, 1, 2, rng);
        const PiTConnection pb = PiTConnection::pullback(conn);
        SectionM s = {rpoly(n, 2, rng), rpoly(n, 2, rng)};
        const PiTSection lhs = pullback_pairing(pb, s, PiTDerivation::exterior(n));
        // nabla s = ds + A s, components are 1-forms.
        for (int a = 0; a < 2; ++a) {
            DifferentialForm want = exterior_d(DifferentialForm::from_scalar(s[a]));
            for (int b = 0; b < 2; ++b) want += s[b] * conn.A().at(a, b);
            res = std::max(res, max_coeff_distance(lhs[a], want));
        }
    }
    return make("d-pairing-covariant-differential", res, 1e-12);
}

CheckResult bijection_roundtrip(const CheckContext& ctx) {
    Rng rng(ctx.seed + 23);
    double res = 0.0;
    for (int i = 0; i < 4; ++i) {
        const int n = rdim(rng);
        const GradedConnection conn = random_even_connection(n, 1, 1, 2, rng);
        const GradedConnection back = restrict_connection(PiTConnection::pullback(conn), rng);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                res = std::max(res, max_coeff_distance(back.A().at(a, b), conn.A().at(a, b)));
    }
    return make("bijection-roundtrip", res, 1e-12);
}

CheckResult bijection_evenness(const CheckContext& ctx) {
    Rng rng(ctx.seed + 24);
    bool ok = true;
    for (int i = 0; i < 4; ++i) {
        const int n = 2;
        const GradedConnection conn = random_even_connection(n, 2, 1, 2, rng);
        ok = ok && conn.is_even() &&
             restrict_connection(PiTConnection::pullback(conn), rng).is_even();
    }
    return CheckResult{"bijection-evenness", ok ? 0.0 : 1.0, 0.5, ok};
}

// ---------------------------------------------------------------------------
// Transport
// ---------------------------------------------------------------------------

GradedConnection diag_connection(double a, double b) {
    const GradedBundle bundle{1, 1, 1};
    FormMatrix A(2, 2, DifferentialForm::zero(1));
    A.at(0, 0) = DifferentialForm::dx(1, 0) * a;
    A.at(1, 1) = DifferentialForm::dx(1, 0) * b;
    return GradedConnection(bundle, A);
}

SuperPathM line_path(int context, double t0, double t1) {
    return path_from_real_polynomials(1, context, 0, {{0.0, 1.0}}, t0, t1);
}

CheckResult transport_closed_form(const CheckContext&) {
    const double a = 0.7, b = -0.4;
    const ConnectionMTransport T(diag_connection(a, b));
    const int k = 2;  // theta and one S-generator
    SuperPathM c = line_path(k, 0.0, 1.0);
    const GrassmannVector v0 = {GrassmannElement::scalar(k, 1.0), GrassmannElement::scalar(k, 1.0)};
    double res = 0.0;
    for (double t : {0.5, 1.0}) {
        const TransportValue v = T.transport(c, v0).at(t);
        res = std::max(res, std::abs(v.s1[0].body() - std::exp(-a * t)));
        res = std::max(res, std::abs(v.s1[1].body() - std::exp(-b * t)));
        res = std::max(res, max_abs(v.s2));
    }
    // Superpath c(t, theta) = t + theta eta: s2 = -A eta s1 exactly.
    c.odd_coords.push_back([k](double) { return GrassmannElement::generator(k, 1); });
    const ParallelSection p = T.transport(c, v0);
    for (double t : {0.5, 1.0}) {
        const TransportValue v = p.at(t);
        const double e0 = std::exp(-a * t), e1 = std::exp(-b * t);
        res = std::max(res, std::abs(v.s1[0].body() - e0));
        res = std::max(res, std::abs(v.s1[1].body() - e1));
        GrassmannVector want = {GrassmannElement::generator(k, 1) * (-a * e0),
                                GrassmannElement::generator(k, 1) * (-b * e1)};
        res = std::max(res, max_abs(v.s2 - want));
    }
    return make("superpath-transport-closed-form", res, 1e-8);
}

CheckResult transport_gluing(const CheckContext&) {
    const ConnectionMTransport T(diag_connection(0.7, -0.4));
    SuperPathM c = line_path(2, 0.0, 2.0);
    c.odd_coords.push_back([](double) { return GrassmannElement::generator(2, 1); });
    const GrassmannVector v0 = {GrassmannElement::scalar(2, 1.0), GrassmannElement::scalar(2, -0.5)};
    return make("transport-gluing", check_gluing(T, c, 1.0, v0), 1e-6);
}

CheckResult transport_constant_identity(const CheckContext&) {
    const ConnectionMTransport T(diag_connection(0.7, -0.4));
    const GrassmannVector pt = {GrassmannElement::scalar(2, 0.3)};
    const GrassmannVector v0 = {GrassmannElement::scalar(2, 1.0), GrassmannElement::scalar(2, 2.0)};
    return make("transport-constant-identity", check_constant_identity(T, pt, 2, 0, v0), 0.0);
}

CheckResult transport_q_naturality(const CheckContext&) {
    const GradedConnection conn = diag_connection(0.7, -0.4);
    const ConnectionMTransport T(conn);
    const SuperPathM c = line_path(2, 0.0, 1.0);
    const GrassmannVector v0 = {GrassmannElement::scalar(2, 1.0), GrassmannElement::scalar(2, 1.0)};
    return make("transport-q-naturality", check_q_naturality(conn, T, c, v0, {0.3, 1.0}), 1e-8);
}

CheckResult transport_s_naturality(const CheckContext&) {
    const ConnectionMTransport T(diag_connection(0.7, -0.4));
    const int k = 3;  // theta + two S-generators
    SuperPathM c = line_path(k, 0.0, 1.0);
    c.odd_coords.push_back([k](double) { return GrassmannElement::generator(k, 1); });
    // S' -> S: generator 1 -> generator 1 + generator 2, theta fixed.
    std::vector<GrassmannElement> images = {
        GrassmannElement::generator(k, 0),
        GrassmannElement::generator(k, 1) + GrassmannElement::generator(k, 2),
        GrassmannElement::generator(k, 2)};
    const GrassmannHom hom(k, images);
    const GrassmannVector v0 = {GrassmannElement::scalar(k, 1.0),
                                GrassmannElement::scalar(k, 1.0) + GrassmannElement::monomial(k, 0b110, 0.5)};
    return make("transport-s-naturality", check_s_naturality(T, c, hom, k, v0, {0.4, 1.0}), 1e-9);
}

CheckResult transport_reparam_invariance(const CheckContext&) {
    const ConnectionMTransport T(diag_connection(0.7, -0.4));
    SuperPathM c = line_path(2, 0.0, 1.0);
    c.odd_coords.push_back([](double) { return GrassmannElement::generator(2, 1); });
    // b(t) = t^3/3 + t on [0, 0.8], tau = sqrt(b') via tau^2 = t^2 + 1 checked
    // against the closed form only through the transport residual.
    Polynomial b(1), tau(1);
    b.add_term({3}, 1.0 / 3.0);
    b.add_term({1}, 1.0);
    // tau(t) = sqrt(1 + t^2) is not polynomial; use the path-only case tau = 1
    // with the odd part scaled inside reparametrize via tau.
    SuperPathM cpath = line_path(2, 0.0, 0.8);
    const GrassmannVector v0 = {GrassmannElement::scalar(2, 1.0), GrassmannElement::scalar(2, 1.0)};
    const double res_path =
        check_reparam_invariance(T, cpath, b, Polynomial::constant(1, 1.0), v0, {0.2, 0.5, 0.8});
    return make("transport-reparam-invariance", res_path, 1e-7);
}

CheckResult transport_endpoint_invertibility(const CheckContext&) {
    const ConnectionMTransport T(diag_connection(0.7, -0.4));
    SuperPathM c = line_path(2, 0.0, 1.0);
    c.odd_coords.push_back([](double) { return GrassmannElement::generator(2, 1); });
    const GrassmannMatrix E = endpoint_map(T, c, 1.0, 2);
    const GrassmannMatrix I = grassmann_inverse(E) * E;
    double res = max_abs(I - grassmann_identity(2, 2));
    const double cond = body_condition_number(E);
    const bool ok = res <= 1e-8 && cond < 1e6;
    return CheckResult{"transport-endpoint-invertibility", res, 1e-8, ok};
}

CheckResult odd_trivial_transport_identity(const CheckContext& ctx) {
    Rng rng(ctx.seed + 25);
    const int n = 2;
    const GradedConnection conn = random_even_connection(n, 1, 1, 2, rng);
    const ConnectionPiTMTransport T(PiTConnection::pullback(conn));
    const int k = 4;
    PiTMPoint P;
    P.x = {GrassmannElement::scalar(k, 0.4), GrassmannElement::scalar(k, -0.7)};
    P.xi = {GrassmannElement::generator(k, 1), GrassmannElement::generator(k, 2)};
    FlowGenerator g{FlowGeneratorKind::Iota, rfield(n, 2, rng), std::nullopt, std::nullopt};
    PiTSection init = {DifferentialForm::from_scalar(rpoly(n, 2, rng)),
                       DifferentialForm::from_scalar(rpoly(n, 2, rng))};
    const ParallelSection p = flow_transport(T, g, init, P, k, 0, 0.0, 1.0);
    GrassmannVector v0;
    for (const auto& w : init) v0.push_back(w.eval_grassmann(P.x, P.xi));
    double res = 0.0;
    for (double t : {0.0, 0.5, 1.0}) {
        const TransportValue v = p.at(t);
        res = std::max(res, max_abs(v.s1 - v0));
        res = std::max(res, max_abs(v.s2));
    }
    return make("odd-trivial-transport-identity", res, 0.0);
}

CheckResult lie_flow_transport_pullback(const CheckContext& ctx) {
    Rng rng(ctx.seed + 26);
    const int n = 2;
    const GradedConnection conn = random_even_connection(n, 1, 1, 1, rng);
    const ConnectionPiTMTransport T(PiTConnection::pullback(conn));
    const int k = 4;
    PiTMPoint P;
    P.x = {GrassmannElement::scalar(k, 0.3), GrassmannElement::scalar(k, 0.1)};
    P.xi = {GrassmannElement::generator(k, 1), GrassmannElement::generator(k, 2)};
    // Half-size field: keeps the trajectory growth mild across seeds.
    FlowGenerator g{FlowGeneratorKind::Lie, 0.5 * rfield(n, 1, rng), std::nullopt, std::nullopt};
    SectionM s = {rpoly(n, 1, rng), rpoly(n, 1, rng)};
    PiTSection init = {DifferentialForm::from_scalar(s[0]), DifferentialForm::from_scalar(s[1])};
    const ParallelSection p = flow_transport(T, g, init, P, k, 0, 0.0, 0.6);
    // The family is pulled back from M: no theta part, no xi dependence.
    double res = 0.0;
    for (double t : {0.3, 0.6}) {
        const TransportValue v = p.at(t);
        res = std::max(res, max_abs(v.s2));
        res = std::max(res, max_abs_on_generators(v.s1, 0b110));
    }
    return make("lie-flow-transport-pullback", res, 1e-10);
}

CheckResult d_squared_is_dt(const CheckContext& ctx) {
    Rng rng(ctx.seed + 27);
    double res = 0.0;
    for (int i = 0; i < 8; ++i) {
        SuperFunction11 g{random_polynomial(1, 4, rng), random_polynomial(1, 4, rng)};
        res = std::max(res, max_coeff_distance(apply_D(apply_D(g)), apply_dt(g)));
    }
    return make("d-squared-is-dt", res, 0.0);
}

CheckResult roundtrip_theorem(const CheckContext&) {
    RecoveryOptions opts;
    const RoundtripReport r = roundtrip_residual(diag_connection(0.7, -0.4), {{0.2}, {-0.5}}, opts);
    const bool ok = r.max_residual <= 1e-6 && r.recovered_even && r.gamma_iota_residual <= 1e-8;
    return CheckResult{"roundtrip-theorem", r.max_residual, 1e-6, ok};
}

CheckResult lift_project_roundtrip(const CheckContext& ctx) {
    Rng rng(ctx.seed + 28);
    const int n = 2;
    const GradedConnection conn = random_even_connection(n, 1, 1, 1, rng);
    const ConnectionMTransport T(conn);
    const LiftedPiTMTransport lifted(T);
    const ProjectedMTransport back(lifted);
    const int k = 3;
    SuperPathM c = path_from_real_polynomials(n, k, 0, {{0.1, 1.0}, {-0.2, 0.5, 0.25}}, 0.0, 1.0);
    c.odd_coords.push_back([k](double) { return GrassmannElement::generator(k, 1); });
    c.odd_coords.push_back([k](double t) { return GrassmannElement::generator(k, 2) * t; });
    const GrassmannVector v0 = {GrassmannElement::scalar(k, 1.0),
                                GrassmannElement::scalar(k, 0.5) + GrassmannElement::monomial(k, 0b110, 1.0)};
    double res = 0.0;
    for (double t : {0.3, 1.0}) {
        const TransportValue a = T.transport(c, v0).at(t);
        const TransportValue b = back.transport(c, v0).at(t);
        res = std::max(res, max_abs(a.s1 - b.s1));
        res = std::max(res, max_abs(a.s2 - b.s2));
    }
    // The lifted functor agrees with the pullback-connection transport on
    // superpaths upstairs with decomposable initial data.
    const ConnectionPiTMTransport TP(PiTConnection::pullback(conn));
    SuperPathPiTM cp = include_path(c);
    cp.xi[0] = constant_coord(GrassmannElement::generator(k, 1));
    const TransportValue u = lifted.transport(cp, v0).at(1.0);
    const TransportValue w = TP.transport(cp, v0).at(1.0);
    res = std::max(res, max_abs(u.s1 - w.s1));
    res = std::max(res, max_abs(u.s2 - w.s2));
    return make("lift-project-roundtrip", res, 1e-10);
}

}  // namespace

const std::vector<CheckDef>& check_catalog() {
    static const std::vector<CheckDef> catalog = {
        {"grassmann-associativity", "(ab)c = a(bc) in the exterior algebra", grassmann_associativity},
        {"grassmann-graded-commutativity", "ab = (-1)^{|a||b|} ba on homogeneous elements",
         grassmann_graded_commutativity},
        {"grassmann-nilpotency", "elements with zero body vanish at power k+1", grassmann_nilpotency},
        {"super-eval-ring-homomorphism", "evaluation at even super numbers preserves products",
         super_eval_ring_hom},
        {"super-eval-chain-rule", "evaluation commutes with polynomial composition",
         super_eval_chain_rule},
        {"d-squared-zero", "the exterior derivative squares to zero", d_squared_zero},
        {"cartan-formula", "L_X = d iota_X + iota_X d on random polynomial forms", cartan_formula},
        {"iota-anticommutation", "iota_X iota_Y + iota_Y iota_X = 0", iota_anticommutation},
        {"lie-iota-bracket", "[L_X, iota_Y] = iota_{[X,Y]}", lie_iota_bracket},
        {"lie-lie-bracket", "[L_X, L_Y] = L_{[X,Y]}", lie_lie_bracket},
        {"iota-function-linearity", "iota_{fX} = f iota_X", iota_function_linearity},
        {"lie-function-multiplier", "L_{fX} = f L_X + df ^ iota_X", lie_function_multiplier},
        {"derivation-normal-form-roundtrip",
         "decomposition into sum a_i L_i + b_i iota_i is the identity on normal forms",
         derivation_normal_form_roundtrip},
        {"graded-jacobi", "graded Jacobi identity for derivation brackets", graded_jacobi},
        {"trotter-derivative", "d/dt at 0 of the alternating composite is (X+Y)(x)",
         trotter_derivative},
        {"trotter-convergence",
         "alternating composites converge to the flow of X+Y with fitted order >= 0.9",
         trotter_convergence_check},
        {"trotter-group-law", "the limit flow satisfies gamma_t gamma_s = gamma_{t+s}",
         trotter_group_law},
        {"odd-flow-homomorphism", "w -> w + theta iota_X w preserves wedge products",
         odd_flow_homomorphism},
        {"odd-flow-composition",
         "composite of two odd flows through the diagonal equals the flow of the sum",
         odd_flow_composition},
        {"reparam-even-flow", "time-changed flow of X equals the flow of fX", reparam_even_flow_check},
        {"trajectory-equivalence",
         "fields share directed trajectories exactly when one is a positive multiple of the other",
         trajectory_equivalence},
        {"flow-f-iota-group-law", "w + t f iota_X w is a one-parameter group when iota_X f = 0",
         flow_f_iota_group_law},
        {"flow-f-iota-cocycle", "w + (e^t - 1) f iota_X w composes by the exponential cocycle",
         flow_f_iota_cocycle},
        {"super-flow-theta-derivative", "the theta-coefficient of the odd flow is the generator",
         super_flow_theta_derivative},
        {"super-flow-t-derivative", "the t-derivative of the odd flow at 0 is minus the square",
         super_flow_t_derivative},
        {"pullback-flow-lie-derivative", "d/dt at 0 of the flow pullback is the Lie derivative",
         pullback_flow_lie_derivative},
        {"odd-reparam-lemma",
         "beta(t, theta) = alpha(b(t), tau theta) solves the fX-flow equations iff tau^2 = b'",
         odd_reparam_lemma},
        {"connection-leibniz", "nabla(fs) = df tensor s + f nabla s", connection_leibniz},
        {"odd-triviality", "pullback connections satisfy both odd-triviality conditions",
         odd_triviality},
        {"odd-triviality-violations", "constructed violations are detected with witnesses",
         odd_triviality_violations},
        {"odd-flatness", "odd-trivial connections are flat in odd directions", odd_flatness},
        {"d-pairing-covariant-differential",
         "pairing the pullback connection with the exterior field returns the covariant "
         "differential",
         d_pairing},
        {"bijection-roundtrip", "pullback then restriction is the identity on connections",
         bijection_roundtrip},
        {"bijection-evenness", "evenness is preserved both ways across the correspondence",
         bijection_evenness},
        {"superpath-transport-closed-form",
         "D-parallel sections along t + theta eta match the hand-solved diagonal system",
         transport_closed_form},
        {"transport-gluing", "transport over glued intervals composes", transport_gluing},
        {"transport-constant-identity", "transport along constant superpaths is the identity",
         transport_constant_identity},
        {"transport-q-naturality",
         "sections along q-lifted paths are pullbacks of path-parallel sections",
         transport_q_naturality},
        {"transport-s-naturality", "superpoint maps commute with transport", transport_s_naturality},
        {"transport-reparam-invariance", "transport is invariant under reparametrization",
         transport_reparam_invariance},
        {"transport-endpoint-invertibility", "endpoint maps are invertible even maps",
         transport_endpoint_invertibility},
        {"odd-trivial-transport-identity",
         "transport along flows of iota_X is the identity on pulled-back sections",
         odd_trivial_transport_identity},
        {"lie-flow-transport-pullback",
         "transport along flows of L_X stays pulled back from the base flow",
         lie_flow_transport_pullback},
        {"d-squared-is-dt", "D^2 = d_t on superfunctions of (t, theta)", d_squared_is_dt},
        {"roundtrip-theorem",
         "connection -> transport -> recovered connection is the identity at probe points",
         roundtrip_theorem},
        {"lift-project-roundtrip",
         "lifting transport to the odd tangent bundle and projecting back is the identity",
         lift_project_roundtrip},
    };
    return catalog;
}

std::vector<CheckResult> run_all_checks(const CheckContext& ctx) {
    std::vector<CheckResult> results;
    results.reserve(check_catalog().size());
    for (const auto& def : check_catalog()) results.push_back(def.run(ctx));
    return results;
}

CheckResult run_check(const std::string& name, const CheckContext& ctx) {
    for (const auto& def : check_catalog())
        if (def.name == name) return def.run(ctx);
    throw schema_error("unknown check name: " + name);
}

}  // namespace supt
