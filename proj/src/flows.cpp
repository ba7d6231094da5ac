#include "supt/flows.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace supt {

namespace {

std::vector<double> state_add(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}
GrassmannVector state_add(const GrassmannVector& a, const GrassmannVector& b) { return a + b; }

std::vector<double> state_scale(double s, const std::vector<double>& a) {
    std::vector<double> r = a;
    for (double& x : r) x *= s;
    return r;
}
GrassmannVector state_scale(double s, const GrassmannVector& a) { return s * a; }

double state_norm(const std::vector<double>& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}
double state_norm(const GrassmannVector& a) { return max_abs(a); }

}  // namespace

template <typename State>
State rk4_fixed(const std::function<State(double, const State&)>& f, double t0, double t1,
                const State& y0, long steps, double blowup) {
    const double h = (t1 - t0) / static_cast<double>(steps);
    State y = y0;
    for (long i = 0; i < steps; ++i) {
        const double t = t0 + i * h;
        if (state_norm(y) > blowup)
            throw divergence_error("flow blew up", t);
        const State k1 = f(t, y);
        const State k2 = f(t + h / 2, state_add(y, state_scale(h / 2, k1)));
        const State k3 = f(t + h / 2, state_add(y, state_scale(h / 2, k2)));
        const State k4 = f(t + h, state_add(y, state_scale(h, k3)));
        State incr = state_add(k1, state_scale(2.0, k2));
        incr = state_add(incr, state_scale(2.0, k3));
        incr = state_add(incr, k4);
        y = state_add(y, state_scale(h / 6.0, incr));
    }
    if (state_norm(y) > blowup) throw divergence_error("flow blew up", t1);
    return y;
}

template <typename State>
State rk4_integrate(const std::function<State(double, const State&)>& f, double t0, double t1,
                    const State& y0, const IntegratorOptions& opts) {
    if (t0 == t1) return y0;
    const double target = opts.tol * (1.0 + std::abs(t1 - t0));
    long steps = opts.initial_steps;
    State prev = rk4_fixed(f, t0, t1, y0, steps, opts.blowup);
    while (true) {
        steps *= 2;
        if (steps > opts.max_steps)
            throw divergence_error("step-size underflow before reaching tolerance", t1);
        State cur = rk4_fixed(f, t0, t1, y0, steps, opts.blowup);
        if (state_norm(state_add(cur, state_scale(-1.0, prev))) <= target) return cur;
        prev = std::move(cur);
    }
}

template std::vector<double> rk4_fixed<std::vector<double>>(
    const std::function<std::vector<double>(double, const std::vector<double>&)>&, double, double,
    const std::vector<double>&, long, double);
template GrassmannVector rk4_fixed<GrassmannVector>(
    const std::function<GrassmannVector(double, const GrassmannVector&)>&, double, double,
    const GrassmannVector&, long, double);
template std::vector<double> rk4_integrate<std::vector<double>>(
    const std::function<std::vector<double>(double, const std::vector<double>&)>&, double, double,
    const std::vector<double>&, const IntegratorOptions&);
template GrassmannVector rk4_integrate<GrassmannVector>(
    const std::function<GrassmannVector(double, const GrassmannVector&)>&, double, double,
    const GrassmannVector&, const IntegratorOptions&);

std::vector<double> even_flow(const VectorField& X, double t, const std::vector<double>& x0,
                              const IntegratorOptions& opts) {
    std::function<std::vector<double>(double, const std::vector<double>&)> rhs =
        [&X](double, const std::vector<double>& y) { return X.eval(y); };
    return rk4_integrate(rhs, 0.0, t, x0, opts);
}

GrassmannVector even_flow(const VectorField& X, double t, const GrassmannVector& x0,
                          const IntegratorOptions& opts) {
    std::function<GrassmannVector(double, const GrassmannVector&)> rhs =
        [&X](double, const GrassmannVector& y) { return X.eval_grassmann(y); };
    return rk4_integrate(rhs, 0.0, t, x0, opts);
}

std::vector<double> trotter_flow(const VectorField& X, const VectorField& Y, double t,
                                 const std::vector<double>& x0, long n,
                                 const IntegratorOptions& opts) {
    if (n < 1) throw algebra_error("trotter composition count must be positive");
    IntegratorOptions sub = opts;
    sub.tol = std::max(opts.tol / static_cast<double>(n), 1e-13);
    sub.initial_steps = 4;
    const double tau = t / static_cast<double>(n);
    std::vector<double> y = x0;
    for (long i = 0; i < n; ++i) y = even_flow(X, tau, even_flow(Y, tau, y, sub), sub);
    return y;
}

TrotterStudy trotter_convergence(const VectorField& X, const VectorField& Y, double t,
                                 const std::vector<double>& x0, int max_exponent,
                                 const IntegratorOptions& opts) {
    IntegratorOptions ref_opts = opts;
    ref_opts.tol = 1e-12;
    const std::vector<double> ref = even_flow(X + Y, t, x0, ref_opts);

    TrotterStudy study;
    double prev_err = 0.0;
    for (int j = 0; j <= max_exponent; ++j) {
        const long n = 1L << j;
        const std::vector<double> y = trotter_flow(X, Y, t, x0, n, opts);
        double err = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) err = std::max(err, std::abs(y[i] - ref[i]));
        TrotterRow row{n, err, std::numeric_limits<double>::quiet_NaN()};
        if (j > 0 && err > 0.0 && prev_err > 0.0) row.observed_order = std::log2(prev_err / err);
        study.rows.push_back(row);
        prev_err = err;
    }
    // Least-squares slope of log(error) against log(n).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& row : study.rows) {
        if (!(row.error > 0.0)) continue;
        const double lx = std::log(static_cast<double>(row.n));
        const double ly = std::log(row.error);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    study.fitted_order =
        (m >= 2) ? -(m * sxy - sx * sy) / (m * sxx - sx * sx) : std::numeric_limits<double>::quiet_NaN();
    return study;
}

SuperForm OddFlowAction::apply(const DifferentialForm& w, int theta_gen) const {
    SuperForm r(w.dim(), {theta_gen});
    r.add_part(0, w);
    r.add_part(1, contract(X_, w));
    return r;
}

OddFlowAction odd_flow(const VectorField& X) { return OddFlowAction(X); }

OddFlowAction compose_odd_flows(const OddFlowAction& aX, const OddFlowAction& aY) {
    return OddFlowAction(aX.field() + aY.field());
}

SuperForm odd_flow_composite_via_diagonal(const VectorField& X, const VectorField& Y,
                                          const DifferentialForm& w, int gen_outer, int gen_inner,
                                          int gen_out, int ambient_k) {
    std::vector<int> gens = {gen_outer, gen_inner};
    std::sort(gens.begin(), gens.end());
    const int slot_outer = (gens[0] == gen_outer) ? 0 : 1;
    const int slot_inner = 1 - slot_outer;

    // beta* (the Y-flow) first: w -> w + theta_outer iota_Y w.
    SuperForm s(w.dim(), gens);
    s.add_part(0, w);
    s.add_part(std::uint32_t{1} << slot_outer, contract(Y, w));

    // alpha* on coefficients, tensored with the identity on theta_outer.
    SuperForm s2 = s;
    for (const auto& [mask, part] : s.parts()) {
        const std::uint32_t ibit = std::uint32_t{1} << slot_inner;
        if (mask & ibit) continue;
        const double sign = GrassmannElement::merge_sign(mask, ibit);
        s2.add_part(mask | ibit, contract(X, part) * sign);
    }

    // Diagonal: both thetas to gen_out.
    std::vector<GrassmannElement> images;
    for (int i = 0; i < ambient_k; ++i) {
        const int target = (i == gen_outer || i == gen_inner) ? gen_out : i;
        images.push_back(GrassmannElement::generator(ambient_k, target));
    }
    return s2.substitute_thetas(GrassmannHom(ambient_k, std::move(images)), {gen_out});
}

std::vector<double> reparam_flow_even(const ScalarField& f, const VectorField& X, double t,
                                      const std::vector<double>& x0,
                                      const IntegratorOptions& opts) {
    if (f.eval(x0) <= 0.0)
        throw error("reparametrization factor must be positive, got " + std::to_string(f.eval(x0)) +
                    " at the initial point");

    // Incremental trajectory cache: advance alpha(s, x0) from the last
    // evaluated parameter value.
    double s_cached = 0.0;
    std::vector<double> y_cached = x0;
    std::function<std::vector<double>(double, const std::vector<double>&)> flow_rhs =
        [&X](double, const std::vector<double>& y) { return X.eval(y); };
    auto at_parameter = [&](double s) {
        const double delta = s - s_cached;
        if (delta != 0.0) {
            const long steps = std::max<long>(1, static_cast<long>(std::ceil(std::abs(delta) * 256.0)));
            y_cached = rk4_fixed(flow_rhs, s_cached, s, y_cached, steps, opts.blowup);
            s_cached = s;
        }
        return y_cached;
    };

    std::function<std::vector<double>(double, const std::vector<double>&)> rhs =
        [&](double, const std::vector<double>& s) {
            const double v = f.eval(at_parameter(s[0]));
            if (v <= 0.0)
                throw error("reparametrization factor must be positive, got " + std::to_string(v) +
                            " along the trajectory");
            return std::vector<double>{v};
        };
    const double s_end = rk4_integrate(rhs, 0.0, t, std::vector<double>{0.0}, opts)[0];
    return even_flow(X, s_end, x0, opts);
}

TrajectoryReport trajectory_equivalence_check(const VectorField& X, const VectorField& Y,
                                              const std::vector<double>& x0,
                                              const std::vector<double>& sample_times,
                                              const std::optional<ScalarField>& f,
                                              const IntegratorOptions& opts) {
    TrajectoryReport report;
    std::vector<std::vector<double>> points = {x0};
    for (double t : sample_times) points.push_back(even_flow(X, t, x0, opts));

    for (const auto& p : points) {
        const auto vx = X.eval(p);
        const auto vy = Y.eval(p);
        double xx = 0, xy = 0;
        for (std::size_t i = 0; i < vx.size(); ++i) {
            xx += vx[i] * vx[i];
            xy += vx[i] * vy[i];
        }
        double ratio;
        if (f) {
            ratio = f->eval(p);
        } else if (xx > 1e-14) {
            ratio = xy / xx;
        } else {
            ratio = 0.0;
        }
        double res = 0.0;
        for (std::size_t i = 0; i < vx.size(); ++i)
            res = std::max(res, std::abs(vy[i] - ratio * vx[i]));
        report.parallel_residual = std::max(report.parallel_residual, res);
        if (res > 1e-8 || ratio <= 0.0) {
            report.counterexample = p;
            report.same_trajectories = false;
            return report;
        }
    }

    ScalarField fitted = f ? *f
                           : ScalarField::from_pointwise(
                                 X.dim(), 0,
                                 [X, Y](const std::vector<double>& p) {
                                     const auto vx = X.eval(p);
                                     const auto vy = Y.eval(p);
                                     double xx = 0, xy = 0;
                                     for (std::size_t i = 0; i < vx.size(); ++i) {
                                         xx += vx[i] * vx[i];
                                         xy += vx[i] * vy[i];
                                     }
                                     return xy / xx;
                                 },
                                 [](const std::vector<int>&, const std::vector<double>&) -> double {
                                     throw oracle_error("fitted ratio has no derivative oracle");
                                 });

    for (double t : sample_times) {
        const auto via_y = even_flow(Y, t, x0, opts);
        const auto via_reparam = reparam_flow_even(fitted, X, t, x0, opts);
        for (std::size_t i = 0; i < via_y.size(); ++i)
            report.trajectory_residual =
                std::max(report.trajectory_residual, std::abs(via_y[i] - via_reparam[i]));
    }
    report.same_trajectories = true;
    return report;
}

FIotaFlow::FIotaFlow(DifferentialForm f, VectorField X, Mode mode, double tol)
    : f_(std::move(f)), X_(std::move(X)), mode_(mode) {
    const DifferentialForm ixf = contract(X_, f_);
    const DifferentialForm want =
        (mode_ == Mode::Xf0) ? DifferentialForm::zero(f_.dim()) : DifferentialForm::constant(f_.dim(), 1.0);
    const double res = max_coeff_distance(ixf, want);
    if (res > tol)
        throw error(std::string("flow mode requires iota_X f = ") +
                    (mode_ == Mode::Xf0 ? "0" : "1") + ", but iota_X f = " + ixf.str());
}

DifferentialForm FIotaFlow::apply(double t, const DifferentialForm& w) const {
    const double factor = (mode_ == Mode::Xf0) ? t : std::expm1(t);
    return w + wedge(f_, contract(X_, w)) * factor;
}

namespace {

GrassmannElement grassmann_det(const std::vector<GrassmannElement>& entries, int n, int k) {
    if (n == 0) return GrassmannElement::scalar(k, 1.0);
    if (n == 1) return entries[0];
    GrassmannElement det(k);
    // Laplace expansion along the first row; entries are even, so order is free.
    for (int j = 0; j < n; ++j) {
        std::vector<GrassmannElement> minor;
        minor.reserve((n - 1) * (n - 1));
        for (int r = 1; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (c != j) minor.push_back(entries[r * n + c]);
        GrassmannElement term = entries[j] * grassmann_det(minor, n - 1, k);
        det += (j % 2 == 0) ? term : -term;
    }
    return det;
}

}  // namespace

DifferentialForm pullback_along_even_flow(const VectorField& Z, double t, const DifferentialForm& w,
                                          const IntegratorOptions& opts, int derivative_order) {
    const int n = Z.dim();
    if (w.dim() != n) throw algebra_error("pullback dimension mismatch");
    if (t == 0.0) return w;

    // Partials of Z for the Jacobian transport.
    auto dz = std::make_shared<std::vector<ScalarField>>();
    for (int i = 0; i < n; ++i)
        for (int m = 0; m < n; ++m) dz->push_back(Z.component(i).partial(m));

    // Shared trajectory + Jacobian evaluation at a Grassmann point.
    auto flow_state = [Z, dz, n, t, opts](const GrassmannVector& x) {
        const int k = x.empty() ? 0 : x[0].generators();
        GrassmannVector state = x;  // y then row-major J
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                state.push_back(GrassmannElement::scalar(k, i == j ? 1.0 : 0.0));
        std::function<GrassmannVector(double, const GrassmannVector&)> rhs =
            [Z, dz, n, k](double, const GrassmannVector& s) {
                GrassmannVector y(s.begin(), s.begin() + n);
                GrassmannVector out = Z.eval_grassmann(y);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        GrassmannElement v(k);
                        for (int m = 0; m < n; ++m)
                            v += (*dz)[i * n + m].eval_grassmann(y) * s[n + m * n + j];
                        out.push_back(v);
                    }
                return out;
            };
        return rk4_integrate(rhs, 0.0, t, state, opts);
    };

    DifferentialForm result(n);
    for (int p = 0; p <= n; ++p) {
        bool has_degree = false;
        for (const auto& [mask, fld] : w.terms())
            if (std::popcount(mask) == p) has_degree = true;
        if (!has_degree) continue;
        for (std::uint32_t target = 0; target < (std::uint32_t{1} << n); ++target) {
            if (std::popcount(target) != p) continue;
            auto fn = [w, flow_state, n, p, target](const GrassmannVector& x) {
                const int k = x.empty() ? 0 : x[0].generators();
                const GrassmannVector state = flow_state(x);
                const GrassmannVector y(state.begin(), state.begin() + n);
                std::vector<int> cols;
                for (int c = 0; c < n; ++c)
                    if (target & (std::uint32_t{1} << c)) cols.push_back(c);
                GrassmannElement acc(k);
                for (const auto& [mask, fld] : w.terms()) {
                    if (std::popcount(mask) != p) continue;
                    std::vector<int> rows;
                    for (int r = 0; r < n; ++r)
                        if (mask & (std::uint32_t{1} << r)) rows.push_back(r);
                    std::vector<GrassmannElement> sub;
                    sub.reserve(p * p);
                    for (int r : rows)
                        for (int c : cols) sub.push_back(state[n + r * n + c]);
                    acc += fld.eval_grassmann(y) * grassmann_det(sub, p, k);
                }
                return acc;
            };
            result.add_term(target, ScalarField::from_super_evaluator(n, derivative_order, fn));
        }
    }
    return result;
}

SuperFlow::SuperFlow(PiTDerivation X, const IntegratorOptions& opts)
    : X_(std::move(X)), X2_(derivation_square(X_)), regime_(Regime::Nilpotent), opts_(opts) {
    if (X_.parity() != Parity::Odd) throw algebra_error("super flow generator must be odd");
    const int n = X_.dim();
    // X^2 = 0: the series route is exact and terminates immediately.
    bool zero_square = true;
    for (int i = 0; i < n; ++i)
        if (!X2_.lie_coeff(i).terms().empty() || !X2_.contract_coeff(i).terms().empty())
            zero_square = false;
    if (zero_square) return;
    // X^2 = L_Z iff all L-coefficients are functions and the iota-coefficients
    // are their differentials.
    bool lie_like = true;
    for (int i = 0; i < n && lie_like; ++i) {
        const auto& a = X2_.lie_coeff(i);
        for (const auto& [mask, f] : a.terms())
            if (mask != 0 || !f.is_polynomial()) lie_like = false;
        if (!lie_like) break;
        if (max_coeff_distance(X2_.contract_coeff(i), exterior_d(a)) > 1e-12) lie_like = false;
    }
    if (lie_like) {
        std::vector<ScalarField> comps;
        for (int i = 0; i < n; ++i) comps.push_back(X2_.lie_coeff(i).coefficient(0));
        Z_ = VectorField(n, std::move(comps));
        regime_ = Regime::LieField;
    }
}

DifferentialForm SuperFlow::exp_minus_t_square(double t, const DifferentialForm& w) const {
    if (regime_ == Regime::LieField) return pullback_along_even_flow(*Z_, -t, w, opts_);
    DifferentialForm acc = w;
    DifferentialForm term = w;
    for (int m = 1; m <= 50; ++m) {
        term = X2_.apply(term) * (-t / m);
        if (term.terms().empty() || term.max_coeff_abs() == 0.0) return acc;
        acc += term;
    }
    throw unsupported_generator(
        "generator square is neither nilpotent on this form nor the Lie derivative of a "
        "vector field");
}

SuperForm SuperFlow::apply(double t, int theta_gen, const DifferentialForm& w) const {
    SuperForm r(w.dim(), {theta_gen});
    r.add_part(0, exp_minus_t_square(t, w));
    r.add_part(1, exp_minus_t_square(t, X_.apply(w)));
    return r;
}

OddReparamReport verify_odd_reparam_lemma(double f_const, const SuperFlow& flow,
                                          const Polynomial& b, const Polynomial& tau,
                                          const DifferentialForm& probe_form,
                                          const std::vector<double>& probe_times,
                                          const std::vector<std::vector<double>>& probe_points) {
    OddReparamReport report{0.0, 0.0, std::nullopt};
    const Polynomial bdot = b.partial(0);
    const int n = probe_form.dim();

    auto eval_at_probes = [&](const DifferentialForm& w) {
        // Seed the odd coordinates with one generator each for exact reads.
        double m = 0.0;
        for (const auto& x : probe_points) {
            GrassmannVector gx, xi;
            for (double v : x) gx.push_back(GrassmannElement::scalar(n, v));
            for (int i = 0; i < n; ++i) xi.push_back(GrassmannElement::generator(n, i));
            m = std::max(m, w.eval_grassmann(gx, xi).max_abs());
        }
        return m;
    };

    const double c = f_const;
    const DifferentialForm Xw = flow.generator().apply(probe_form);
    for (double t : probe_times) {
        const double bt = b.eval({t});
        const double dist = std::abs(tau.eval({t}) * tau.eval({t}) - bdot.eval({t}));
        if (dist > report.distribution_residual) {
            report.distribution_residual = dist;
            report.offending_time = t;
        }

        const DifferentialForm E = flow.exp_minus_t_square(bt, probe_form);
        // theta-part of beta: tau(t) e^{-b(t) X^2} X w; must equal c X(E).
        const DifferentialForm O = flow.exp_minus_t_square(bt, Xw) * tau.eval({t});
        const double r1 = eval_at_probes(O - flow.generator().apply(E) * c);

        // t-part: dE/dt must equal -(cX)^2 E = -c^2 X^2 E (finite difference).
        const double h = 1e-4;
        const DifferentialForm Ep = flow.exp_minus_t_square(b.eval({t + h}), probe_form);
        const DifferentialForm Em = flow.exp_minus_t_square(b.eval({t - h}), probe_form);
        const DifferentialForm dE = (Ep - Em) * (1.0 / (2.0 * h));
        const double r2 = eval_at_probes(dE + flow.square().apply(E) * (c * c));

        const double r = std::max(r1, r2);
        if (r > report.flow_equation_residual) {
            report.flow_equation_residual = r;
            if (r > dist) report.offending_time = t;
        }
    }
    return report;
}

}  // namespace supt
