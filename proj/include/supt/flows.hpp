#pragma once

#include <functional>
#include <optional>

#include "supt/derivations.hpp"

namespace supt {

struct IntegratorOptions {
    double tol = 1e-10;        // endpoint agreement between refinements, per unit time
    int initial_steps = 16;
    long max_steps = 1 << 22;
    double blowup = 1e12;
};

// Fixed-step RK4 with step doubling until two refinements agree within
// tol * (1 + |t1 - t0|). State is a vector of doubles or Grassmann elements.
template <typename State>
State rk4_integrate(const std::function<State(double, const State&)>& f, double t0, double t1,
                    const State& y0, const IntegratorOptions& opts = {});

// Plain fixed-step RK4 (no refinement loop), for inner loops that control
// their own step counts.
template <typename State>
State rk4_fixed(const std::function<State(double, const State&)>& f, double t0, double t1,
                const State& y0, long steps, double blowup = 1e12);

// Flow of a vector field on R^n; Grassmann-valued initial data integrates the
// nilpotent corrections (variational data) alongside the body.
std::vector<double> even_flow(const VectorField& X, double t, const std::vector<double>& x0,
                              const IntegratorOptions& opts = {});
GrassmannVector even_flow(const VectorField& X, double t, const GrassmannVector& x0,
                          const IntegratorOptions& opts = {});

// n-fold alternating composition (alpha_{t/n} beta_{t/n})^(n) approximating
// the flow of X + Y.
std::vector<double> trotter_flow(const VectorField& X, const VectorField& Y, double t,
                                 const std::vector<double>& x0, long n,
                                 const IntegratorOptions& opts = {});

struct TrotterRow {
    long n;
    double error;
    double observed_order;  // log2(e_{j-1}/e_j); NaN for the first row
};

struct TrotterStudy {
    std::vector<TrotterRow> rows;
    double fitted_order;  // least-squares slope of log error vs log n
};

TrotterStudy trotter_convergence(const VectorField& X, const VectorField& Y, double t,
                                 const std::vector<double>& x0, int max_exponent,
                                 const IntegratorOptions& opts = {});

// Pullback action of the flow of the odd field iota_X: w -> w + theta * iota_X w.
class OddFlowAction {
public:
    explicit OddFlowAction(VectorField X) : X_(std::move(X)) {}

    const VectorField& field() const { return X_; }
    SuperForm apply(const DifferentialForm& w, int theta_gen) const;

private:
    VectorField X_;
};

OddFlowAction odd_flow(const VectorField& X);

// Flow of iota_X + iota_Y; equals the composite of the two flows through the
// diagonal superpoint map.
OddFlowAction compose_odd_flows(const OddFlowAction& aX, const OddFlowAction& aY);

// The composite route: apply the X-action on slot gen_inner inside the
// Y-action on slot gen_outer, then set both thetas equal to gen_out. Used as
// the independent oracle for compose_odd_flows.
SuperForm odd_flow_composite_via_diagonal(const VectorField& X, const VectorField& Y,
                                          const DifferentialForm& w, int gen_outer, int gen_inner,
                                          int gen_out, int ambient_k);

// Flow of f X through the time-change ds/dt = f(alpha(s, x)). f must stay
// positive along the trajectory.
std::vector<double> reparam_flow_even(const ScalarField& f, const VectorField& X, double t,
                                      const std::vector<double>& x0,
                                      const IntegratorOptions& opts = {});

struct TrajectoryReport {
    bool same_trajectories = false;
    double parallel_residual = 0.0;  // max |Y - fX| over samples
    double trajectory_residual = 0.0;
    std::optional<std::vector<double>> counterexample;
};

// Checks that Y and X share directed trajectories through x0: Y must be a
// positive multiple of X pointwise (f supplied or fitted), and the integral
// curve of Y must be a time-change of the integral curve of X.
TrajectoryReport trajectory_equivalence_check(const VectorField& X, const VectorField& Y,
                                              const std::vector<double>& x0,
                                              const std::vector<double>& sample_times,
                                              const std::optional<ScalarField>& f = std::nullopt,
                                              const IntegratorOptions& opts = {});

// Exact pullback flow of the even field f * iota_X for an odd form f:
//   iota_X f = 0:  w -> w + t * f ^ iota_X w       (two-parameter group law)
//   iota_X f = 1:  w -> w + (e^t - 1) f ^ iota_X w (cocycle law)
class FIotaFlow {
public:
    enum class Mode { Xf0, Xf1 };

    FIotaFlow(DifferentialForm f, VectorField X, Mode mode, double tol = 1e-12);

    Mode mode() const { return mode_; }
    DifferentialForm apply(double t, const DifferentialForm& w) const;

private:
    DifferentialForm f_;
    VectorField X_;
    Mode mode_;
};

// Pullback of forms along the flow of Z at time t: coefficients are opaque
// fields that integrate the trajectory and its Jacobian. d/dt at 0 is the Lie
// derivative along Z.
DifferentialForm pullback_along_even_flow(const VectorField& Z, double t, const DifferentialForm& w,
                                          const IntegratorOptions& opts = {},
                                          int derivative_order = 2);

// Flow of an odd derivation X on the odd tangent bundle:
//   (t, theta, w) -> e^{-t X^2} (1 + theta X) w.
// Supported regimes for X^2: nilpotent on the forms it is applied to, or the
// Lie derivative of a vector field on the base.
class SuperFlow {
public:
    enum class Regime { Nilpotent, LieField };

    explicit SuperFlow(PiTDerivation X, const IntegratorOptions& opts = {});

    Regime regime() const { return regime_; }
    const PiTDerivation& generator() const { return X_; }
    const PiTDerivation& square() const { return X2_; }

    DifferentialForm exp_minus_t_square(double t, const DifferentialForm& w) const;
    SuperForm apply(double t, int theta_gen, const DifferentialForm& w) const;

private:
    PiTDerivation X_;
    PiTDerivation X2_;
    Regime regime_;
    std::optional<VectorField> Z_;
    IntegratorOptions opts_;
};

struct OddReparamReport {
    double distribution_residual;   // max |tau(t)^2 - b'(t)| over probe times
    double flow_equation_residual;  // residual of the fX-flow equations for the composite
    std::optional<double> offending_time;
};

// Verifies the reparametrized flow beta(t, theta) = alpha(b(t), tau(t) theta)
// against the flow equations of (f X) for constant f, and checks the
// D-distribution condition tau^2 = b' of the supplied family.
OddReparamReport verify_odd_reparam_lemma(double f_const, const SuperFlow& flow,
                                          const Polynomial& b, const Polynomial& tau,
                                          const DifferentialForm& probe_form,
                                          const std::vector<double>& probe_times,
                                          const std::vector<std::vector<double>>& probe_points);

}  // namespace supt
