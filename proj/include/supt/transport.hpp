#pragma once


#include "supt/bundles.hpp"
#include "supt/flows.hpp"

namespace supt {

// ---------------------------------------------------------------------------
// Superfunctions g0(t) + theta g1(t) on R^{1|1}, and the odd vector field
// D = d_theta + theta d_t with D^2 = d_t.
// ---------------------------------------------------------------------------
struct SuperFunction11 {
    Polynomial even_part;  // univariate in t
    Polynomial odd_part;
};

SuperFunction11 apply_D(const SuperFunction11& g);
SuperFunction11 apply_dt(const SuperFunction11& g);
double max_coeff_distance(const SuperFunction11& a, const SuperFunction11& b);

// ---------------------------------------------------------------------------
// Paths and superpaths
// ---------------------------------------------------------------------------

struct CurveCoord {
    std::function<GrassmannElement(double)> value;
    std::function<GrassmannElement(double)> velocity;
};

CurveCoord polynomial_coord(std::vector<GrassmannElement> coeffs);  // coeffs[j] t^j
CurveCoord constant_coord(const GrassmannElement& v);

// Superpath R^{1|1} x S -> M over a Grassmann context: coordinates
// x_i(t) + theta psi_i(t) with x even and psi odd. Empty odd part = a path
// (equivalently the q-lift of one).
struct SuperPathM {
    int dim = 0;
    int context = 0;    // Grassmann generators in play
    int theta_gen = 0;  // generator index used for theta
    double t0 = 0.0, t1 = 1.0;
    std::vector<CurveCoord> coords;
    std::vector<std::function<GrassmannElement(double)>> odd_coords;  // empty -> zero

    bool has_odd() const { return !odd_coords.empty(); }
};

SuperPathM path_from_polynomials(int context, int theta_gen,
                                 std::vector<std::vector<GrassmannElement>> coeffs, double t0,
                                 double t1);
SuperPathM path_from_real_polynomials(int dim, int context, int theta_gen,
                                      const std::vector<std::vector<double>>& coeffs, double t0,
                                      double t1);
SuperPathM constant_superpath(int context, int theta_gen, const GrassmannVector& point, double t0,
                              double t1);

// Precomposition with the superdiffeomorphism (t, theta) -> (b(t), tau(t) theta).
SuperPathM reparametrize(const SuperPathM& c, const Polynomial& b, const Polynomial& tau);
// Apply a superpoint map (Grassmann homomorphism) to all coordinate values.
SuperPathM map_path_values(const SuperPathM& c, const GrassmannHom& hom, int new_context);
GrassmannVector path_point(const SuperPathM& c, double t);

// Superpath into the odd tangent bundle: even coordinates x + theta chi, odd
// coordinates xi + theta eta.
struct SuperPathPiTM {
    int dim = 0;
    int context = 0;
    int theta_gen = 0;
    double t0 = 0.0, t1 = 1.0;
    std::vector<CurveCoord> x;
    std::vector<CurveCoord> xi;
    std::vector<std::function<GrassmannElement(double)>> x_theta;   // chi; empty -> zero
    std::vector<std::function<GrassmannElement(double)>> xi_theta;  // eta; empty -> zero
};

struct PiTMPoint {
    GrassmannVector x;
    GrassmannVector xi;
};

SuperPathPiTM include_path(const SuperPathM& c);       // xi = 0 along i: M -> PiTM
SuperPathM project_path(const SuperPathPiTM& c);       // pi drops the xi coordinates
SuperPathPiTM constant_superpath_pitm(int context, int theta_gen, const PiTMPoint& P, double t0,
                                      double t1);

// Flow-generated (super)paths through the point P.
SuperPathPiTM lie_flow_path(const VectorField& Z, const PiTMPoint& P, int context, int theta_gen,
                            double t0, double t1, const IntegratorOptions& opts = {});
// R^{0|1}-action of iota_{fX} (f a function, possibly constant 1):
// xi -> xi + theta f(x) X(x).
SuperPathPiTM iota_flow_superpath(const VectorField& X, const ScalarField& f, const PiTMPoint& P,
                                  int context, int theta_gen, double t0, double t1);
// R-action of the even field (f odd form) * iota_X with iota_X f = 0:
// xi -> xi + t f(x, xi) X(x).
SuperPathPiTM f_iota_flow_path(const DifferentialForm& f, const VectorField& X, const PiTMPoint& P,
                               int context, int theta_gen, double t0, double t1);

// ---------------------------------------------------------------------------
// Transport
// ---------------------------------------------------------------------------

struct TransportValue {
    GrassmannVector s1;
    GrassmannVector s2;  // theta-coefficient
};

// Parallel section along a (super)path: s(t, theta) = s1(t) + theta s2(t),
// where s2 is determined algebraically by s1 and s1 solves a linear ODE.
class ParallelSection {
public:
    ParallelSection(int context, int theta_gen, std::function<GrassmannMatrix(double)> coeff,
                    GrassmannVector v0, double t0, double t1, IntegratorOptions opts);

    TransportValue at(double t) const;
    const GrassmannVector& initial() const { return v0_; }
    double t0() const { return t0_; }
    double t1() const { return t1_; }

private:
    int context_;
    int theta_gen_;
    std::function<GrassmannMatrix(double)> coeff_;
    GrassmannVector v0_;
    double t0_, t1_;
    IntegratorOptions opts_;
};

struct MTransport {
    virtual ~MTransport() = default;
    virtual ParallelSection transport(const SuperPathM& c, const GrassmannVector& v0) const = 0;
};

struct PiTMTransport {
    virtual ~PiTMTransport() = default;
    virtual ParallelSection transport(const SuperPathPiTM& c, const GrassmannVector& v0) const = 0;
};

// D-parallel sections of the pullback of a connection along superpaths in M.
class ConnectionMTransport : public MTransport {
public:
    ConnectionMTransport(GradedConnection conn, IntegratorOptions opts = {});
    ParallelSection transport(const SuperPathM& c, const GrassmannVector& v0) const override;

private:
    GradedConnection conn_;
    IntegratorOptions opts_;
};

class ConnectionPiTMTransport : public PiTMTransport {
public:
    ConnectionPiTMTransport(PiTConnection conn, IntegratorOptions opts = {});
    ParallelSection transport(const SuperPathPiTM& c, const GrassmannVector& v0) const override;

private:
    PiTConnection conn_;
    IntegratorOptions opts_;
};

// p(c; v) := p_M(pi c; v): transport upstairs from transport downstairs.
class LiftedPiTMTransport : public PiTMTransport {
public:
    explicit LiftedPiTMTransport(const MTransport& inner) : inner_(&inner) {}
    ParallelSection transport(const SuperPathPiTM& c, const GrassmannVector& v0) const override;

private:
    const MTransport* inner_;
};

// p_M(c; v) := p(i c; v).
class ProjectedMTransport : public MTransport {
public:
    explicit ProjectedMTransport(const PiTMTransport& inner) : inner_(&inner) {}
    ParallelSection transport(const SuperPathM& c, const GrassmannVector& v0) const override;

private:
    const PiTMTransport* inner_;
};

// Plain path transport ds/dt + A(c')(c) s = 0 solved without any theta
// machinery; the independent route for the q-naturality axiom.
GrassmannVector path_transport_plain(const GradedConnection& conn, const SuperPathM& c, double t,
                                     const GrassmannVector& v0, const IntegratorOptions& opts = {});

GrassmannMatrix endpoint_map(const MTransport& T, const SuperPathM& c, double t, int rank);
GrassmannMatrix endpoint_map(const PiTMTransport& T, const SuperPathPiTM& c, double t, int rank);

// ---------------------------------------------------------------------------
// Axiom residuals
// ---------------------------------------------------------------------------

double check_gluing(const MTransport& T, const SuperPathM& c, double tmid,
                    const GrassmannVector& v0);
double check_constant_identity(const MTransport& T, const GrassmannVector& point_coords, int context,
                               int theta_gen, const GrassmannVector& v0);
// Superpath transport of the q-lift against the plain path ODE: s2 must
// vanish and s1 must match.
double check_q_naturality(const GradedConnection& conn, const MTransport& T, const SuperPathM& path,
                          const GrassmannVector& v0, const std::vector<double>& times,
                          const IntegratorOptions& opts = {});
double check_reparam_invariance(const MTransport& T, const SuperPathM& c, const Polynomial& b,
                                const Polynomial& tau, const GrassmannVector& v0,
                                const std::vector<double>& times);
double check_s_naturality(const MTransport& T, const SuperPathM& c, const GrassmannHom& hom,
                          int new_context, const GrassmannVector& v0,
                          const std::vector<double>& times);

// ---------------------------------------------------------------------------
// Flow transport and connection recovery
// ---------------------------------------------------------------------------

enum class FlowGeneratorKind { Lie, Iota, FIota };

struct FlowGenerator {
    FlowGeneratorKind kind = FlowGeneratorKind::Lie;
    VectorField X;
    std::optional<ScalarField> function_factor;   // iota_{fX}
    std::optional<DifferentialForm> odd_form;     // (f odd form) * iota_X
    std::string name() const;
};

// Parallel family along the flow of the generator through P, with the given
// pulled-back/initial section evaluated at P. Unsupported generators throw.
ParallelSection flow_transport(const PiTMTransport& T, const FlowGenerator& g,
                               const PiTSection& initial, const PiTMPoint& P, int context,
                               int theta_gen, double t0, double t1,
                               const IntegratorOptions& opts = {});

struct RecoveryOptions {
    IntegratorOptions integrator;
    std::vector<double> steps = {1e-2, 5e-3, 2.5e-3};  // Richardson ladder
    int theta_gen = 0;
    bool check_consistency = true;
    double consistency_tol = 1e-4;
};

// Connection on pi^*E recovered from a transport functor: L-directions by
// Richardson-extrapolated central differences of inverse endpoint maps along
// coordinate flows, iota-directions by exact theta-coefficient extraction.
class RecoveredConnection {
public:
    RecoveredConnection(const PiTMTransport& T, GradedBundle bundle, int context,
                        RecoveryOptions opts = {});

    GrassmannMatrix gamma_lie_at(int l, const PiTMPoint& P) const;
    GrassmannMatrix gamma_iota_at(int l, const PiTMPoint& P) const;

    // Direct recovery along the flow of a general even field fX (Jacobian
    // lift) and of iota_{fX}; used by the consistency checks.
    GrassmannMatrix gamma_along_even_field(const VectorField& W, const PiTMPoint& P) const;
    GrassmannMatrix gamma_along_iota_field(const VectorField& X, const ScalarField& f,
                                           const PiTMPoint& P) const;

    // Additive/multiplicative extension consistency: throws consistency_error
    // with a witness if the functor disagrees with itself across two
    // representations of the same derivation.
    void consistency_check(const ScalarField& f, const VectorField& X, const PiTMPoint& P) const;

    const GradedBundle& bundle() const { return bundle_; }
    int context() const { return context_; }

private:
    const PiTMTransport* T_;
    GradedBundle bundle_;
    int context_;
    RecoveryOptions opts_;
};

struct RoundtripReport {
    double max_residual = 0.0;        // |A' - A| entrywise at probe points
    double gamma_iota_residual = 0.0;  // odd-triviality of the recovered connection
    double evenness_residual = 0.0;    // off-block entries of the recovered matrices
    bool recovered_even = false;
};

// Even connection -> transport -> lifted functor -> recovered connection,
// compared entrywise against the original at probe points.
RoundtripReport roundtrip_residual(const GradedConnection& conn,
                                   const std::vector<std::vector<double>>& probe_points,
                                   const RecoveryOptions& opts = {});

// Coefficient mass on basis monomials meeting any of the given generators.
double max_abs_on_generators(const GrassmannElement& v, std::uint32_t gen_mask);
double max_abs_on_generators(const GrassmannVector& v, std::uint32_t gen_mask);

}  // namespace supt
