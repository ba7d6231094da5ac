#include "supt/transport.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>

namespace supt {

SuperFunction11 apply_D(const SuperFunction11& g) {
    // D(g0 + theta g1) = g1 + theta g0'.
    return SuperFunction11{g.odd_part, g.even_part.partial(0)};
}

SuperFunction11 apply_dt(const SuperFunction11& g) {
    return SuperFunction11{g.even_part.partial(0), g.odd_part.partial(0)};
}

double max_coeff_distance(const SuperFunction11& a, const SuperFunction11& b) {
    return std::max((a.even_part - b.even_part).max_abs_coeff(),
                    (a.odd_part - b.odd_part).max_abs_coeff());
}

CurveCoord polynomial_coord(std::vector<GrassmannElement> coeffs) {
    if (coeffs.empty()) throw algebra_error("polynomial coordinate needs coefficients");
    const int k = coeffs[0].generators();
    auto value = [coeffs, k](double t) {
        GrassmannElement v(k);
        double p = 1.0;
        for (const auto& c : coeffs) {
            v += c * p;
            p *= t;
        }
        return v;
    };
    auto velocity = [coeffs, k](double t) {
        GrassmannElement v(k);
        double p = 1.0;
        for (std::size_t j = 1; j < coeffs.size(); ++j) {
            v += coeffs[j] * (static_cast<double>(j) * p);
            p *= t;
        }
        return v;
    };
    return CurveCoord{value, velocity};
}

CurveCoord constant_coord(const GrassmannElement& v) {
    const GrassmannElement zero(v.generators());
    return CurveCoord{[v](double) { return v; }, [zero](double) { return zero; }};
}

SuperPathM path_from_polynomials(int context, int theta_gen,
                                 std::vector<std::vector<GrassmannElement>> coeffs, double t0,
                                 double t1) {
    SuperPathM c;
    c.dim = static_cast<int>(coeffs.size());
    c.context = context;
    c.theta_gen = theta_gen;
    c.t0 = t0;
    c.t1 = t1;
    for (auto& cc : coeffs) c.coords.push_back(polynomial_coord(std::move(cc)));
    return c;
}

SuperPathM path_from_real_polynomials(int dim, int context, int theta_gen,
                                      const std::vector<std::vector<double>>& coeffs, double t0,
                                      double t1) {
    std::vector<std::vector<GrassmannElement>> g;
    g.reserve(dim);
    for (const auto& cc : coeffs) {
        std::vector<GrassmannElement> gc;
        for (double v : cc) gc.push_back(GrassmannElement::scalar(context, v));
        g.push_back(std::move(gc));
    }
    return path_from_polynomials(context, theta_gen, std::move(g), t0, t1);
}

SuperPathM constant_superpath(int context, int theta_gen, const GrassmannVector& point, double t0,
                              double t1) {
    SuperPathM c;
    c.dim = static_cast<int>(point.size());
    c.context = context;
    c.theta_gen = theta_gen;
    c.t0 = t0;
    c.t1 = t1;
    for (const auto& v : point) c.coords.push_back(constant_coord(v));
    return c;
}

SuperPathM reparametrize(const SuperPathM& c, const Polynomial& b, const Polynomial& tau) {
    SuperPathM r = c;
    const Polynomial bdot = b.partial(0);
    for (int i = 0; i < c.dim; ++i) {
        const CurveCoord base = c.coords[i];
        r.coords[i].value = [base, b](double t) { return base.value(b.eval({t})); };
        r.coords[i].velocity = [base, b, bdot](double t) {
            return base.velocity(b.eval({t})) * bdot.eval({t});
        };
    }
    for (std::size_t i = 0; i < c.odd_coords.size(); ++i) {
        const auto base = c.odd_coords[i];
        r.odd_coords[i] = [base, b, tau](double t) { return base(b.eval({t})) * tau.eval({t}); };
    }
    return r;
}

SuperPathM map_path_values(const SuperPathM& c, const GrassmannHom& hom, int new_context) {
    SuperPathM r = c;
    r.context = new_context;
    for (int i = 0; i < c.dim; ++i) {
        const CurveCoord base = c.coords[i];
        r.coords[i].value = [base, hom](double t) { return hom.apply(base.value(t)); };
        r.coords[i].velocity = [base, hom](double t) { return hom.apply(base.velocity(t)); };
    }
    for (std::size_t i = 0; i < c.odd_coords.size(); ++i) {
        const auto base = c.odd_coords[i];
        r.odd_coords[i] = [base, hom](double t) { return hom.apply(base(t)); };
    }
    return r;
}

GrassmannVector path_point(const SuperPathM& c, double t) {
    GrassmannVector p;
    p.reserve(c.dim);
    for (const auto& cc : c.coords) p.push_back(cc.value(t));
    return p;
}

SuperPathPiTM include_path(const SuperPathM& c) {
    SuperPathPiTM r;
    r.dim = c.dim;
    r.context = c.context;
    r.theta_gen = c.theta_gen;
    r.t0 = c.t0;
    r.t1 = c.t1;
    r.x = c.coords;
    for (int i = 0; i < c.dim; ++i) r.xi.push_back(constant_coord(GrassmannElement::zero(c.context)));
    r.x_theta = c.odd_coords;
    return r;
}

SuperPathM project_path(const SuperPathPiTM& c) {
    SuperPathM r;
    r.dim = c.dim;
    r.context = c.context;
    r.theta_gen = c.theta_gen;
    r.t0 = c.t0;
    r.t1 = c.t1;
    r.coords = c.x;
    r.odd_coords = c.x_theta;
    return r;
}

SuperPathPiTM constant_superpath_pitm(int context, int theta_gen, const PiTMPoint& P, double t0,
                                      double t1) {
    SuperPathPiTM r;
    r.dim = static_cast<int>(P.x.size());
    r.context = context;
    r.theta_gen = theta_gen;
    r.t0 = t0;
    r.t1 = t1;
    for (const auto& v : P.x) r.x.push_back(constant_coord(v));
    for (const auto& v : P.xi) r.xi.push_back(constant_coord(v));
    return r;
}

namespace {

struct PiTMState {
    GrassmannVector x;
    GrassmannVector xi;
};

// Shared trajectory of the Jacobian-lifted flow of Z through P, memoized by
// evaluation time; new times integrate from the nearest stored state with a
// fixed per-unit step density, so sweeps by the transport integrator stay
// linear in the horizon.
std::function<PiTMState(double)> make_lie_flow_state(const VectorField& Z, const PiTMPoint& P,
                                                     const IntegratorOptions& opts) {
    const int n = Z.dim();
    auto dz = std::make_shared<std::vector<ScalarField>>();
    for (int i = 0; i < n; ++i)
        for (int m = 0; m < n; ++m) dz->push_back(Z.component(i).partial(m));
    auto memo = std::make_shared<std::map<double, GrassmannVector>>();
    auto memo_mutex = std::make_shared<std::mutex>();
    GrassmannVector state0 = P.x;
    state0.insert(state0.end(), P.xi.begin(), P.xi.end());
    memo->emplace(0.0, state0);
    const double blowup = opts.blowup;
    return [Z, dz, n, memo, memo_mutex, blowup](double t) {
        const std::lock_guard<std::mutex> lock(*memo_mutex);
        std::function<GrassmannVector(double, const GrassmannVector&)> rhs =
            [Z, dz, n](double, const GrassmannVector& s) {
                GrassmannVector x(s.begin(), s.begin() + n);
                GrassmannVector out = Z.eval_grassmann(x);
                for (int i = 0; i < n; ++i) {
                    GrassmannElement v(x[0].generators());
                    for (int m = 0; m < n; ++m)
                        v += (*dz)[i * n + m].eval_grassmann(x) * s[n + m];
                    out.push_back(v);
                }
                return out;
            };
        auto it = memo->find(t);
        if (it == memo->end()) {
            // Nearest stored time on either side.
            auto hi = memo->lower_bound(t);
            auto nearest = hi;
            if (hi == memo->end()) {
                nearest = std::prev(hi);
            } else if (hi != memo->begin()) {
                auto lo = std::prev(hi);
                if (t - lo->first < hi->first - t) nearest = lo;
            }
            const double t0 = nearest->first;
            const long steps =
                std::max<long>(1, static_cast<long>(std::ceil(std::abs(t - t0) * 1024.0)));
            const GrassmannVector s = rk4_fixed(rhs, t0, t, nearest->second, steps, blowup);
            it = memo->emplace(t, s).first;
        }
        const GrassmannVector& s = it->second;
        return PiTMState{GrassmannVector(s.begin(), s.begin() + n),
                         GrassmannVector(s.begin() + n, s.end())};
    };
}

}  // namespace

SuperPathPiTM lie_flow_path(const VectorField& Z, const PiTMPoint& P, int context, int theta_gen,
                            double t0, double t1, const IntegratorOptions& opts) {
    const int n = Z.dim();
    auto state_at = make_lie_flow_state(Z, P, opts);
    auto dz = std::make_shared<std::vector<ScalarField>>();
    for (int i = 0; i < n; ++i)
        for (int m = 0; m < n; ++m) dz->push_back(Z.component(i).partial(m));

    SuperPathPiTM r;
    r.dim = n;
    r.context = context;
    r.theta_gen = theta_gen;
    r.t0 = t0;
    r.t1 = t1;
    for (int i = 0; i < n; ++i) {
        r.x.push_back(CurveCoord{
            [state_at, i](double t) { return state_at(t).x[i]; },
            [state_at, Z, i](double t) { return Z.component(i).eval_grassmann(state_at(t).x); }});
        r.xi.push_back(CurveCoord{[state_at, i](double t) { return state_at(t).xi[i]; },
                                  [state_at, dz, n, i](double t) {
                                      const PiTMState s = state_at(t);
                                      GrassmannElement v(s.x[0].generators());
                                      for (int m = 0; m < n; ++m)
                                          v += (*dz)[i * n + m].eval_grassmann(s.x) * s.xi[m];
                                      return v;
                                  }});
    }
    return r;
}

SuperPathPiTM iota_flow_superpath(const VectorField& X, const ScalarField& f, const PiTMPoint& P,
                                  int context, int theta_gen, double t0, double t1) {
    const int n = X.dim();
    SuperPathPiTM r = constant_superpath_pitm(context, theta_gen, P, t0, t1);
    const GrassmannElement fval = f.eval_grassmann(P.x);
    for (int i = 0; i < n; ++i) {
        const GrassmannElement eta = fval * X.component(i).eval_grassmann(P.x);
        r.xi_theta.push_back([eta](double) { return eta; });
    }
    return r;
}

SuperPathPiTM f_iota_flow_path(const DifferentialForm& f, const VectorField& X, const PiTMPoint& P,
                               int context, int theta_gen, double t0, double t1) {
    const int n = X.dim();
    if (max_coeff_distance(contract(X, f), DifferentialForm::zero(n)) > 1e-12)
        throw unsupported_generator("f*iota_X flow path needs iota_X f = 0, got iota_X f = " +
                                    contract(X, f).str());
    SuperPathPiTM r = constant_superpath_pitm(context, theta_gen, P, t0, t1);
    const GrassmannElement fval = f.eval_grassmann(P.x, P.xi);
    for (int i = 0; i < n; ++i) {
        const GrassmannElement rate = fval * X.component(i).eval_grassmann(P.x);
        const GrassmannElement base = P.xi[i];
        r.xi[i] = CurveCoord{[base, rate](double t) { return base + rate * t; },
                             [rate](double) { return rate; }};
    }
    return r;
}

ParallelSection::ParallelSection(int context, int theta_gen,
                                 std::function<GrassmannMatrix(double)> coeff, GrassmannVector v0,
                                 double t0, double t1, IntegratorOptions opts)
    : context_(context),
      theta_gen_(theta_gen),
      coeff_(std::move(coeff)),
      v0_(std::move(v0)),
      t0_(t0),
      t1_(t1),
      opts_(opts) {
    const std::uint32_t theta_bit = std::uint32_t{1} << theta_gen_;
    if (max_abs_on_generators(v0_, theta_bit) != 0.0)
        throw algebra_error("initial condition must not involve the theta generator");
}

TransportValue ParallelSection::at(double t) const {
    const GrassmannElement theta = GrassmannElement::generator(context_, theta_gen_);
    auto split = [&](const GrassmannVector& v) {
        std::pair<GrassmannVector, GrassmannVector> r;
        for (const auto& c : v) {
            auto [p, q] = c.split_generator(theta_gen_);
            r.first.push_back(std::move(p));
            r.second.push_back(std::move(q));
        }
        return r;
    };
    std::function<GrassmannVector(double, const GrassmannVector&)> rhs =
        [&](double tt, const GrassmannVector& s1) {
            const GrassmannMatrix M = coeff_(tt);
            const GrassmannVector u = M * s1;
            auto [pu, qu] = split(u);
            GrassmannVector theta_s2;
            theta_s2.reserve(pu.size());
            for (const auto& c : pu) theta_s2.push_back(theta * (-1.0 * c));
            const GrassmannVector v = M * theta_s2;
            auto [pv, qv] = split(v);
            GrassmannVector out;
            out.reserve(qu.size());
            for (std::size_t i = 0; i < qu.size(); ++i) out.push_back(-1.0 * (qu[i] + qv[i]));
            return out;
        };
    const GrassmannVector s1 = rk4_integrate(rhs, t0_, t, v0_, opts_);
    const GrassmannVector u = coeff_(t) * s1;
    auto [pu, qu] = split(u);
    GrassmannVector s2;
    s2.reserve(pu.size());
    for (const auto& c : pu) s2.push_back(-1.0 * c);
    return TransportValue{s1, s2};
}

namespace {

std::function<GrassmannMatrix(double)> m_base_coefficient(const GradedConnection& conn,
                                                          const SuperPathM& c) {
    const int n = conn.bundle().base_dim;
    const int m = conn.bundle().rank();
    if (c.dim != n) throw algebra_error("path dimension does not match the connection base");
    const GrassmannElement theta = GrassmannElement::generator(c.context, c.theta_gen);
    const GradedConnection conn_copy = conn;
    const SuperPathM path = c;
    return [conn_copy, path, theta, n, m](double t) {
        const int k = path.context;
        GrassmannVector point;
        GrassmannVector dc;
        point.reserve(n);
        dc.reserve(n);
        for (int i = 0; i < n; ++i) {
            const GrassmannElement psi =
                path.has_odd() ? path.odd_coords[i](t) : GrassmannElement::zero(k);
            point.push_back(path.coords[i].value(t) + theta * psi);
            dc.push_back(psi + theta * path.coords[i].velocity(t));
        }
        GrassmannMatrix M(m, m, GrassmannElement::zero(k));
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                for (int l = 0; l < n; ++l) {
                    const ScalarField coef = conn_copy.A().at(a, b).coefficient(std::uint32_t{1} << l);
                    if (coef.is_polynomial() && coef.is_zero()) continue;
                    M.at(a, b) += coef.eval_grassmann(point) * dc[l];
                }
        return M;
    };
}

std::function<GrassmannMatrix(double)> pitm_coefficient(const PiTConnection& conn,
                                                        const SuperPathPiTM& c) {
    const int n = conn.dim();
    const int m = conn.bundle().rank();
    if (c.dim != n) throw algebra_error("path dimension does not match the connection base");
    const GrassmannElement theta = GrassmannElement::generator(c.context, c.theta_gen);
    const PiTConnection conn_copy = conn;
    const SuperPathPiTM path = c;
    return [conn_copy, path, theta, n, m](double t) {
        const int k = path.context;
        GrassmannVector px, pxi, dx, dxi;
        for (int i = 0; i < n; ++i) {
            const GrassmannElement chi =
                path.x_theta.empty() ? GrassmannElement::zero(k) : path.x_theta[i](t);
            const GrassmannElement eta =
                path.xi_theta.empty() ? GrassmannElement::zero(k) : path.xi_theta[i](t);
            px.push_back(path.x[i].value(t) + theta * chi);
            pxi.push_back(path.xi[i].value(t) + theta * eta);
            dx.push_back(chi + theta * path.x[i].velocity(t));
            dxi.push_back(eta + theta * path.xi[i].velocity(t));
        }
        GrassmannMatrix M(m, m, GrassmannElement::zero(k));
        for (int l = 0; l < n; ++l) {
            const bool any_dx = dx[l].max_abs() != 0.0;
            const bool any_dxi = dxi[l].max_abs() != 0.0;
            if (!any_dx && !any_dxi) continue;
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    if (any_dx && !conn_copy.gamma_lie(l).at(a, b).terms().empty())
                        M.at(a, b) += conn_copy.gamma_lie(l).at(a, b).eval_grassmann(px, pxi) * dx[l];
                    if (any_dxi && !conn_copy.gamma_iota(l).at(a, b).terms().empty())
                        M.at(a, b) += conn_copy.gamma_iota(l).at(a, b).eval_grassmann(px, pxi) * dxi[l];
                }
        }
        return M;
    };
}

}  // namespace

ConnectionMTransport::ConnectionMTransport(GradedConnection conn, IntegratorOptions opts)
    : conn_(std::move(conn)), opts_(opts) {}

ParallelSection ConnectionMTransport::transport(const SuperPathM& c,
                                                const GrassmannVector& v0) const {
    return ParallelSection(c.context, c.theta_gen, m_base_coefficient(conn_, c), v0, c.t0, c.t1,
                           opts_);
}

ConnectionPiTMTransport::ConnectionPiTMTransport(PiTConnection conn, IntegratorOptions opts)
    : conn_(std::move(conn)), opts_(opts) {}

ParallelSection ConnectionPiTMTransport::transport(const SuperPathPiTM& c,
                                                   const GrassmannVector& v0) const {
    return ParallelSection(c.context, c.theta_gen, pitm_coefficient(conn_, c), v0, c.t0, c.t1,
                           opts_);
}

ParallelSection LiftedPiTMTransport::transport(const SuperPathPiTM& c,
                                               const GrassmannVector& v0) const {
    return inner_->transport(project_path(c), v0);
}

ParallelSection ProjectedMTransport::transport(const SuperPathM& c,
                                               const GrassmannVector& v0) const {
    return inner_->transport(include_path(c), v0);
}

GrassmannVector path_transport_plain(const GradedConnection& conn, const SuperPathM& c, double t,
                                     const GrassmannVector& v0, const IntegratorOptions& opts) {
    if (c.has_odd()) throw algebra_error("plain path transport is for paths without odd data");
    const int n = conn.bundle().base_dim;
    const int m = conn.bundle().rank();
    std::function<GrassmannVector(double, const GrassmannVector&)> rhs =
        [&](double tt, const GrassmannVector& s) {
            GrassmannVector point;
            point.reserve(n);
            for (int i = 0; i < n; ++i) point.push_back(c.coords[i].value(tt));
            GrassmannVector out(m, GrassmannElement::zero(c.context));
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    for (int l = 0; l < n; ++l) {
                        const ScalarField coef =
                            conn.A().at(a, b).coefficient(std::uint32_t{1} << l);
                        if (coef.is_polynomial() && coef.is_zero()) continue;
                        out[a] -= coef.eval_grassmann(point) * c.coords[l].velocity(tt) * s[b];
                    }
            return out;
        };
    return rk4_integrate(rhs, c.t0, t, v0, opts);
}

namespace {

template <typename Transport, typename Path>
GrassmannMatrix endpoint_map_impl(const Transport& T, const Path& c, double t, int m) {
    const int k = c.context;
    GrassmannMatrix E(m, m, GrassmannElement::zero(k));
    for (int a = 0; a < m; ++a) {
        GrassmannVector e(m, GrassmannElement::zero(k));
        e[a] = GrassmannElement::scalar(k, 1.0);
        const TransportValue v = T.transport(c, e).at(t);
        for (int b = 0; b < m; ++b) E.at(b, a) = v.s1[b];
    }
    return E;
}

}  // namespace

GrassmannMatrix endpoint_map(const MTransport& T, const SuperPathM& c, double t, int rank) {
    return endpoint_map_impl(T, c, t, rank);
}

GrassmannMatrix endpoint_map(const PiTMTransport& T, const SuperPathPiTM& c, double t, int rank) {
    return endpoint_map_impl(T, c, t, rank);
}

double check_gluing(const MTransport& T, const SuperPathM& c, double tmid,
                    const GrassmannVector& v0) {
    const TransportValue whole = T.transport(c, v0).at(c.t1);
    SuperPathM first = c;
    first.t1 = tmid;
    const TransportValue handoff = T.transport(first, v0).at(tmid);
    SuperPathM second = c;
    second.t0 = tmid;
    const TransportValue glued = T.transport(second, handoff.s1).at(c.t1);
    return std::max(max_abs(whole.s1 - glued.s1), max_abs(whole.s2 - glued.s2));
}

double check_constant_identity(const MTransport& T, const GrassmannVector& point_coords,
                               int context, int theta_gen, const GrassmannVector& v0) {
    const SuperPathM c = constant_superpath(context, theta_gen, point_coords, 0.0, 1.0);
    const ParallelSection p = T.transport(c, v0);
    double res = 0.0;
    for (double t : {0.0, 0.37, 1.0}) {
        const TransportValue v = p.at(t);
        res = std::max(res, max_abs(v.s1 - v0));
        res = std::max(res, max_abs(v.s2));
    }
    return res;
}

double check_q_naturality(const GradedConnection& conn, const MTransport& T,
                          const SuperPathM& path, const GrassmannVector& v0,
                          const std::vector<double>& times, const IntegratorOptions& opts) {
    if (path.has_odd()) throw algebra_error("q-naturality check takes a path (no odd data)");
    const ParallelSection lifted = T.transport(path, v0);
    double res = 0.0;
    for (double t : times) {
        const TransportValue v = lifted.at(t);
        const GrassmannVector plain = path_transport_plain(conn, path, t, v0, opts);
        res = std::max(res, max_abs(v.s1 - plain));
        res = std::max(res, max_abs(v.s2));
    }
    return res;
}

double check_reparam_invariance(const MTransport& T, const SuperPathM& c, const Polynomial& b,
                                const Polynomial& tau, const GrassmannVector& v0,
                                const std::vector<double>& times) {
    const SuperPathM cb = reparametrize(c, b, tau);
    const ParallelSection p = T.transport(c, v0);
    const ParallelSection pb = T.transport(cb, v0);
    double res = 0.0;
    for (double t : times) {
        const TransportValue lhs = pb.at(t);
        const TransportValue rhs = p.at(b.eval({t}));
        res = std::max(res, max_abs(lhs.s1 - rhs.s1));
        GrassmannVector scaled = rhs.s2;
        for (auto& x : scaled) x *= tau.eval({t});
        res = std::max(res, max_abs(lhs.s2 - scaled));
    }
    return res;
}

double check_s_naturality(const MTransport& T, const SuperPathM& c, const GrassmannHom& hom,
                          int new_context, const GrassmannVector& v0,
                          const std::vector<double>& times) {
    const SuperPathM ch = map_path_values(c, hom, new_context);
    GrassmannVector v0h;
    v0h.reserve(v0.size());
    for (const auto& x : v0) v0h.push_back(hom.apply(x));
    const ParallelSection p = T.transport(c, v0);
    const ParallelSection ph = T.transport(ch, v0h);
    double res = 0.0;
    for (double t : times) {
        const TransportValue a = p.at(t);
        const TransportValue bh = ph.at(t);
        for (std::size_t i = 0; i < a.s1.size(); ++i) {
            res = std::max(res, (bh.s1[i] - hom.apply(a.s1[i])).max_abs());
            res = std::max(res, (bh.s2[i] - hom.apply(a.s2[i])).max_abs());
        }
    }
    return res;
}

std::string FlowGenerator::name() const {
    switch (kind) {
        case FlowGeneratorKind::Lie:
            return "L_X (even flow)";
        case FlowGeneratorKind::Iota:
            return function_factor ? "iota_{fX} (R^{0|1}-action)" : "iota_X (R^{0|1}-action)";
        case FlowGeneratorKind::FIota:
            return "(odd form) * iota_X (R-action)";
    }
    return "unknown";
}

ParallelSection flow_transport(const PiTMTransport& T, const FlowGenerator& g,
                               const PiTSection& initial, const PiTMPoint& P, int context,
                               int theta_gen, double t0, double t1,
                               const IntegratorOptions& opts) {
    GrassmannVector v0;
    v0.reserve(initial.size());
    for (const auto& w : initial) v0.push_back(w.eval_grassmann(P.x, P.xi));

    switch (g.kind) {
        case FlowGeneratorKind::Lie:
            return T.transport(lie_flow_path(g.X, P, context, theta_gen, t0, t1, opts), v0);
        case FlowGeneratorKind::Iota: {
            const ScalarField f =
                g.function_factor ? *g.function_factor : ScalarField::constant(g.X.dim(), 1.0);
            return T.transport(iota_flow_superpath(g.X, f, P, context, theta_gen, t0, t1), v0);
        }
        case FlowGeneratorKind::FIota: {
            if (!g.odd_form) throw unsupported_generator("FIota generator needs its odd form");
            return T.transport(f_iota_flow_path(*g.odd_form, g.X, P, context, theta_gen, t0, t1),
                               v0);
        }
    }
    throw unsupported_generator("flow transport does not support generator type: " + g.name());
}

RecoveredConnection::RecoveredConnection(const PiTMTransport& T, GradedBundle bundle, int context,
                                         RecoveryOptions opts)
    : T_(&T), bundle_(bundle), context_(context), opts_(std::move(opts)) {
    if (opts_.check_consistency) {
        const int n = bundle_.base_dim;
        PiTMPoint P;
        for (int i = 0; i < n; ++i)
            P.x.push_back(GrassmannElement::scalar(context_, 0.3 + 0.1 * i));
        for (int i = 0; i < n; ++i) {
            const int gen = 1 + i;
            P.xi.push_back(gen < context_ ? GrassmannElement::generator(context_, gen)
                                          : GrassmannElement::zero(context_));
        }
        consistency_check(ScalarField::constant(n, 1.0) + ScalarField::coordinate(n, 0),
                          VectorField::coordinate(n, n - 1), P);
    }
}

GrassmannMatrix RecoveredConnection::gamma_along_even_field(const VectorField& W,
                                                            const PiTMPoint& P) const {
    const int m = bundle_.rank();
    auto derivative = [&](double h) {
        const SuperPathPiTM forward =
            lie_flow_path(W, P, context_, opts_.theta_gen, 0.0, h, opts_.integrator);
        const SuperPathPiTM backward =
            lie_flow_path(W, P, context_, opts_.theta_gen, 0.0, -h, opts_.integrator);
        const GrassmannMatrix Ef = grassmann_inverse(endpoint_map(*T_, forward, h, m));
        const GrassmannMatrix Eb = grassmann_inverse(endpoint_map(*T_, backward, -h, m));
        return (1.0 / (2.0 * h)) * (Ef - Eb);
    };
    if (opts_.steps.size() < 3) throw algebra_error("Richardson ladder needs three steps");
    const GrassmannMatrix d1 = derivative(opts_.steps[0]);
    const GrassmannMatrix d2 = derivative(opts_.steps[1]);
    const GrassmannMatrix d3 = derivative(opts_.steps[2]);
    const GrassmannMatrix r1 = (1.0 / 3.0) * (4.0 * d2 - d1);
    const GrassmannMatrix r2 = (1.0 / 3.0) * (4.0 * d3 - d2);
    return (1.0 / 15.0) * (16.0 * r2 - r1);
}

GrassmannMatrix RecoveredConnection::gamma_along_iota_field(const VectorField& X,
                                                            const ScalarField& f,
                                                            const PiTMPoint& P) const {
    const int m = bundle_.rank();
    const SuperPathPiTM sp =
        iota_flow_superpath(X, f, P, context_, opts_.theta_gen, 0.0, 1.0);
    GrassmannMatrix G(m, m, GrassmannElement::zero(context_));
    for (int a = 0; a < m; ++a) {
        GrassmannVector e(m, GrassmannElement::zero(context_));
        e[a] = GrassmannElement::scalar(context_, 1.0);
        const TransportValue v = T_->transport(sp, e).at(0.0);
        for (int b = 0; b < m; ++b) G.at(b, a) = -1.0 * v.s2[b];
    }
    return G;
}

GrassmannMatrix RecoveredConnection::gamma_lie_at(int l, const PiTMPoint& P) const {
    return gamma_along_even_field(VectorField::coordinate(bundle_.base_dim, l), P);
}

GrassmannMatrix RecoveredConnection::gamma_iota_at(int l, const PiTMPoint& P) const {
    return gamma_along_iota_field(VectorField::coordinate(bundle_.base_dim, l),
                                  ScalarField::constant(bundle_.base_dim, 1.0), P);
}

void RecoveredConnection::consistency_check(const ScalarField& f, const VectorField& X,
                                            const PiTMPoint& P) const {
    const int n = bundle_.base_dim;
    const int m = bundle_.rank();

    // iota-direction function linearity: recover along iota_{fX} directly and
    // through the rule nabla_{f iota_X} = f nabla_{iota_X}.
    const GrassmannMatrix direct_iota = gamma_along_iota_field(X, f, P);
    GrassmannMatrix ext_iota(m, m, GrassmannElement::zero(context_));
    for (int l = 0; l < n; ++l) {
        const GrassmannElement ev = (f * X.component(l)).eval_grassmann(P.x);
        if (ev.max_abs() == 0.0) continue;
        const GrassmannMatrix Gl = gamma_iota_at(l, P);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) ext_iota.at(a, b) += Gl.at(a, b) * ev;
    }
    if (max_abs(direct_iota - ext_iota) > opts_.consistency_tol)
        throw consistency_error(
            "transport functor is inconsistent on iota-directions: direct recovery along "
            "iota_{fX} disagrees with f * recovered iota_X (residual " +
            std::to_string(max_abs(direct_iota - ext_iota)) + ")");

    // L-direction: recover along the flow of fX directly and through
    // L_{fX} = f L_X + df ^ iota_X.
    const GrassmannMatrix direct_lie = gamma_along_even_field(f * X, P);
    GrassmannMatrix ext_lie(m, m, GrassmannElement::zero(context_));
    for (int l = 0; l < n; ++l) {
        const ScalarField al = f * X.component(l);
        const GrassmannElement ev_a = al.eval_grassmann(P.x);
        if (ev_a.max_abs() != 0.0) {
            const GrassmannMatrix Gl = gamma_lie_at(l, P);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) ext_lie.at(a, b) += Gl.at(a, b) * ev_a;
        }
        const DifferentialForm bl = exterior_d(DifferentialForm::from_scalar(al));
        const GrassmannElement ev_b = bl.eval_grassmann(P.x, P.xi);
        if (ev_b.max_abs() != 0.0) {
            const GrassmannMatrix Gl = gamma_iota_at(l, P);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) ext_lie.at(a, b) += Gl.at(a, b) * ev_b;
        }
    }
    if (max_abs(direct_lie - ext_lie) > opts_.consistency_tol)
        throw consistency_error(
            "transport functor is inconsistent on L-directions: direct recovery along the flow "
            "of fX disagrees with the even-odd extension rules (residual " +
            std::to_string(max_abs(direct_lie - ext_lie)) + ")");
}

RoundtripReport roundtrip_residual(const GradedConnection& conn,
                                   const std::vector<std::vector<double>>& probe_points,
                                   const RecoveryOptions& opts) {
    const int n = conn.bundle().base_dim;
    const int m = conn.bundle().rank();
    const int context = 1 + n;  // theta plus one odd seed per xi coordinate

    const ConnectionMTransport T(conn, opts.integrator);
    const LiftedPiTMTransport lifted(T);
    RecoveryOptions ropts = opts;
    ropts.theta_gen = 0;
    const RecoveredConnection rec(lifted, conn.bundle(), context, ropts);

    RoundtripReport report;
    for (const auto& x : probe_points) {
        PiTMPoint P;
        for (int i = 0; i < n; ++i) P.x.push_back(GrassmannElement::scalar(context, x[i]));
        for (int i = 0; i < n; ++i) P.xi.push_back(GrassmannElement::generator(context, 1 + i));
        for (int l = 0; l < n; ++l) {
            const GrassmannMatrix GL = rec.gamma_lie_at(l, P);
            const GrassmannMatrix GI = rec.gamma_iota_at(l, P);
            report.gamma_iota_residual = std::max(report.gamma_iota_residual, max_abs(GI));
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    const double want =
                        conn.A().at(a, b).coefficient(std::uint32_t{1} << l).eval(x);
                    GrassmannElement diff = GL.at(a, b);
                    diff.set_coefficient(0, diff.body() - want);
                    report.max_residual = std::max(report.max_residual, diff.max_abs());
                    if (conn.bundle().fiber_parity(a) != conn.bundle().fiber_parity(b))
                        report.evenness_residual =
                            std::max(report.evenness_residual, GL.at(a, b).max_abs());
                }
        }
    }
    report.recovered_even = report.evenness_residual <= 1e-6;
    return report;
}

double max_abs_on_generators(const GrassmannElement& v, std::uint32_t gen_mask) {
    double m = 0.0;
    for (std::uint32_t mask = 0; mask < v.basis_size(); ++mask)
        if ((mask & gen_mask) != 0) m = std::max(m, std::abs(v.coefficient(mask)));
    return m;
}

double max_abs_on_generators(const GrassmannVector& v, std::uint32_t gen_mask) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, max_abs_on_generators(x, gen_mask));
    return m;
}

}  // namespace supt
