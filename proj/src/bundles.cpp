#include "supt/bundles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace supt {

GrassmannMatrix grassmann_identity(int m, int k) {
    GrassmannMatrix r(m, m, GrassmannElement::zero(k));
    for (int i = 0; i < m; ++i) r.at(i, i) = GrassmannElement::scalar(k, 1.0);
    return r;
}

GrassmannMatrix operator*(const GrassmannMatrix& a, const GrassmannMatrix& b) {
    if (a.cols() != b.rows()) throw algebra_error("matrix shape mismatch");
    const int k = a.at(0, 0).generators();
    GrassmannMatrix r(a.rows(), b.cols(), GrassmannElement::zero(k));
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j)
            for (int m = 0; m < a.cols(); ++m) r.at(i, j) += a.at(i, m) * b.at(m, j);
    return r;
}

GrassmannMatrix operator+(const GrassmannMatrix& a, const GrassmannMatrix& b) {
    GrassmannMatrix r = a;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r.at(i, j) += b.at(i, j);
    return r;
}

GrassmannMatrix operator-(const GrassmannMatrix& a, const GrassmannMatrix& b) {
    GrassmannMatrix r = a;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r.at(i, j) -= b.at(i, j);
    return r;
}

GrassmannMatrix operator*(double s, const GrassmannMatrix& a) {
    GrassmannMatrix r = a;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r.at(i, j) *= s;
    return r;
}

GrassmannVector operator*(const GrassmannMatrix& a, const GrassmannVector& v) {
    if (a.cols() != static_cast<int>(v.size())) throw algebra_error("matrix-vector shape mismatch");
    const int k = a.at(0, 0).generators();
    GrassmannVector r(a.rows(), GrassmannElement::zero(k));
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r[i] += a.at(i, j) * v[j];
    return r;
}

double max_abs(const GrassmannMatrix& a) {
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m = std::max(m, a.at(i, j).max_abs());
    return m;
}

namespace {

std::vector<double> body_inverse(const GrassmannMatrix& a) {
    const int m = a.rows();
    std::vector<double> aug(m * 2 * m, 0.0);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) aug[i * 2 * m + j] = a.at(i, j).body();
        aug[i * 2 * m + m + i] = 1.0;
    }
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(aug[r * 2 * m + col]) > std::abs(aug[piv * 2 * m + col])) piv = r;
        if (std::abs(aug[piv * 2 * m + col]) < 1e-14)
            throw algebra_error("singular body matrix; endpoint map not invertible");
        if (piv != col)
            for (int j = 0; j < 2 * m; ++j) std::swap(aug[piv * 2 * m + j], aug[col * 2 * m + j]);
        const double d = aug[col * 2 * m + col];
        for (int j = 0; j < 2 * m; ++j) aug[col * 2 * m + j] /= d;
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = aug[r * 2 * m + col];
            if (f == 0.0) continue;
            for (int j = 0; j < 2 * m; ++j) aug[r * 2 * m + j] -= f * aug[col * 2 * m + j];
        }
    }
    std::vector<double> inv(m * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) inv[i * m + j] = aug[i * 2 * m + m + j];
    return inv;
}

}  // namespace

GrassmannMatrix grassmann_inverse(const GrassmannMatrix& a) {
    const int m = a.rows();
    const int k = a.at(0, 0).generators();
    const std::vector<double> binv = body_inverse(a);
    GrassmannMatrix C(m, m, GrassmannElement::zero(k));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) C.at(i, j) = GrassmannElement::scalar(k, binv[i * m + j]);
    // N = C * soul(a) has no body; its Neumann series terminates.
    GrassmannMatrix S(m, m, GrassmannElement::zero(k));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) S.at(i, j) = a.at(i, j).soul();
    const GrassmannMatrix N = C * S;
    GrassmannMatrix series = grassmann_identity(m, k);
    GrassmannMatrix power = grassmann_identity(m, k);
    for (int step = 0; step < k + 1; ++step) {
        power = -1.0 * (power * N);
        if (max_abs(power) == 0.0) break;
        series = series + power;
    }
    return series * C;
}

double body_condition_number(const GrassmannMatrix& a) {
    const int m = a.rows();
    const std::vector<double> binv = body_inverse(a);
    double na = 0.0, ni = 0.0;
    for (int i = 0; i < m; ++i) {
        double ra = 0.0, ri = 0.0;
        for (int j = 0; j < m; ++j) {
            ra += std::abs(a.at(i, j).body());
            ri += std::abs(binv[i * m + j]);
        }
        na = std::max(na, ra);
        ni = std::max(ni, ri);
    }
    return na * ni;
}

GradedConnection::GradedConnection(GradedBundle bundle, FormMatrix A)
    : bundle_(bundle), A_(std::move(A)) {
    const int m = bundle_.rank();
    if (A_.rows() != m || A_.cols() != m) throw algebra_error("connection matrix shape mismatch");
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const auto& w = A_.at(i, j);
            if (w.dim() != bundle_.base_dim) throw algebra_error("connection form dimension mismatch");
            for (const auto& [mask, f] : w.terms())
                if (std::popcount(mask) != 1)
                    throw algebra_error("connection matrix entries must be 1-forms");
        }
}

GradedConnection GradedConnection::flat(GradedBundle bundle) {
    return GradedConnection(bundle,
                            FormMatrix(bundle.rank(), bundle.rank(), DifferentialForm::zero(bundle.base_dim)));
}

bool GradedConnection::is_even(double tol) const {
    const int m = bundle_.rank();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (bundle_.fiber_parity(i) == bundle_.fiber_parity(j)) continue;
            if (A_.at(i, j).max_coeff_abs() > tol) return false;
        }
    return true;
}

SectionM covariant_derivative_M(const GradedConnection& conn, const VectorField& X,
                                const SectionM& s) {
    const int n = conn.bundle().base_dim;
    const int m = conn.bundle().rank();
    if (static_cast<int>(s.size()) != m) throw algebra_error("section rank mismatch");
    SectionM r;
    r.reserve(m);
    for (int a = 0; a < m; ++a) {
        ScalarField v = ScalarField::constant(n, 0.0);
        for (int j = 0; j < n; ++j) v = v + X.component(j) * s[a].partial(j);
        for (int b = 0; b < m; ++b) {
            // <A_ab, X> = sum_l A_ab[dx^l] X^l
            for (int l = 0; l < n; ++l)
                v = v + conn.A().at(a, b).coefficient(std::uint32_t{1} << l) * X.component(l) * s[b];
        }
        r.push_back(std::move(v));
    }
    return r;
}

PiTConnection::PiTConnection(GradedBundle bundle, std::vector<FormMatrix> gamma_lie,
                             std::vector<FormMatrix> gamma_iota)
    : bundle_(bundle), gamma_lie_(std::move(gamma_lie)), gamma_iota_(std::move(gamma_iota)) {
    const int n = bundle_.base_dim;
    if (static_cast<int>(gamma_lie_.size()) != n || static_cast<int>(gamma_iota_.size()) != n)
        throw algebra_error("need one coefficient matrix per coordinate");
}

PiTConnection PiTConnection::pullback(const GradedConnection& conn) {
    const int n = conn.bundle().base_dim;
    const int m = conn.bundle().rank();
    std::vector<FormMatrix> gl(n, FormMatrix(m, m, DifferentialForm::zero(n)));
    std::vector<FormMatrix> gi(n, FormMatrix(m, m, DifferentialForm::zero(n)));
    for (int l = 0; l < n; ++l)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                gl[l].at(a, b) = DifferentialForm::from_scalar(
                    conn.A().at(a, b).coefficient(std::uint32_t{1} << l));
    return PiTConnection(conn.bundle(), std::move(gl), std::move(gi));
}

PiTSection PiTConnection::covariant(const PiTDerivation& V, const PiTSection& s) const {
    const int n = bundle_.base_dim;
    const int m = bundle_.rank();
    if (static_cast<int>(s.size()) != m) throw algebra_error("section rank mismatch");
    PiTSection r;
    r.reserve(m);
    for (int a = 0; a < m; ++a) r.push_back(V.apply(s[a]));
    for (int l = 0; l < n; ++l) {
        const bool has_a = !V.lie_coeff(l).terms().empty();
        const bool has_b = !V.contract_coeff(l).terms().empty();
        if (!has_a && !has_b) continue;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                if (has_a) r[a] += wedge(V.lie_coeff(l), wedge(gamma_lie_[l].at(a, b), s[b]));
                if (has_b) r[a] += wedge(V.contract_coeff(l), wedge(gamma_iota_[l].at(a, b), s[b]));
            }
    }
    return r;
}

PiTSection pullback_pairing(const PiTConnection& conn, const SectionM& s, const PiTDerivation& V) {
    PiTSection sec;
    sec.reserve(s.size());
    for (const auto& f : s) sec.push_back(DifferentialForm::from_scalar(f));
    return conn.covariant(V, sec);
}

namespace {

ScalarField random_poly(int dim, int degree, std::mt19937_64& rng) {
    return ScalarField(random_polynomial(dim, degree, rng));
}

}  // namespace

OddTrivialReport is_odd_trivial(const PiTConnection& conn, std::mt19937_64& rng, int random_probes,
                                double tol) {
    const int n = conn.dim();
    const int m = conn.bundle().rank();
    OddTrivialReport report;

    std::vector<std::pair<std::string, VectorField>> fields;
    for (int l = 0; l < n; ++l) fields.emplace_back("d/dx" + std::to_string(l), VectorField::coordinate(n, l));
    std::vector<std::pair<std::string, SectionM>> sections;
    for (int a = 0; a < m; ++a) {
        SectionM e(m, ScalarField::constant(n, 0.0));
        e[a] = ScalarField::constant(n, 1.0);
        sections.emplace_back("e" + std::to_string(a), std::move(e));
    }
    for (int r = 0; r < random_probes; ++r) {
        std::vector<ScalarField> comps;
        for (int l = 0; l < n; ++l) comps.push_back(random_poly(n, 2, rng));
        fields.emplace_back("random field " + std::to_string(r), VectorField(n, std::move(comps)));
        SectionM sec;
        for (int a = 0; a < m; ++a) sec.push_back(random_poly(n, 2, rng));
        sections.emplace_back("random section " + std::to_string(r), std::move(sec));
    }

    for (const auto& [fname, X] : fields) {
        for (const auto& [sname, s] : sections) {
            const PiTSection iota_val = pullback_pairing(conn, s, PiTDerivation::iota(X));
            const double res1 = max_coeff_abs(iota_val);
            if (res1 > tol) {
                report.odd_trivial = false;
                report.max_residual = std::max(report.max_residual, res1);
                if (report.witness.empty())
                    report.witness = "<nabla(pi^* " + sname + "), iota_{" + fname + "}> != 0";
            }
            const PiTSection lie_val = pullback_pairing(conn, s, PiTDerivation::lie(X));
            double res2 = 0.0;
            for (const auto& comp : lie_val)
                for (const auto& [mask, fcoef] : comp.terms())
                    if (mask != 0) res2 = std::max(res2, fcoef.poly().max_abs_coeff());
            if (res2 > tol) {
                report.odd_trivial = false;
                report.max_residual = std::max(report.max_residual, res2);
                if (report.witness.empty())
                    report.witness =
                        "<nabla(pi^* " + sname + "), L_{" + fname + "}> is not pulled back";
            }
        }
    }
    return report;
}

GradedConnection restrict_connection(const PiTConnection& conn, std::mt19937_64& rng, double tol) {
    const auto report = is_odd_trivial(conn, rng, 8, tol);
    if (!report.odd_trivial)
        throw error("connection is not odd-trivial: " + report.witness);
    const int n = conn.dim();
    const int m = conn.bundle().rank();
    FormMatrix A(m, m, DifferentialForm::zero(n));
    for (int l = 0; l < n; ++l)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                DifferentialForm t(n);
                t.add_term(std::uint32_t{1} << l, conn.gamma_lie(l).at(a, b).coefficient(0));
                A.at(a, b) += t;
            }
    return GradedConnection(conn.bundle(), std::move(A));
}

PiTSection odd_curvature(const PiTConnection& conn, const PiTDerivation& X, const PiTDerivation& Y,
                         const PiTSection& s) {
    if (X.parity() != Parity::Odd || Y.parity() != Parity::Odd)
        throw algebra_error("odd curvature needs odd derivations");
    const PiTSection xy = conn.covariant(X, conn.covariant(Y, s));
    const PiTSection yx = conn.covariant(Y, conn.covariant(X, s));
    const PiTSection br = conn.covariant(graded_bracket(X, Y), s);
    PiTSection r;
    r.reserve(s.size());
    for (std::size_t a = 0; a < s.size(); ++a) r.push_back(xy[a] + yx[a] - br[a]);
    return r;
}

double max_coeff_abs(const PiTSection& s) {
    double m = 0.0;
    for (const auto& w : s) m = std::max(m, w.max_coeff_abs());
    return m;
}

double max_coeff_distance(const PiTSection& a, const PiTSection& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, max_coeff_distance(a[i], b[i]));
    return m;
}

}  // namespace supt
