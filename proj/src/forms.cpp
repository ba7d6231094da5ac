#include "supt/forms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace supt {

VectorField::VectorField(int dim, std::vector<ScalarField> components)
    : dim_(dim), comps_(std::move(components)) {
    if (static_cast<int>(comps_.size()) != dim_)
        throw algebra_error("vector field needs one component per dimension");
    for (const auto& c : comps_)
        if (c.dim() != dim_) throw algebra_error("component dimension mismatch");
}

VectorField VectorField::zero(int dim) {
    return VectorField(dim, std::vector<ScalarField>(dim, ScalarField::constant(dim, 0.0)));
}

VectorField VectorField::coordinate(int dim, int i) {
    auto comps = std::vector<ScalarField>(dim, ScalarField::constant(dim, 0.0));
    comps[i] = ScalarField::constant(dim, 1.0);
    return VectorField(dim, std::move(comps));
}

GrassmannVector VectorField::eval_grassmann(const GrassmannVector& x) const {
    GrassmannVector r;
    r.reserve(dim_);
    for (const auto& c : comps_) r.push_back(c.eval_grassmann(x));
    return r;
}

std::vector<double> VectorField::eval(const std::vector<double>& x) const {
    std::vector<double> r;
    r.reserve(dim_);
    for (const auto& c : comps_) r.push_back(c.eval(x));
    return r;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    if (a.dim_ != b.dim_) throw algebra_error("vector field dimension mismatch");
    std::vector<ScalarField> comps;
    comps.reserve(a.dim_);
    for (int i = 0; i < a.dim_; ++i) comps.push_back(a.comps_[i] + b.comps_[i]);
    return VectorField(a.dim_, std::move(comps));
}

VectorField operator*(const ScalarField& f, const VectorField& X) {
    std::vector<ScalarField> comps;
    comps.reserve(X.dim_);
    for (int i = 0; i < X.dim_; ++i) comps.push_back(f * X.comps_[i]);
    return VectorField(X.dim_, std::move(comps));
}

VectorField operator*(double s, const VectorField& X) {
    std::vector<ScalarField> comps;
    comps.reserve(X.dim_);
    for (int i = 0; i < X.dim_; ++i) comps.push_back(X.comps_[i] * s);
    return VectorField(X.dim_, std::move(comps));
}

VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
    if (X.dim() != Y.dim()) throw algebra_error("vector field dimension mismatch");
    const int n = X.dim();
    std::vector<ScalarField> comps;
    comps.reserve(n);
    for (int i = 0; i < n; ++i) {
        ScalarField c = ScalarField::constant(n, 0.0);
        for (int j = 0; j < n; ++j)
            c = c + X.component(j) * Y.component(i).partial(j) -
                Y.component(j) * X.component(i).partial(j);
        comps.push_back(std::move(c));
    }
    return VectorField(n, std::move(comps));
}

DifferentialForm DifferentialForm::from_scalar(ScalarField f) {
    DifferentialForm w(f.dim());
    w.add_term(0, f);
    return w;
}

DifferentialForm DifferentialForm::constant(int dim, double c) {
    return from_scalar(ScalarField::constant(dim, c));
}

DifferentialForm DifferentialForm::dx(int dim, int i) {
    if (i < 0 || i >= dim) throw algebra_error("dx index out of range");
    DifferentialForm w(dim);
    w.add_term(std::uint32_t{1} << i, ScalarField::constant(dim, 1.0));
    return w;
}

void DifferentialForm::add_term(std::uint32_t mask, const ScalarField& f) {
    if (f.dim() != dim_) throw algebra_error("coefficient dimension mismatch");
    if (mask >= (std::uint32_t{1} << dim_)) throw algebra_error("index tuple out of range");
    auto it = terms_.find(mask);
    if (it == terms_.end()) {
        terms_.emplace(mask, f);
    } else {
        it->second = it->second + f;
    }
    // Drop exact-zero polynomial terms to keep the representation normalized.
    it = terms_.find(mask);
    if (it->second.is_polynomial() && it->second.is_zero()) terms_.erase(it);
}

ScalarField DifferentialForm::coefficient(std::uint32_t mask) const {
    auto it = terms_.find(mask);
    if (it == terms_.end()) return ScalarField::constant(dim_, 0.0);
    return it->second;
}

bool DifferentialForm::is_homogeneous_degree() const {
    int d = -1;
    for (const auto& [m, f] : terms_) {
        if (d < 0) d = std::popcount(m);
        else if (std::popcount(m) != d) return false;
    }
    return true;
}

int DifferentialForm::degree() const {
    int d = 0;
    for (const auto& [m, f] : terms_) d = std::max(d, std::popcount(m));
    return d;
}

std::optional<Parity> DifferentialForm::parity() const {
    std::optional<Parity> p;
    for (const auto& [m, f] : terms_) {
        const Parity q = (std::popcount(m) % 2 == 0) ? Parity::Even : Parity::Odd;
        if (!p) p = q;
        else if (*p != q) return std::nullopt;
    }
    if (!p) return Parity::Even;  // zero form
    return p;
}

bool DifferentialForm::is_zero(double tol) const { return max_coeff_abs() <= tol; }

double DifferentialForm::max_coeff_abs() const {
    double m = 0.0;
    for (const auto& [mask, f] : terms_) m = std::max(m, f.poly().max_abs_coeff());
    return m;
}

GrassmannElement DifferentialForm::eval_grassmann(const GrassmannVector& x,
                                                  const GrassmannVector& xi) const {
    if (static_cast<int>(xi.size()) != dim_) throw algebra_error("xi count mismatch");
    const int k = x.empty() ? (xi.empty() ? 0 : xi[0].generators()) : x[0].generators();
    GrassmannElement r(k);
    for (const auto& [mask, f] : terms_) {
        GrassmannElement t = f.eval_grassmann(x);
        for (std::uint32_t bit = mask; bit != 0; bit &= bit - 1)
            t = t * xi[std::countr_zero(bit)];
        r += t;
    }
    return r;
}

std::string DifferentialForm::str() const {
    std::string s;
    for (const auto& [mask, f] : terms_) {
        if (!s.empty()) s += " + ";
        s += "(" + f.str() + ")";
        for (std::uint32_t bit = mask; bit != 0; bit &= bit - 1)
            s += " dx" + std::to_string(std::countr_zero(bit));
    }
    return s.empty() ? "0" : s;
}

DifferentialForm DifferentialForm::operator-() const {
    DifferentialForm r(dim_);
    for (const auto& [m, f] : terms_) r.terms_.emplace(m, -f);
    return r;
}

DifferentialForm& DifferentialForm::operator+=(const DifferentialForm& o) {
    if (dim_ != o.dim_) throw algebra_error("form dimension mismatch");
    for (const auto& [m, f] : o.terms_) add_term(m, f);
    return *this;
}

DifferentialForm& DifferentialForm::operator-=(const DifferentialForm& o) {
    if (dim_ != o.dim_) throw algebra_error("form dimension mismatch");
    for (const auto& [m, f] : o.terms_) add_term(m, -f);
    return *this;
}

DifferentialForm operator*(const DifferentialForm& a, double s) {
    DifferentialForm r(a.dim_);
    for (const auto& [m, f] : a.terms_) r.add_term(m, f * s);
    return r;
}

DifferentialForm operator*(const ScalarField& f, const DifferentialForm& a) {
    DifferentialForm r(a.dim_);
    for (const auto& [m, g] : a.terms_) r.add_term(m, f * g);
    return r;
}

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
    if (a.dim() != b.dim()) throw algebra_error("wedge dimension mismatch");
    DifferentialForm r(a.dim());
    for (const auto& [ma, fa] : a.terms())
        for (const auto& [mb, fb] : b.terms()) {
            if ((ma & mb) != 0) continue;
            const double sign = GrassmannElement::merge_sign(ma, mb);
            r.add_term(ma | mb, (fa * fb) * sign);
        }
    return r;
}

DifferentialForm exterior_d(const DifferentialForm& w) {
    const int n = w.dim();
    DifferentialForm r(n);
    for (const auto& [mask, f] : w.terms()) {
        for (int i = 0; i < n; ++i) {
            const std::uint32_t bit = std::uint32_t{1} << i;
            if (mask & bit) continue;
            // dx^i goes in front: sign of moving it into ascending position.
            const double sign = GrassmannElement::merge_sign(bit, mask);
            r.add_term(bit | mask, f.partial(i) * sign);
        }
    }
    return r;
}

DifferentialForm contract(const VectorField& X, const DifferentialForm& w) {
    if (X.dim() != w.dim()) throw algebra_error("contraction dimension mismatch");
    DifferentialForm r(w.dim());
    for (const auto& [mask, f] : w.terms()) {
        int pos = 0;
        for (std::uint32_t bit = mask; bit != 0; bit &= bit - 1, ++pos) {
            const int i = std::countr_zero(bit);
            const std::uint32_t low = std::uint32_t{1} << i;
            const double sign = (pos % 2 == 0) ? 1.0 : -1.0;
            r.add_term(mask & ~low, (f * X.component(i)) * sign);
        }
    }
    return r;
}

DifferentialForm lie_derivative(const VectorField& X, const DifferentialForm& w) {
    if (X.dim() != w.dim()) throw algebra_error("Lie derivative dimension mismatch");
    const int n = w.dim();
    DifferentialForm r(n);
    for (const auto& [mask, f] : w.terms()) {
        // X(f) dx_I
        ScalarField xf = ScalarField::constant(n, 0.0);
        for (int j = 0; j < n; ++j) xf = xf + X.component(j) * f.partial(j);
        r.add_term(mask, xf);
        // f dx_{i1} ^ ... ^ dX^{i_s} ^ ... ^ dx_{ip}
        int pos = 0;
        for (std::uint32_t bit = mask; bit != 0; bit &= bit - 1, ++pos) {
            const int i = std::countr_zero(bit);
            const std::uint32_t rest = mask & ~(std::uint32_t{1} << i);
            for (int j = 0; j < n; ++j) {
                const std::uint32_t jbit = std::uint32_t{1} << j;
                if (rest & jbit) continue;
                // Replace slot `pos` by dx^j: remove dx^i (sign from its slot)
                // then merge dx^j back in ascending order.
                const double s1 = (pos % 2 == 0) ? 1.0 : -1.0;
                const double s2 = GrassmannElement::merge_sign(jbit, rest);
                r.add_term(rest | jbit, (f * X.component(i).partial(j)) * (s1 * s2));
            }
        }
    }
    return r;
}

DifferentialForm pi_pullback(const ScalarField& f) { return DifferentialForm::from_scalar(f); }

ScalarField i_restrict(const DifferentialForm& w) { return w.coefficient(0); }

double max_coeff_distance(const DifferentialForm& a, const DifferentialForm& b) {
    return (a - b).max_coeff_abs();
}

}  // namespace supt
