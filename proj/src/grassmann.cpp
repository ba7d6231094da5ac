#include "supt/grassmann.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace supt {

GrassmannElement::GrassmannElement(int num_generators) : k_(num_generators) {
    if (k_ < 0 || k_ > max_generators)
        throw algebra_error("generator count must be in [0, 8], got " + std::to_string(k_));
    coeff_.assign(std::size_t{1} << k_, 0.0);
}

GrassmannElement GrassmannElement::scalar(int k, double v) {
    GrassmannElement e(k);
    e.coeff_[0] = v;
    return e;
}

GrassmannElement GrassmannElement::generator(int k, int i) {
    if (i < 0 || i >= k) throw algebra_error("generator index out of range");
    GrassmannElement e(k);
    e.coeff_[std::uint32_t{1} << i] = 1.0;
    return e;
}

GrassmannElement GrassmannElement::monomial(int k, std::uint32_t mask, double v) {
    GrassmannElement e(k);
    if (mask >= e.coeff_.size()) throw algebra_error("monomial mask out of range");
    e.coeff_[mask] = v;
    return e;
}

void GrassmannElement::check_compatible(const GrassmannElement& o) const {
    if (k_ != o.k_)
        throw algebra_error("incompatible Grassmann algebras: " + std::to_string(k_) +
                            " vs " + std::to_string(o.k_) + " generators");
}

GrassmannElement GrassmannElement::soul() const {
    GrassmannElement s = *this;
    s.coeff_[0] = 0.0;
    return s;
}

GrassmannElement GrassmannElement::even_part() const {
    GrassmannElement e(k_);
    for (std::uint32_t m = 0; m < coeff_.size(); ++m)
        if (std::popcount(m) % 2 == 0) e.coeff_[m] = coeff_[m];
    return e;
}

GrassmannElement GrassmannElement::odd_part() const {
    GrassmannElement e(k_);
    for (std::uint32_t m = 0; m < coeff_.size(); ++m)
        if (std::popcount(m) % 2 == 1) e.coeff_[m] = coeff_[m];
    return e;
}

bool GrassmannElement::is_even(double tol) const { return odd_part().max_abs() <= tol; }
bool GrassmannElement::is_odd(double tol) const { return even_part().max_abs() <= tol; }
bool GrassmannElement::is_zero(double tol) const { return max_abs() <= tol; }

double GrassmannElement::max_abs() const {
    double m = 0.0;
    for (double c : coeff_) m = std::max(m, std::abs(c));
    return m;
}

GrassmannElement GrassmannElement::embed(int new_k) const {
    if (new_k < k_) throw algebra_error("embed target must not be smaller");
    GrassmannElement e(new_k);
    for (std::uint32_t m = 0; m < coeff_.size(); ++m) e.coeff_[m] = coeff_[m];
    return e;
}

GrassmannElement GrassmannElement::operator-() const {
    GrassmannElement e = *this;
    for (double& c : e.coeff_) c = -c;
    return e;
}

GrassmannElement& GrassmannElement::operator+=(const GrassmannElement& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < coeff_.size(); ++i) coeff_[i] += o.coeff_[i];
    return *this;
}

GrassmannElement& GrassmannElement::operator-=(const GrassmannElement& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < coeff_.size(); ++i) coeff_[i] -= o.coeff_[i];
    return *this;
}

GrassmannElement& GrassmannElement::operator*=(double s) {
    for (double& c : coeff_) c *= s;
    return *this;
}

int GrassmannElement::merge_sign(std::uint32_t a, std::uint32_t b) {
    // Inversions when the ascending monomial of b is appended after a.
    int inv = 0;
    for (std::uint32_t bit = b; bit != 0; bit &= bit - 1) {
        std::uint32_t j = std::countr_zero(bit);
        inv += std::popcount(a >> (j + 1));
    }
    return (inv % 2 == 0) ? 1 : -1;
}

GrassmannElement operator*(const GrassmannElement& a, const GrassmannElement& b) {
    a.check_compatible(b);
    GrassmannElement r(a.k_);
    for (std::uint32_t ma = 0; ma < a.coeff_.size(); ++ma) {
        if (a.coeff_[ma] == 0.0) continue;
        for (std::uint32_t mb = 0; mb < b.coeff_.size(); ++mb) {
            if (b.coeff_[mb] == 0.0) continue;
            if ((ma & mb) != 0) continue;  // repeated generator
            r.coeff_[ma | mb] += GrassmannElement::merge_sign(ma, mb) * a.coeff_[ma] * b.coeff_[mb];
        }
    }
    return r;
}

GrassmannElement GrassmannElement::pow(int m) const {
    GrassmannElement r = scalar(k_, 1.0);
    for (int i = 0; i < m; ++i) r = r * (*this);
    return r;
}

std::pair<GrassmannElement, GrassmannElement> GrassmannElement::split_generator(int gen) const {
    if (gen < 0 || gen >= k_) throw algebra_error("split generator out of range");
    const std::uint32_t bit = std::uint32_t{1} << gen;
    GrassmannElement p(k_), q(k_);
    for (std::uint32_t m = 0; m < coeff_.size(); ++m) {
        if (coeff_[m] == 0.0) continue;
        if ((m & bit) == 0) {
            p.coeff_[m] += coeff_[m];
        } else {
            // gamma_M = sign * gamma_gen * gamma_{M \ gen}; moving gamma_gen to
            // the front crosses the lower-index generators of M.
            const int lower = std::popcount(m & (bit - 1));
            const double sign = (lower % 2 == 0) ? 1.0 : -1.0;
            q.coeff_[m & ~bit] += sign * coeff_[m];
        }
    }
    return {p, q};
}

std::string GrassmannElement::str() const {
    std::ostringstream os;
    bool first = true;
    for (std::uint32_t m = 0; m < coeff_.size(); ++m) {
        if (coeff_[m] == 0.0) continue;
        if (!first) os << " + ";
        os << coeff_[m];
        for (std::uint32_t bit = m; bit != 0; bit &= bit - 1)
            os << "*g" << std::countr_zero(bit);
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

SuperNumber::SuperNumber(GrassmannElement value, Parity parity, double tol)
    : value_(std::move(value)), parity_(parity) {
    const bool ok = (parity_ == Parity::Even) ? value_.is_even(tol) : value_.is_odd(tol);
    if (!ok)
        throw algebra_error("mixed-parity element rejected for declared " +
                            std::string(parity_ == Parity::Even ? "even" : "odd") +
                            " super number");
}

GrassmannHom::GrassmannHom(int k_from, std::vector<GrassmannElement> images)
    : k_from_(k_from), images_(std::move(images)) {
    if (static_cast<int>(images_.size()) != k_from_)
        throw algebra_error("homomorphism needs one image per generator");
    k_to_ = images_.empty() ? 0 : images_[0].generators();
    for (const auto& im : images_) {
        if (im.generators() != k_to_) throw algebra_error("images live in different algebras");
        if (!im.is_odd()) throw algebra_error("generator images must be odd");
    }
}

GrassmannHom GrassmannHom::rename(int k_from, int k_to, const std::vector<int>& target) {
    std::vector<GrassmannElement> images;
    images.reserve(k_from);
    for (int i = 0; i < k_from; ++i) images.push_back(GrassmannElement::generator(k_to, target.at(i)));
    return GrassmannHom(k_from, std::move(images));
}

GrassmannHom GrassmannHom::diagonal(int k_from, int k_to, int target_gen) {
    std::vector<GrassmannElement> images(k_from, GrassmannElement::generator(k_to, target_gen));
    return GrassmannHom(k_from, std::move(images));
}

GrassmannElement GrassmannHom::apply(const GrassmannElement& x) const {
    if (x.generators() != k_from_) throw algebra_error("homomorphism applied to wrong algebra");
    GrassmannElement r(k_to_);
    for (std::uint32_t m = 0; m < x.basis_size(); ++m) {
        const double c = x.coefficient(m);
        if (c == 0.0) continue;
        GrassmannElement term = GrassmannElement::scalar(k_to_, c);
        for (std::uint32_t bit = m; bit != 0; bit &= bit - 1)
            term = term * images_[std::countr_zero(bit)];
        r += term;
    }
    return r;
}

std::pair<GrassmannElement, GrassmannElement> parity_decompose(const GrassmannElement& x) {
    return {x.even_part(), x.odd_part()};
}

GrassmannVector operator+(const GrassmannVector& a, const GrassmannVector& b) {
    GrassmannVector r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

GrassmannVector operator-(const GrassmannVector& a, const GrassmannVector& b) {
    GrassmannVector r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

GrassmannVector operator*(double s, const GrassmannVector& a) {
    GrassmannVector r = a;
    for (auto& x : r) x *= s;
    return r;
}

double max_abs(const GrassmannVector& v) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, x.max_abs());
    return m;
}

}  // namespace supt
