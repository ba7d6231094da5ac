#include "supt/derivations.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace supt {

namespace {

constexpr double kParityTol = 1e-12;

// Terms of the wrong parity are roundoff: strip below tolerance, reject above.
DifferentialForm enforce_parity(const DifferentialForm& w, Parity want, const char* what) {
    DifferentialForm out(w.dim());
    for (const auto& [mask, f] : w.terms()) {
        const Parity p = (std::popcount(mask) % 2 == 0) ? Parity::Even : Parity::Odd;
        if (p == want) {
            out.add_term(mask, f);
            continue;
        }
        if (!f.is_polynomial() || f.poly().max_abs_coeff() > kParityTol)
            throw algebra_error(std::string("parity-inconsistent ") + what + " coefficient");
    }
    return out;
}

}  // namespace

PiTDerivation::PiTDerivation(Parity parity, std::vector<DifferentialForm> lie_coeffs,
                             std::vector<DifferentialForm> contract_coeffs)
    : parity_(parity), a_(std::move(lie_coeffs)), b_(std::move(contract_coeffs)) {
    if (a_.size() != b_.size() || a_.empty())
        throw algebra_error("derivation needs one L- and one iota-coefficient per coordinate");
    dim_ = a_[0].dim();
    const Parity a_parity = parity_;
    const Parity b_parity = parity_ + Parity::Odd;
    for (auto& f : a_) {
        if (f.dim() != dim_) throw algebra_error("derivation coefficient dimension mismatch");
        f = enforce_parity(f, a_parity, "L");
    }
    for (auto& f : b_) {
        if (f.dim() != dim_) throw algebra_error("derivation coefficient dimension mismatch");
        f = enforce_parity(f, b_parity, "iota");
    }
}

PiTDerivation PiTDerivation::zero(int dim, Parity parity) {
    return PiTDerivation(parity, std::vector<DifferentialForm>(dim, DifferentialForm::zero(dim)),
                         std::vector<DifferentialForm>(dim, DifferentialForm::zero(dim)));
}

PiTDerivation PiTDerivation::lie(const VectorField& X) {
    const int n = X.dim();
    std::vector<DifferentialForm> a, b;
    for (int i = 0; i < n; ++i) {
        a.push_back(DifferentialForm::from_scalar(X.component(i)));
        b.push_back(exterior_d(DifferentialForm::from_scalar(X.component(i))));
    }
    return PiTDerivation(Parity::Even, std::move(a), std::move(b));
}

PiTDerivation PiTDerivation::iota(const VectorField& X) {
    const int n = X.dim();
    std::vector<DifferentialForm> a(n, DifferentialForm::zero(n)), b;
    for (int i = 0; i < n; ++i) b.push_back(DifferentialForm::from_scalar(X.component(i)));
    return PiTDerivation(Parity::Odd, std::move(a), std::move(b));
}

PiTDerivation PiTDerivation::exterior(int dim) {
    std::vector<DifferentialForm> a, b(dim, DifferentialForm::zero(dim));
    for (int i = 0; i < dim; ++i) a.push_back(DifferentialForm::dx(dim, i));
    return PiTDerivation(Parity::Odd, std::move(a), std::move(b));
}

DifferentialForm PiTDerivation::apply(const DifferentialForm& w) const {
    if (w.dim() != dim_) throw algebra_error("derivation applied in wrong dimension");
    DifferentialForm r(dim_);
    for (int i = 0; i < dim_; ++i) {
        if (!a_[i].terms().empty())
            r += wedge(a_[i], lie_derivative(VectorField::coordinate(dim_, i), w));
        if (!b_[i].terms().empty())
            r += wedge(b_[i], contract(VectorField::coordinate(dim_, i), w));
    }
    return r;
}

PiTDerivation operator*(const DifferentialForm& w, const PiTDerivation& V) {
    const auto p = w.parity();
    if (!p) throw algebra_error("coefficient form must have homogeneous parity");
    std::vector<DifferentialForm> a, b;
    for (int i = 0; i < V.dim_; ++i) {
        a.push_back(wedge(w, V.a_[i]));
        b.push_back(wedge(w, V.b_[i]));
    }
    return PiTDerivation(V.parity_ + *p, std::move(a), std::move(b));
}

PiTDerivation operator+(const PiTDerivation& V, const PiTDerivation& W) {
    if (V.parity_ != W.parity_) throw algebra_error("cannot add derivations of different parity");
    std::vector<DifferentialForm> a, b;
    for (int i = 0; i < V.dim_; ++i) {
        a.push_back(V.a_[i] + W.a_[i]);
        b.push_back(V.b_[i] + W.b_[i]);
    }
    return PiTDerivation(V.parity_, std::move(a), std::move(b));
}

PiTDerivation operator*(double s, const PiTDerivation& V) {
    std::vector<DifferentialForm> a, b;
    for (int i = 0; i < V.dim_; ++i) {
        a.push_back(V.a_[i] * s);
        b.push_back(V.b_[i] * s);
    }
    return PiTDerivation(V.parity_, std::move(a), std::move(b));
}

bool PiTDerivation::is_zero(double tol) const { return max_coeff_abs() <= tol; }

double PiTDerivation::max_coeff_abs() const {
    double m = 0.0;
    for (const auto& f : a_) m = std::max(m, f.max_coeff_abs());
    for (const auto& f : b_) m = std::max(m, f.max_coeff_abs());
    return m;
}

PiTDerivation graded_bracket(const PiTDerivation& V, const PiTDerivation& W) {
    if (V.dim() != W.dim()) throw algebra_error("bracket dimension mismatch");
    const int n = V.dim();
    const bool anticommute = V.parity() == Parity::Odd && W.parity() == Parity::Odd;
    const double sign = anticommute ? 1.0 : -1.0;
    std::vector<DifferentialForm> a, b;
    for (int i = 0; i < n; ++i) {
        a.push_back(V.apply(W.lie_coeff(i)) + W.apply(V.lie_coeff(i)) * sign);
        b.push_back(V.apply(W.contract_coeff(i)) + W.apply(V.contract_coeff(i)) * sign);
    }
    return PiTDerivation(V.parity() + W.parity(), std::move(a), std::move(b));
}

PiTDerivation derivation_square(const PiTDerivation& V) {
    if (V.parity() != Parity::Odd) throw algebra_error("square is for odd derivations");
    const int n = V.dim();
    std::vector<DifferentialForm> a, b;
    for (int i = 0; i < n; ++i) {
        a.push_back(V.apply(V.lie_coeff(i)));
        b.push_back(V.apply(V.contract_coeff(i)));
    }
    return PiTDerivation(Parity::Even, std::move(a), std::move(b));
}

PiTDerivation decompose_derivation(const RawDerivation& raw, double tol) {
    PiTDerivation V(raw.parity, raw.images_x, raw.images_dx);
    if (raw.action) {
        const int n = V.dim();
        // Leibniz spot checks on coordinate products.
        std::vector<DifferentialForm> probes;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const auto xi = DifferentialForm::from_scalar(ScalarField::coordinate(n, i));
                probes.push_back(wedge(xi, DifferentialForm::from_scalar(ScalarField::coordinate(n, j))));
                probes.push_back(wedge(xi, DifferentialForm::dx(n, j)));
                probes.push_back(wedge(DifferentialForm::dx(n, i), DifferentialForm::dx(n, j)));
            }
        for (const auto& w : probes) {
            const double err = max_coeff_distance(raw.action(w), V.apply(w));
            if (err > tol)
                throw algebra_error("raw derivation violates Leibniz consistency (probe residual " +
                                    std::to_string(err) + ")");
        }
    }
    return V;
}

SuperForm::SuperForm(int dim, std::vector<int> theta_gens)
    : dim_(dim), gens_(std::move(theta_gens)) {
    for (std::size_t i = 1; i < gens_.size(); ++i)
        if (gens_[i] <= gens_[i - 1])
            throw algebra_error("theta generators must be strictly ascending");
}

SuperForm SuperForm::from_form(const DifferentialForm& w, std::vector<int> theta_gens) {
    SuperForm s(w.dim(), std::move(theta_gens));
    s.add_part(0, w);
    return s;
}

DifferentialForm SuperForm::part(std::uint32_t theta_mask) const {
    auto it = parts_.find(theta_mask);
    if (it == parts_.end()) return DifferentialForm::zero(dim_);
    return it->second;
}

void SuperForm::add_part(std::uint32_t theta_mask, const DifferentialForm& w) {
    if (theta_mask >= (std::uint32_t{1} << gens_.size()))
        throw algebra_error("theta mask out of range");
    auto it = parts_.find(theta_mask);
    if (it == parts_.end())
        parts_.emplace(theta_mask, w);
    else
        it->second += w;
    it = parts_.find(theta_mask);
    bool prune = true;
    for (const auto& [m, f] : it->second.terms())
        if (!f.is_polynomial() || !f.is_zero()) prune = false;
    if (prune) parts_.erase(it);
}

SuperForm SuperForm::operator-() const {
    SuperForm r(dim_, gens_);
    for (const auto& [m, w] : parts_) r.parts_.emplace(m, -w);
    return r;
}

SuperForm& SuperForm::operator+=(const SuperForm& o) {
    if (dim_ != o.dim_ || gens_ != o.gens_) throw algebra_error("super form shape mismatch");
    for (const auto& [m, w] : o.parts_) add_part(m, w);
    return *this;
}

SuperForm operator*(const SuperForm& a, const SuperForm& b) {
    if (a.dim_ != b.dim_ || a.gens_ != b.gens_) throw algebra_error("super form shape mismatch");
    SuperForm r(a.dim_, a.gens_);
    for (const auto& [ta, wa] : a.parts_)
        for (const auto& [tb, wb] : b.parts_) {
            if ((ta & tb) != 0) continue;
            const int theta_sign = GrassmannElement::merge_sign(ta, tb);
            const int nb = std::popcount(tb);
            // theta_B crosses each form term of wa: sign (-1)^{|term| * |B|}.
            for (const auto& [ma, fa] : wa.terms()) {
                const int cross = (std::popcount(ma) * nb) % 2 == 0 ? 1 : -1;
                for (const auto& [mb, fb] : wb.terms()) {
                    if ((ma & mb) != 0) continue;
                    const int form_sign = GrassmannElement::merge_sign(ma, mb);
                    DifferentialForm t(a.dim_);
                    t.add_term(ma | mb, (fa * fb) * (theta_sign * cross * form_sign));
                    r.add_part(ta | tb, t);
                }
            }
        }
    return r;
}

SuperForm SuperForm::map_coefficients(
    const std::function<DifferentialForm(const DifferentialForm&)>& fn) const {
    SuperForm r(dim_, gens_);
    for (const auto& [m, w] : parts_) r.add_part(m, fn(w));
    return r;
}

SuperForm SuperForm::substitute_thetas(const GrassmannHom& hom, std::vector<int> new_gens) const {
    SuperForm r(dim_, new_gens);
    const int k_from = hom.source_generators();
    for (const auto& [mask, w] : parts_) {
        // Ambient monomial of the theta slots in this part.
        GrassmannElement mono = GrassmannElement::scalar(k_from, 1.0);
        for (std::uint32_t bit = mask; bit != 0; bit &= bit - 1)
            mono = mono * GrassmannElement::generator(k_from, gens_[std::countr_zero(bit)]);
        const GrassmannElement image = hom.apply(mono);
        for (std::uint32_t t = 0; t < image.basis_size(); ++t) {
            const double c = image.coefficient(t);
            if (c == 0.0) continue;
            // Translate the ambient target mask into new slot indices.
            std::uint32_t slot_mask = 0;
            for (std::uint32_t bit = t; bit != 0; bit &= bit - 1) {
                const int g = std::countr_zero(bit);
                auto it = std::find(new_gens.begin(), new_gens.end(), g);
                if (it == new_gens.end())
                    throw algebra_error("substitution image leaves the new theta span");
                slot_mask |= std::uint32_t{1} << (it - new_gens.begin());
            }
            r.add_part(slot_mask, w * c);
        }
    }
    return r;
}

GrassmannElement SuperForm::eval_grassmann(const GrassmannVector& x, const GrassmannVector& xi,
                                           int ambient_k) const {
    GrassmannElement r(ambient_k);
    for (const auto& [mask, w] : parts_) {
        GrassmannElement mono = GrassmannElement::scalar(ambient_k, 1.0);
        for (std::uint32_t bit = mask; bit != 0; bit &= bit - 1)
            mono = mono * GrassmannElement::generator(ambient_k, gens_[std::countr_zero(bit)]);
        r += mono * w.eval_grassmann(x, xi);
    }
    return r;
}

bool SuperForm::is_zero(double tol) const { return max_coeff_abs() <= tol; }

double SuperForm::max_coeff_abs() const {
    double m = 0.0;
    for (const auto& [mask, w] : parts_) m = std::max(m, w.max_coeff_abs());
    return m;
}

double max_coeff_distance(const SuperForm& a, const SuperForm& b) {
    return (a - b).max_coeff_abs();
}

}  // namespace supt
