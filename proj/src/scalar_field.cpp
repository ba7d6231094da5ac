#include "supt/scalar_field.hpp"

#include <algorithm>
#include <cmath>

namespace supt {

Polynomial Polynomial::constant(int dim, double c) {
    Polynomial p(dim);
    p.add_term(std::vector<int>(dim, 0), c);
    return p;
}

Polynomial Polynomial::coordinate(int dim, int i) {
    if (i < 0 || i >= dim) throw algebra_error("coordinate index out of range");
    Polynomial p(dim);
    std::vector<int> e(dim, 0);
    e[i] = 1;
    p.add_term(e, 1.0);
    return p;
}

bool Polynomial::is_zero(double tol) const { return max_abs_coeff() <= tol; }

double Polynomial::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

int Polynomial::total_degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
        int s = 0;
        for (int k : e) s += k;
        d = std::max(d, s);
    }
    return d;
}

void Polynomial::add_term(const std::vector<int>& exponents, double c) {
    if (static_cast<int>(exponents.size()) != dim_)
        throw algebra_error("exponent vector length mismatch");
    if (c == 0.0) return;
    auto it = terms_.find(exponents);
    if (it == terms_.end()) {
        terms_.emplace(exponents, c);
    } else {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

Polynomial Polynomial::operator-() const {
    Polynomial r(dim_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    if (dim_ != o.dim_) throw algebra_error("polynomial dimension mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    if (dim_ != o.dim_) throw algebra_error("polynomial dimension mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.dim_ != b.dim_) throw algebra_error("polynomial dimension mismatch");
    Polynomial r(a.dim_);
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) {
            std::vector<int> e(a.dim_);
            for (int i = 0; i < a.dim_; ++i) e[i] = ea[i] + eb[i];
            r.add_term(e, ca * cb);
        }
    return r;
}

Polynomial operator*(Polynomial a, double s) {
    if (s == 0.0) return Polynomial(a.dim_);
    for (auto& [e, c] : a.terms_) c *= s;
    return a;
}

Polynomial Polynomial::partial(int i) const {
    Polynomial r(dim_);
    for (const auto& [e, c] : terms_) {
        if (e[i] == 0) continue;
        std::vector<int> d = e;
        d[i] -= 1;
        r.add_term(d, c * e[i]);
    }
    return r;
}

double Polynomial::eval(const std::vector<double>& x) const {
    double r = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c;
        for (int i = 0; i < dim_; ++i)
            for (int k = 0; k < e[i]; ++k) t *= x[i];
        r += t;
    }
    return r;
}

std::string Polynomial::str() const {
    std::string s;
    for (const auto& [e, c] : terms_) {
        if (!s.empty()) s += " + ";
        s += std::to_string(c);
        for (int i = 0; i < dim_; ++i)
            if (e[i] > 0) {
                s += "*x" + std::to_string(i);
                if (e[i] > 1) s += "^" + std::to_string(e[i]);
            }
    }
    return s.empty() ? "0" : s;
}

GrassmannElement Polynomial::eval_grassmann(const GrassmannVector& x) const {
    if (static_cast<int>(x.size()) != dim_) throw algebra_error("argument count mismatch");
    const int k = x.empty() ? 0 : x[0].generators();
    GrassmannElement r(k);
    for (const auto& [e, c] : terms_) {
        GrassmannElement t = GrassmannElement::scalar(k, c);
        for (int i = 0; i < dim_; ++i)
            for (int m = 0; m < e[i]; ++m) t = t * x[i];
        r += t;
    }
    return r;
}

ScalarField ScalarField::from_super_evaluator(int dim, int order, SuperEvaluator fn,
                                              DomainPredicate domain) {
    ScalarField f;
    f.dim_ = dim;
    f.rep_ = Oracle{order, std::move(fn), std::move(domain)};
    return f;
}

ScalarField ScalarField::from_pointwise(int dim, int order, PointEvaluator f, PartialOracle partials,
                                        DomainPredicate domain) {
    auto fn = [dim, order, f, partials, domain](const GrassmannVector& x) {
        return taylor_super_eval(dim, order, f, partials, domain, x);
    };
    return from_super_evaluator(dim, order, std::move(fn), domain);
}

const Polynomial& ScalarField::poly() const {
    if (!is_polynomial()) throw oracle_error("field has no polynomial representation");
    return std::get<Polynomial>(rep_);
}

int ScalarField::derivative_order() const {
    if (is_polynomial()) return std::numeric_limits<int>::max();
    return std::get<Oracle>(rep_).order;
}

double ScalarField::eval(const std::vector<double>& x) const {
    if (is_polynomial()) return poly().eval(x);
    const auto& o = std::get<Oracle>(rep_);
    if (o.domain && !o.domain(x)) throw oracle_error("evaluation point outside field domain");
    GrassmannVector gx;
    gx.reserve(x.size());
    for (double v : x) gx.push_back(GrassmannElement::scalar(0, v));
    return o.fn(gx).body();
}

GrassmannElement ScalarField::eval_grassmann(const GrassmannVector& x) const {
    if (is_polynomial()) return poly().eval_grassmann(x);
    const auto& o = std::get<Oracle>(rep_);
    if (o.domain) {
        std::vector<double> body(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) body[i] = x[i].body();
        if (!o.domain(body)) throw oracle_error("evaluation body outside field domain");
    }
    return o.fn(x);
}

ScalarField ScalarField::partial(int i) const {
    if (i < 0 || i >= dim_) throw algebra_error("partial index out of range");
    if (is_polynomial()) return ScalarField(poly().partial(i));
    const auto& o = std::get<Oracle>(rep_);
    if (o.order < 1) throw oracle_error("derivative oracle exhausted (declared order 0)");
    // Seed x_i with an even nilpotent on two fresh generators and read the
    // first-order Taylor coefficient back off.
    auto parent = o.fn;
    auto fn = [i, parent](const GrassmannVector& x) {
        const int k = x.empty() ? 0 : x[0].generators();
        if (k + 2 > GrassmannElement::max_generators)
            throw oracle_error("no room for derivative seeding generators");
        GrassmannVector ext;
        ext.reserve(x.size());
        for (const auto& v : x) ext.push_back(v.embed(k + 2));
        const GrassmannElement seed =
            GrassmannElement::generator(k + 2, k) * GrassmannElement::generator(k + 2, k + 1);
        ext[i] += seed;
        const GrassmannElement val = parent(ext);
        // Coefficient of gamma_k*gamma_{k+1}: the seed pair sits above all
        // ambient generators, so extraction needs no sign.
        GrassmannElement out(k);
        const std::uint32_t pair_mask = (std::uint32_t{3}) << k;
        for (std::uint32_t m = 0; m < (std::uint32_t{1} << k); ++m)
            out.set_coefficient(m, val.coefficient(m | pair_mask));
        return out;
    };
    return from_super_evaluator(dim_, o.order - 1, std::move(fn), o.domain);
}

std::string ScalarField::str() const {
    if (is_polynomial()) return poly().str();
    return "<oracle field>";
}

bool ScalarField::is_zero(double tol) const {
    if (!is_polynomial()) throw oracle_error("zero test requires polynomial representation");
    return poly().is_zero(tol);
}

ScalarField ScalarField::operator-() const {
    if (is_polynomial()) return ScalarField(-poly());
    return *this * (-1.0);
}

void ScalarField::check_same_dim(const ScalarField& a, const ScalarField& b) {
    if (a.dim_ != b.dim_) throw algebra_error("scalar field dimension mismatch");
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    ScalarField::check_same_dim(a, b);
    if (a.is_polynomial() && b.is_polynomial()) return ScalarField(a.poly() + b.poly());
    const int order = std::min(a.derivative_order(), b.derivative_order());
    return ScalarField::from_super_evaluator(
        a.dim(), order,
        [a, b](const GrassmannVector& x) { return a.eval_grassmann(x) + b.eval_grassmann(x); });
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) { return a + (-b); }

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    ScalarField::check_same_dim(a, b);
    if (a.is_polynomial() && b.is_polynomial()) return ScalarField(a.poly() * b.poly());
    const int order = std::min(a.derivative_order(), b.derivative_order());
    return ScalarField::from_super_evaluator(
        a.dim(), order,
        [a, b](const GrassmannVector& x) { return a.eval_grassmann(x) * b.eval_grassmann(x); });
}

ScalarField operator*(const ScalarField& a, double s) {
    if (a.is_polynomial()) return ScalarField(a.poly() * s);
    return ScalarField::from_super_evaluator(
        a.dim(), a.derivative_order(),
        [a, s](const GrassmannVector& x) { return a.eval_grassmann(x) * s; });
}

GrassmannElement taylor_super_eval(int dim, int order, const ScalarField::PointEvaluator& f,
                                   const ScalarField::PartialOracle& partials,
                                   const ScalarField::DomainPredicate& domain,
                                   const GrassmannVector& x) {
    if (static_cast<int>(x.size()) != dim) throw algebra_error("argument count mismatch");
    const int k = x.empty() ? 0 : x[0].generators();
    std::vector<double> body(dim);
    GrassmannVector soul;
    soul.reserve(dim);
    for (int i = 0; i < dim; ++i) {
        body[i] = x[i].body();
        soul.push_back(x[i].soul());
    }
    if (domain && !domain(body)) throw oracle_error("evaluation body outside field domain");

    GrassmannElement r = GrassmannElement::scalar(k, f(body));
    // Terms of the multivariate Taylor expansion, grouped by total order;
    // stop once every soul monomial of the current order vanishes.
    std::vector<std::pair<std::vector<int>, GrassmannElement>> layer;
    layer.emplace_back(std::vector<int>(dim, 0), GrassmannElement::scalar(k, 1.0));
    for (int m = 1;; ++m) {
        std::vector<std::pair<std::vector<int>, GrassmannElement>> next;
        for (const auto& [alpha, prod] : layer) {
            // Extend by one factor, keeping multi-indices canonical (only grow
            // at or after the last touched coordinate).
            int start = 0;
            for (int i = dim - 1; i >= 0; --i)
                if (alpha[i] > 0) {
                    start = i;
                    break;
                }
            for (int i = start; i < dim; ++i) {
                GrassmannElement p = prod * soul[i];
                if (p.is_zero()) continue;
                std::vector<int> a = alpha;
                a[i] += 1;
                next.emplace_back(std::move(a), std::move(p));
            }
        }
        if (next.empty()) break;
        if (m > order)
            throw oracle_error("derivative oracle unavailable at required order " +
                               std::to_string(m));
        for (const auto& [alpha, prod] : next) {
            double fact = 1.0;
            for (int i = 0; i < dim; ++i)
                for (int j = 2; j <= alpha[i]; ++j) fact *= j;
            r += prod * (partials(alpha, body) / fact);
        }
        layer = std::move(next);
    }
    return r;
}

GrassmannElement super_eval(const ScalarField& f, const std::vector<SuperNumber>& args) {
    GrassmannVector x;
    x.reserve(args.size());
    for (const auto& a : args) {
        if (a.parity() != Parity::Even)
            throw algebra_error("super evaluation requires even arguments");
        x.push_back(a.value());
    }
    return f.eval_grassmann(x);
}

}  // namespace supt
