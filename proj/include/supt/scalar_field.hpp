#pragma once

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "supt/grassmann.hpp"

namespace supt {

// Normalized multivariate polynomial: exponent vector -> coefficient,
// zero terms erased.
class Polynomial {
public:
    explicit Polynomial(int dim) : dim_(dim) {}

    static Polynomial constant(int dim, double c);
    static Polynomial coordinate(int dim, int i);

    int dim() const { return dim_; }
    const std::map<std::vector<int>, double>& terms() const { return terms_; }
    bool is_zero(double tol = 0.0) const;
    double max_abs_coeff() const;
    int total_degree() const;

    void add_term(const std::vector<int>& exponents, double c);

    Polynomial operator-() const;
    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(Polynomial a, double s);
    friend Polynomial operator*(double s, Polynomial a) { return std::move(a) * s; }

    Polynomial partial(int i) const;
    double eval(const std::vector<double>& x) const;
    GrassmannElement eval_grassmann(const GrassmannVector& x) const;

    std::string str() const;

private:
    int dim_;
    std::map<std::vector<int>, double> terms_;
};

// Scalar field on R^n: either an exact polynomial or an opaque evaluator over
// Grassmann arguments with a declared derivative order (partials are obtained
// by nilpotent seeding).
class ScalarField {
public:
    using SuperEvaluator = std::function<GrassmannElement(const GrassmannVector&)>;
    using PointEvaluator = std::function<double(const std::vector<double>&)>;
    using PartialOracle = std::function<double(const std::vector<int>&, const std::vector<double>&)>;
    using DomainPredicate = std::function<bool(const std::vector<double>&)>;

    ScalarField() : dim_(0), rep_(Polynomial(0)) {}
    /* implicit */ ScalarField(Polynomial p) : dim_(p.dim()), rep_(std::move(p)) {}

    static ScalarField constant(int dim, double c) { return ScalarField(Polynomial::constant(dim, c)); }
    static ScalarField coordinate(int dim, int i) { return ScalarField(Polynomial::coordinate(dim, i)); }

    // Opaque field that can itself be evaluated on Grassmann arguments.
    static ScalarField from_super_evaluator(int dim, int order, SuperEvaluator fn,
                                            DomainPredicate domain = nullptr);
    // Opaque field defined by point values and a partial-derivative oracle;
    // super evaluation is the Taylor expansion about the body truncated by
    // nilpotency.
    static ScalarField from_pointwise(int dim, int order, PointEvaluator f, PartialOracle partials,
                                      DomainPredicate domain = nullptr);

    int dim() const { return dim_; }
    bool is_polynomial() const { return std::holds_alternative<Polynomial>(rep_); }
    const Polynomial& poly() const;
    int derivative_order() const;  // INT_MAX for polynomials

    double eval(const std::vector<double>& x) const;
    GrassmannElement eval_grassmann(const GrassmannVector& x) const;

    ScalarField partial(int i) const;
    std::string str() const;

    bool is_zero(double tol = 0.0) const;  // polynomial representation only

    ScalarField operator-() const;
    friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator*(const ScalarField& a, double s);
    friend ScalarField operator*(double s, const ScalarField& a) { return a * s; }

private:
    struct Oracle {
        int order = 0;
        SuperEvaluator fn;
        DomainPredicate domain;
    };

    int dim_;
    std::variant<Polynomial, Oracle> rep_;

    static void check_same_dim(const ScalarField& a, const ScalarField& b);
};

// Taylor evaluation of an opaque field at even Grassmann arguments; requires
// partials up to the order at which soul powers vanish, else oracle_error.
GrassmannElement taylor_super_eval(int dim, int order, const ScalarField::PointEvaluator& f,
                                   const ScalarField::PartialOracle& partials,
                                   const ScalarField::DomainPredicate& domain,
                                   const GrassmannVector& x);

// Evaluation of a field at a vector of even super numbers (the classical value
// plus nilpotent corrections).
GrassmannElement super_eval(const ScalarField& f, const std::vector<SuperNumber>& args);

// Dense random polynomial of total degree <= degree with half-integer
// coefficients in [-2, 2]; identities on these hold to roundoff.
template <typename Rng>
Polynomial random_polynomial(int dim, int degree, Rng& rng) {
    Polynomial p(dim);
    std::vector<int> e(dim, 0);
    auto coeff = [&rng]() { return static_cast<double>(static_cast<int>(rng() % 9) - 4) * 0.5; };
    std::function<void(int, int)> rec = [&](int i, int remaining) {
        if (i == dim) {
            p.add_term(e, coeff());
            return;
        }
        for (int d = 0; d <= remaining; ++d) {
            e[i] = d;
            rec(i + 1, remaining - d);
        }
        e[i] = 0;
    };
    rec(0, degree);
    return p;
}

}  // namespace supt
