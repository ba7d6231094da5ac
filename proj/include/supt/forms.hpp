#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "supt/scalar_field.hpp"

namespace supt {

// Vector field X = sum X^i d_i on R^n.
class VectorField {
public:
    VectorField(int dim, std::vector<ScalarField> components);

    static VectorField zero(int dim);
    static VectorField coordinate(int dim, int i);  // d/dx^i

    int dim() const { return dim_; }
    const ScalarField& component(int i) const { return comps_[i]; }
    const std::vector<ScalarField>& components() const { return comps_; }

    GrassmannVector eval_grassmann(const GrassmannVector& x) const;
    std::vector<double> eval(const std::vector<double>& x) const;

    friend VectorField operator+(const VectorField& a, const VectorField& b);
    friend VectorField operator*(const ScalarField& f, const VectorField& X);
    friend VectorField operator*(double s, const VectorField& X);

private:
    int dim_;
    std::vector<ScalarField> comps_;
};

// [X, Y]^i = X(Y^i) - Y(X^i).
VectorField lie_bracket(const VectorField& X, const VectorField& Y);

// Differential form on R^n as a function on the odd tangent bundle: terms map
// a strictly increasing index tuple (stored as a bitmask) to a coefficient
// field. Mixed degrees are allowed; parity is defined when all degrees agree
// mod 2.
class DifferentialForm {
public:
    explicit DifferentialForm(int dim) : dim_(dim) {}

    static DifferentialForm zero(int dim) { return DifferentialForm(dim); }
    static DifferentialForm from_scalar(ScalarField f);
    static DifferentialForm constant(int dim, double c);
    static DifferentialForm dx(int dim, int i);

    int dim() const { return dim_; }
    const std::map<std::uint32_t, ScalarField>& terms() const { return terms_; }
    void add_term(std::uint32_t mask, const ScalarField& f);
    ScalarField coefficient(std::uint32_t mask) const;  // zero field if absent

    bool is_homogeneous_degree() const;
    int degree() const;  // max degree over terms; 0 for the zero form
    std::optional<Parity> parity() const;
    bool is_zero(double tol = 0.0) const;          // polynomial coefficients only
    double max_coeff_abs() const;                  // polynomial coefficients only

    // Value as a function on the odd tangent bundle at (x, xi); xi entries are
    // odd Grassmann values for the dx^i coordinates.
    GrassmannElement eval_grassmann(const GrassmannVector& x, const GrassmannVector& xi) const;

    std::string str() const;

    DifferentialForm operator-() const;
    DifferentialForm& operator+=(const DifferentialForm& o);
    DifferentialForm& operator-=(const DifferentialForm& o);
    friend DifferentialForm operator+(DifferentialForm a, const DifferentialForm& b) { return a += b; }
    friend DifferentialForm operator-(DifferentialForm a, const DifferentialForm& b) { return a -= b; }
    friend DifferentialForm operator*(const DifferentialForm& a, double s);
    friend DifferentialForm operator*(double s, const DifferentialForm& a) { return a * s; }
    friend DifferentialForm operator*(const ScalarField& f, const DifferentialForm& a);

private:
    int dim_;
    std::map<std::uint32_t, ScalarField> terms_;
};

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);
DifferentialForm exterior_d(const DifferentialForm& w);
DifferentialForm contract(const VectorField& X, const DifferentialForm& w);
// Direct coordinate formula (Leibniz over the wedge), not the Cartan identity,
// so the Cartan formula stays a testable statement.
DifferentialForm lie_derivative(const VectorField& X, const DifferentialForm& w);

// Pullback of functions along pi: PiTM -> M (inclusion of 0-forms) and its
// one-sided inverse i*: degree-0 restriction; i* o pi* = id on functions.
DifferentialForm pi_pullback(const ScalarField& f);
ScalarField i_restrict(const DifferentialForm& w);

// Max |coefficient difference| between two forms with polynomial coefficients.
double max_coeff_distance(const DifferentialForm& a, const DifferentialForm& b);

}  // namespace supt
