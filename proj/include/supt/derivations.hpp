#pragma once

#include <functional>

#include "supt/forms.hpp"

namespace supt {

// Derivation of the form algebra, i.e. a vector field on the odd tangent
// bundle, stored in coordinate normal form
//     V = sum_i a_i L_{d_i} + sum_i b_i i_{d_i},
// with a_i, b_i differential forms. The normal form is unique: a_i = V(x^i),
// b_i = V(dx^i). Parity consistency: an even derivation has even a_i and odd
// b_i; an odd derivation the reverse.
class PiTDerivation {
public:
    PiTDerivation(Parity parity, std::vector<DifferentialForm> lie_coeffs,
                  std::vector<DifferentialForm> contract_coeffs);

    static PiTDerivation zero(int dim, Parity parity);
    static PiTDerivation lie(const VectorField& X);       // a_i = X^i, b_i = dX^i
    static PiTDerivation iota(const VectorField& X);      // b_i = X^i
    static PiTDerivation exterior(int dim);               // a_i = dx^i (the field inducing d)

    int dim() const { return dim_; }
    Parity parity() const { return parity_; }
    const DifferentialForm& lie_coeff(int i) const { return a_[i]; }
    const DifferentialForm& contract_coeff(int i) const { return b_[i]; }

    DifferentialForm apply(const DifferentialForm& w) const;

    // Left multiplication by a form of homogeneous parity: (w V)(.) = w ^ V(.).
    friend PiTDerivation operator*(const DifferentialForm& w, const PiTDerivation& V);
    friend PiTDerivation operator+(const PiTDerivation& V, const PiTDerivation& W);
    friend PiTDerivation operator*(double s, const PiTDerivation& V);

    bool is_zero(double tol = 0.0) const;
    double max_coeff_abs() const;

private:
    int dim_;
    Parity parity_;
    std::vector<DifferentialForm> a_;
    std::vector<DifferentialForm> b_;
};

// Graded commutator [V, W] = V W - (-1)^{|V||W|} W V, read off in normal form
// from the images of the coordinates.
PiTDerivation graded_bracket(const PiTDerivation& V, const PiTDerivation& W);

// V o V for odd V (equals half the graded self-bracket).
PiTDerivation derivation_square(const PiTDerivation& V);

// A derivation presented by its images of the coordinate functions x^i and
// dx^i, plus (optionally) its full action for Leibniz spot checks.
struct RawDerivation {
    Parity parity;
    std::vector<DifferentialForm> images_x;
    std::vector<DifferentialForm> images_dx;
    std::function<DifferentialForm(const DifferentialForm&)> action;  // may be null
};

// Unique coordinate normal form; throws algebra_error on parity-inconsistent
// input, and oracle-checks the supplied action against the normal form on
// probe products when present.
PiTDerivation decompose_derivation(const RawDerivation& raw, double tol = 1e-9);

// Element of Omega*(M) tensor Lambda[theta...]: theta-monomials (over a list
// of ambient Grassmann generators) multiply form coefficients from the left.
class SuperForm {
public:
    SuperForm(int dim, std::vector<int> theta_gens);

    static SuperForm from_form(const DifferentialForm& w, std::vector<int> theta_gens);

    int dim() const { return dim_; }
    const std::vector<int>& theta_gens() const { return gens_; }
    const std::map<std::uint32_t, DifferentialForm>& parts() const { return parts_; }

    // Coefficient form of the monomial theta_{A}; A indexes into theta_gens.
    DifferentialForm part(std::uint32_t theta_mask) const;
    void add_part(std::uint32_t theta_mask, const DifferentialForm& w);

    SuperForm operator-() const;
    SuperForm& operator+=(const SuperForm& o);
    friend SuperForm operator+(SuperForm a, const SuperForm& b) { return a += b; }
    friend SuperForm operator-(SuperForm a, const SuperForm& b) { return a += -b; }
    friend SuperForm operator*(const SuperForm& a, const SuperForm& b);  // wedge with theta signs

    // Apply a map on form coefficients (tensored with the identity on the
    // theta factors); `shift` is the parity the map adds to coefficients.
    SuperForm map_coefficients(const std::function<DifferentialForm(const DifferentialForm&)>& fn) const;

    // Substitute theta generators along a Grassmann homomorphism on the full
    // ambient algebra (e.g. the diagonal theta1, theta2 -> theta).
    SuperForm substitute_thetas(const GrassmannHom& hom, std::vector<int> new_gens) const;

    GrassmannElement eval_grassmann(const GrassmannVector& x, const GrassmannVector& xi,
                                    int ambient_k) const;

    bool is_zero(double tol = 0.0) const;
    double max_coeff_abs() const;

private:
    int dim_;
    std::vector<int> gens_;  // ambient generator index per theta slot
    std::map<std::uint32_t, DifferentialForm> parts_;
};

double max_coeff_distance(const SuperForm& a, const SuperForm& b);

}  // namespace supt
