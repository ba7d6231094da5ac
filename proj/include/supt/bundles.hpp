#pragma once

#include <optional>
#include <random>
#include <string>

#include "supt/derivations.hpp"
#include "supt/matrix.hpp"

namespace supt {

// Trivialized Z/2-graded bundle E = M x R^{p|q} over R^n.
struct GradedBundle {
    int base_dim;
    int even_rank;
    int odd_rank;

    int rank() const { return even_rank + odd_rank; }
    Parity fiber_parity(int a) const { return a < even_rank ? Parity::Even : Parity::Odd; }
};

using FormMatrix = Mat<DifferentialForm>;
using SectionM = std::vector<ScalarField>;     // section of E over M
using PiTSection = std::vector<DifferentialForm>;  // section of pi^*E over PiTM

// Connection nabla = d + A on a trivialized graded bundle; A is a matrix of
// 1-forms acting on column sections.
class GradedConnection {
public:
    GradedConnection(GradedBundle bundle, FormMatrix A);

    static GradedConnection flat(GradedBundle bundle);

    const GradedBundle& bundle() const { return bundle_; }
    const FormMatrix& A() const { return A_; }

    bool is_even(double tol = 1e-12) const;  // A block-diagonal wrt the grading

private:
    GradedBundle bundle_;
    FormMatrix A_;
};

// nabla_X s = X(s) + A(X) s, componentwise.
SectionM covariant_derivative_M(const GradedConnection& conn, const VectorField& X,
                                const SectionM& s);

// Connection on pi^*E over the odd tangent bundle, given by its coefficient
// matrices against the coordinate derivations: nabla_{L_l} = L_l + GammaL_l,
// nabla_{iota_l} = iota_l + GammaI_l, extended with left form coefficients.
class PiTConnection {
public:
    PiTConnection(GradedBundle bundle, std::vector<FormMatrix> gamma_lie,
                  std::vector<FormMatrix> gamma_iota);

    static PiTConnection pullback(const GradedConnection& conn);

    const GradedBundle& bundle() const { return bundle_; }
    int dim() const { return bundle_.base_dim; }
    const FormMatrix& gamma_lie(int l) const { return gamma_lie_[l]; }
    const FormMatrix& gamma_iota(int l) const { return gamma_iota_[l]; }

    PiTSection covariant(const PiTDerivation& V, const PiTSection& s) const;

private:
    GradedBundle bundle_;
    std::vector<FormMatrix> gamma_lie_;
    std::vector<FormMatrix> gamma_iota_;
};

// Pairing <nabla(sigma), V> = nabla_V sigma for pulled-back sections; the
// sigma components are 0-forms.
PiTSection pullback_pairing(const PiTConnection& conn, const SectionM& s, const PiTDerivation& V);

struct OddTrivialReport {
    bool odd_trivial = true;
    double max_residual = 0.0;
    std::string witness;  // empty when odd_trivial
};

// Both conditions of the odd-triviality criterion, on coordinate sections and
// fields plus random polynomial probes: <nabla(pi^*s), iota_X> = 0 and
// <nabla(pi^*s), L_X> pulled back (0-form components).
OddTrivialReport is_odd_trivial(const PiTConnection& conn, std::mt19937_64& rng,
                                int random_probes = 16, double tol = 1e-9);

// nabla_X s := <nabla(pi^*s), L_X> read as 0-forms; inverse of pullback on
// odd-trivial connections. Throws when the criterion fails.
GradedConnection restrict_connection(const PiTConnection& conn, std::mt19937_64& rng,
                                     double tol = 1e-9);

// Graded commutator curvature in two odd directions:
// nabla_X nabla_Y + nabla_Y nabla_X - nabla_{[X,Y]}.
PiTSection odd_curvature(const PiTConnection& conn, const PiTDerivation& X, const PiTDerivation& Y,
                         const PiTSection& s);

double max_coeff_abs(const PiTSection& s);
double max_coeff_distance(const PiTSection& a, const PiTSection& b);

}  // namespace supt
