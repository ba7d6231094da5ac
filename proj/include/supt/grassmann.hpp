#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "supt/errors.hpp"

namespace supt {

enum class Parity : int { Even = 0, Odd = 1 };

inline Parity operator+(Parity a, Parity b) {
    return static_cast<Parity>((static_cast<int>(a) + static_cast<int>(b)) % 2);
}

// Element of the real exterior algebra on k anticommuting generators,
// k <= 8. Basis monomials are indexed by subset bitmasks in ascending
// generator order; gamma_i * gamma_i = 0 and gamma_i * gamma_j = -gamma_j * gamma_i.
class GrassmannElement {
public:
    static constexpr int max_generators = 8;

    explicit GrassmannElement(int num_generators);

    static GrassmannElement zero(int k) { return GrassmannElement(k); }
    static GrassmannElement scalar(int k, double v);
    static GrassmannElement generator(int k, int i);
    static GrassmannElement monomial(int k, std::uint32_t mask, double v);

    int generators() const { return k_; }
    std::size_t basis_size() const { return coeff_.size(); }

    double coefficient(std::uint32_t mask) const { return coeff_[mask]; }
    void set_coefficient(std::uint32_t mask, double v) { coeff_[mask] = v; }

    double body() const { return coeff_[0]; }
    GrassmannElement soul() const;

    GrassmannElement even_part() const;
    GrassmannElement odd_part() const;
    bool is_even(double tol = 0.0) const;
    bool is_odd(double tol = 0.0) const;
    bool is_zero(double tol = 0.0) const;
    double max_abs() const;

    // Same coefficients in a larger algebra (generators appended).
    GrassmannElement embed(int new_k) const;

    GrassmannElement operator-() const;
    GrassmannElement& operator+=(const GrassmannElement& o);
    GrassmannElement& operator-=(const GrassmannElement& o);
    GrassmannElement& operator*=(double s);

    friend GrassmannElement operator+(GrassmannElement a, const GrassmannElement& b) { return a += b; }
    friend GrassmannElement operator-(GrassmannElement a, const GrassmannElement& b) { return a -= b; }
    friend GrassmannElement operator*(GrassmannElement a, double s) { return a *= s; }
    friend GrassmannElement operator*(double s, GrassmannElement a) { return a *= s; }
    friend GrassmannElement operator*(const GrassmannElement& a, const GrassmannElement& b);

    GrassmannElement pow(int m) const;

    // Sign of gamma_A * gamma_B as a reordering of gamma_{A|B}; A, B disjoint.
    static int merge_sign(std::uint32_t a, std::uint32_t b);

    // Split as x = p + gamma_gen * q with p, q free of gamma_gen.
    std::pair<GrassmannElement, GrassmannElement> split_generator(int gen) const;

    std::string str() const;

private:
    int k_;
    std::vector<double> coeff_;
    void check_compatible(const GrassmannElement& o) const;
};

// A Grassmann element with a declared homogeneous parity; mixed elements are
// rejected so that coordinate values stay parity-clean.
class SuperNumber {
public:
    SuperNumber(GrassmannElement value, Parity parity, double tol = 0.0);

    static SuperNumber even(GrassmannElement v) { return SuperNumber(std::move(v), Parity::Even); }
    static SuperNumber odd(GrassmannElement v) { return SuperNumber(std::move(v), Parity::Odd); }

    const GrassmannElement& value() const { return value_; }
    Parity parity() const { return parity_; }
    double body() const { return value_.body(); }
    GrassmannElement soul() const { return value_.soul(); }

private:
    GrassmannElement value_;
    Parity parity_;
};

// Algebra homomorphism Lambda_k -> Lambda_k' determined by odd images of the
// generators. Models maps of superpoints S' -> S.
class GrassmannHom {
public:
    GrassmannHom(int k_from, std::vector<GrassmannElement> images);

    // theta_i -> theta_{target[i]} in an algebra with k_to generators.
    static GrassmannHom rename(int k_from, int k_to, const std::vector<int>& target);
    // Both generators of Lambda_2 map to the single generator of Lambda_1
    // (or to a chosen generator of a larger algebra).
    static GrassmannHom diagonal(int k_from, int k_to, int target_gen);

    GrassmannElement apply(const GrassmannElement& x) const;

    int source_generators() const { return k_from_; }
    int target_generators() const { return k_to_; }

private:
    int k_from_;
    int k_to_;
    std::vector<GrassmannElement> images_;
};

// x = even part + odd part, each homogeneous.
std::pair<GrassmannElement, GrassmannElement> parity_decompose(const GrassmannElement& x);

using GrassmannVector = std::vector<GrassmannElement>;

GrassmannVector operator+(const GrassmannVector& a, const GrassmannVector& b);
GrassmannVector operator-(const GrassmannVector& a, const GrassmannVector& b);
GrassmannVector operator*(double s, const GrassmannVector& a);
double max_abs(const GrassmannVector& v);

}  // namespace supt
