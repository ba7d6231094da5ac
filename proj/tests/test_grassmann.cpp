#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "supt/scalar_field.hpp"

using namespace supt;

namespace {
GrassmannElement g(int k, int i) { return GrassmannElement::generator(k, i); }

GrassmannElement random_element(int k, std::mt19937_64& rng) {
    GrassmannElement v(k);
    for (std::uint32_t m = 0; m < v.basis_size(); ++m)
        v.set_coefficient(m, static_cast<double>(static_cast<int>(rng() % 9) - 4) * 0.5);
    return v;
}
}  // namespace

TEST_CASE("generators anticommute and square to zero") {
    const auto t1 = g(2, 0), t2 = g(2, 1);
    CHECK((t1 * t2 + t2 * t1).max_abs() == 0.0);
    CHECK((t1 * t2).coefficient(0b11) == 1.0);
    CHECK((t2 * t1).coefficient(0b11) == -1.0);
    CHECK((t1 * t1).max_abs() == 0.0);
}

TEST_CASE("(1 + t1)(1 - t1) = 1") {
    const auto one = GrassmannElement::scalar(2, 1.0);
    const auto t1 = g(2, 0);
    const auto prod = (one + t1) * (one - t1);
    CHECK((prod - one).max_abs() == 0.0);
}

TEST_CASE("parity decomposition") {
    // 1 + t1 + t1 t2 -> even 1 + t1 t2, odd t1
    auto v = GrassmannElement::scalar(2, 1.0) + g(2, 0) + g(2, 0) * g(2, 1);
    CHECK((v.even_part() - (GrassmannElement::scalar(2, 1.0) + g(2, 0) * g(2, 1))).max_abs() == 0.0);
    CHECK((v.odd_part() - g(2, 0)).max_abs() == 0.0);
    CHECK((v.even_part() + v.odd_part() - v).max_abs() == 0.0);

    CHECK(GrassmannElement::zero(2).even_part().max_abs() == 0.0);
    CHECK(GrassmannElement::zero(2).odd_part().max_abs() == 0.0);

    const auto triple = g(3, 0) * g(3, 1) * g(3, 2);
    CHECK(triple.even_part().max_abs() == 0.0);
    CHECK((triple.odd_part() - triple).max_abs() == 0.0);
}

TEST_CASE("associativity and graded commutativity on random elements") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        const int k = 2 + static_cast<int>(rng() % 3);
        const auto a = random_element(k, rng), b = random_element(k, rng), c = random_element(k, rng);
        CHECK(((a * b) * c - a * (b * c)).max_abs() <= 1e-12);
        // homogeneous parts
        const auto ae = a.even_part(), ao = a.odd_part();
        const auto be = b.even_part(), bo = b.odd_part();
        CHECK((ae * be - be * ae).max_abs() <= 1e-12);
        CHECK((ae * bo - bo * ae).max_abs() <= 1e-12);
        CHECK((ao * bo + bo * ao).max_abs() <= 1e-12);
    }
}

TEST_CASE("nilpotency of souls") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        const int k = 2 + static_cast<int>(rng() % 3);
        const auto soul = random_element(k, rng).soul();
        CHECK(soul.pow(k + 1).max_abs() == 0.0);
    }
}

TEST_CASE("incompatible algebras are rejected") {
    CHECK_THROWS_AS(g(2, 0) * g(3, 0), algebra_error);
    CHECK_THROWS_AS(GrassmannElement(9), algebra_error);
}

TEST_CASE("super numbers reject mixed parity") {
    const auto mixed = GrassmannElement::scalar(2, 1.0) + g(2, 0);
    CHECK_THROWS_AS(SuperNumber::even(mixed), algebra_error);
    CHECK_THROWS_AS(SuperNumber::odd(mixed), algebra_error);
    CHECK(SuperNumber::even(GrassmannElement::scalar(2, 2.0)).body() == 2.0);
    CHECK(SuperNumber::odd(g(2, 1)).parity() == Parity::Odd);
}

TEST_CASE("super evaluation: x^2 at 1 + t1 t2") {
    Polynomial sq(1);
    sq.add_term({2}, 1.0);
    const auto x = GrassmannElement::scalar(2, 1.0) + g(2, 0) * g(2, 1);
    const auto v = ScalarField(sq).eval_grassmann({x});
    const auto want = GrassmannElement::scalar(2, 1.0) + 2.0 * (g(2, 0) * g(2, 1));
    CHECK((v - want).max_abs() <= 1e-12);
}

TEST_CASE("super evaluation: exp at a nilpotent argument") {
    // exp with an exact derivative oracle: all partials are exp itself.
    const auto expf = ScalarField::from_pointwise(
        1, 8, [](const std::vector<double>& x) { return std::exp(x[0]); },
        [](const std::vector<int>&, const std::vector<double>& x) { return std::exp(x[0]); });
    const auto x = g(2, 0) * g(2, 1);  // body 0, soul t1 t2
    const auto v = expf.eval_grassmann({x});
    const auto want = GrassmannElement::scalar(2, 1.0) + g(2, 0) * g(2, 1);
    CHECK((v - want).max_abs() <= 1e-12);
}

TEST_CASE("super evaluation with zero soul is classical evaluation") {
    std::mt19937_64 rng(3);
    const auto f = ScalarField(random_polynomial(2, 3, rng));
    const GrassmannVector x = {GrassmannElement::scalar(2, 0.7), GrassmannElement::scalar(2, -0.4)};
    CHECK(f.eval_grassmann(x).body() == doctest::Approx(f.eval({0.7, -0.4})).epsilon(1e-14));
    CHECK(f.eval_grassmann(x).soul().max_abs() == 0.0);
}

TEST_CASE("oracle order exhaustion raises") {
    const auto f = ScalarField::from_pointwise(
        1, 1, [](const std::vector<double>& x) { return x[0]; },
        [](const std::vector<int>&, const std::vector<double>&) { return 1.0; });
    // Soul with two independent even nilpotents needs order 2.
    const auto x = GrassmannElement::scalar(4, 0.0) + g(4, 0) * g(4, 1) + g(4, 2) * g(4, 3);
    CHECK_THROWS_AS(f.eval_grassmann({x}), oracle_error);
}

TEST_CASE("oracle domain violation raises") {
    const auto logf = ScalarField::from_pointwise(
        1, 4, [](const std::vector<double>& x) { return std::log(x[0]); },
        [](const std::vector<int>& a, const std::vector<double>& x) {
            // d^m log = (-1)^{m-1} (m-1)! x^{-m}
            const int mth = a[0];
            double v = (mth % 2 == 0) ? -1.0 : 1.0;
            for (int i = 1; i < mth; ++i) v *= i;
            return v / std::pow(x[0], mth);
        },
        [](const std::vector<double>& x) { return x[0] > 0.0; });
    CHECK(logf.eval({1.0}) == 0.0);
    CHECK_THROWS_AS(logf.eval({-1.0}), oracle_error);
}

TEST_CASE("ring homomorphism and chain rule on polynomials") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 30; ++i) {
        const int n = 1 + static_cast<int>(rng() % 2);
        const Polynomial f = random_polynomial(n, 2, rng);
        const Polynomial h = random_polynomial(n, 2, rng);
        GrassmannVector x;
        for (int j = 0; j < n; ++j) x.push_back(random_element(4, rng).even_part());
        CHECK(((f * h).eval_grassmann(x) - f.eval_grassmann(x) * h.eval_grassmann(x)).max_abs() <=
              1e-12);
    }
}

TEST_CASE("homomorphisms: rename, diagonal, naturality of products") {
    std::mt19937_64 rng(13);
    const auto hom = GrassmannHom::diagonal(2, 1, 0);
    const auto a = random_element(2, rng);
    const auto b = random_element(2, rng);
    CHECK((hom.apply(a * b) - hom.apply(a) * hom.apply(b)).max_abs() <= 1e-12);
    // theta1 theta2 -> theta theta = 0
    CHECK(hom.apply(g(2, 0) * g(2, 1)).max_abs() == 0.0);

    const auto ren = GrassmannHom::rename(2, 3, {2, 0});
    CHECK((ren.apply(g(2, 0)) - g(3, 2)).max_abs() == 0.0);
    CHECK((ren.apply(g(2, 0) * g(2, 1)) - g(3, 2) * g(3, 0)).max_abs() == 0.0);
}

TEST_CASE("split_generator: x = p + theta q") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 20; ++i) {
        const int k = 3;
        const auto x = random_element(k, rng);
        for (int gen = 0; gen < k; ++gen) {
            const auto [p, q] = x.split_generator(gen);
            const auto back = p + GrassmannElement::generator(k, gen) * q;
            CHECK((back - x).max_abs() <= 1e-12);
            CHECK(max_abs(GrassmannVector{p}) == p.max_abs());
        }
    }
}
