#include "gl3v/errors.hpp"
#include "gl3v/rational.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace gl3v;

TEST_CASE("gcd and modular inverse") {
    CHECK(gcd(12, 18) == 6);
    CHECK(gcd(-4, 6) == 2);
    CHECK(mod_inverse(1, 9) == 1);
    CHECK(mod_inverse(3, 7) == 5);
    CHECK(mod_inverse(-2, 7) == 3);
    CHECK_THROWS_AS(mod_inverse(2, 4), NonInvertibleError);
}

TEST_CASE("divisors and mobius") {
    CHECK(divisors(12) == std::vector<i64>{1, 2, 3, 4, 6, 12});
    CHECK(divisors(1) == std::vector<i64>{1});
    CHECK(mobius(1) == 1);
    CHECK(mobius(4) == 0);
    CHECK(mobius(6) == 1);
    CHECK(mobius(30) == -1);
}

TEST_CASE("exact phases") {
    CHECK(e_fraction(1, 4) == cplx(0, 1));
    CHECK(e_fraction(-3, 4) == cplx(0, 1));
    CHECK(e_fraction(2, 4) == cplx(-1, 0));
    CHECK(e_fraction(7, 7) == cplx(1, 0));
    CHECK(std::abs(e_fraction(1, 3) - std::polar(1.0, 2.0 * std::numbers::pi / 3.0)) < 1e-15);
}

TEST_CASE("Kloosterman sums") {
    CHECK(kloosterman(5, 9, 1) == 1.0);
    CHECK(std::abs(kloosterman(1, 1, 2) - 1.0) < 1e-15);
    CHECK(std::abs(kloosterman(1, 1, 3) + 1.0) < 1e-14);
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<i64> d(-500, 500);
    for (i64 c = 1; c <= 40; ++c)
        for (int k = 0; k < 5; ++k) {
            const i64 n = d(rng), m = d(rng);
            CHECK(std::abs(kloosterman(n, m, c) - kloosterman_naive(n, m, c)) < 1e-10);
            CHECK(std::abs(kloosterman(n, m, c) - kloosterman(m, n, c)) < 1e-10);
        }
}

TEST_CASE("continued fractions") {
    const auto r = continued_fraction(3.0 / 7.0);
    REQUIRE(!r.empty());
    CHECK(r.back().p == 3);
    CHECK(r.back().q == 7);

    const auto pi = continued_fraction(std::numbers::pi);
    REQUIRE(pi.size() >= 4);
    CHECK(pi[0].p == 3);
    CHECK(pi[0].q == 1);
    CHECK(pi[1].p == 22);
    CHECK(pi[1].q == 7);
    CHECK(pi[2].p == 333);
    CHECK(pi[2].q == 106);
    CHECK(pi[3].p == 355);
    CHECK(pi[3].q == 113);

    const auto g = continued_fraction(std::numbers::phi, 20);
    const i64 fib[] = {1, 1, 2, 3, 5, 8, 13, 21, 34, 55};
    for (int k = 0; k < 10; ++k) CHECK(g[k].q == fib[k]);
    for (std::size_t k = 1; k + 1 < g.size(); ++k) {
        CHECK(g[k + 1].p == g[k + 1].partial_quotient * g[k].p + g[k - 1].p);
        CHECK(g[k + 1].q == g[k + 1].partial_quotient * g[k].q + g[k - 1].q);
        CHECK(gcd(g[k].p, g[k].q) == 1);
    }
}

TEST_CASE("approximant selection") {
    const auto a = select_approximant(std::numbers::phi, 30.0);
    CHECK(a.c == 5);
    CHECK(a.Y >= 0.0);
    const auto h = select_approximant(0.5, 100.0);
    CHECK(h.c == 2);
    CHECK(h.Y == 0.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 20; ++i) {
        const double alpha = u(rng);
        for (double T : {10.0, 1000.0, 1e5}) {
            const auto c = select_approximant(alpha, T);
            CHECK(static_cast<double>(c.c * c.c) <= T);
            CHECK(c.Y >= 0.0);
            CHECK(std::abs(c.Y - T * std::abs(alpha + static_cast<double>(c.a) / c.c)) < 1e-9 * T);
        }
    }
}
