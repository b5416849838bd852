#include "gl3v/errors.hpp"
#include "gl3v/special_fn.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace gl3v;
using std::numbers::pi;

namespace {
bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol; }
}

TEST_CASE("log_gamma values") {
    CHECK(std::abs(log_gamma(1.0)) < 1e-14);
    CHECK(std::abs(log_gamma(5.0) - std::log(24.0)) < 1e-14);
    CHECK(std::abs(log_gamma(0.5) - 0.5 * std::log(pi)) < 1e-14);
    // mpmath loggamma(3+4i)
    CHECK(close(log_gamma(cplx(3, 4)), cplx(-1.7566267846037841105, 4.7426644380346579282), 1e-13));
    CHECK_THROWS_AS(log_gamma(-2.0), PoleError);
    CHECK_THROWS_AS(log_gamma(cplx(0.0, 1e-10)), PoleError);
}

TEST_CASE("g_delta values") {
    CHECK(std::abs(g_delta(Parity(0), 1.0)) < 1e-15);
    CHECK(close(g_delta(Parity(1), 1.0), cplx(0, 1.0 / pi), 1e-14));
    CHECK(close(g_delta(Parity(0), 0.5), 1.0, 1e-14));
    CHECK(close(g_delta(Parity(1), 0.5), cplx(0, 1), 1e-14));
    // mpmath references
    CHECK(close(g_delta(Parity(0), cplx(2, 3)), cplx(0.34695396405963584753, -0.024201707537221950497), 1e-14));
    const cplx v = g_delta(Parity(1), cplx(0.3, 2));
    CHECK(close(v, cplx(-0.43500670917849399665, -1.1806097423978737995), 1e-14));
    CHECK(close(v * g_delta(Parity(1), cplx(0.7, -2)), -1.0, 1e-10));
    // The removable point s = 0 of G_1.
    CHECK(close(g_delta(Parity(1), 0.0), cplx(0, pi), 1e-12));
    CHECK_THROWS_AS(g_delta(Parity(0), 0.0), PoleError);
    CHECK_THROWS_AS(g_delta(Parity(1), -1.0), PoleError);
    CHECK_THROWS_AS(g_delta(Parity(0), -2.0), PoleError);
}

TEST_CASE("g_delta pole lattice") {
    CHECK(g_delta_near_pole(Parity(0), 0.0));
    CHECK(g_delta_near_pole(Parity(0), -4.0));
    CHECK_FALSE(g_delta_near_pole(Parity(0), -1.0));
    CHECK(g_delta_near_pole(Parity(1), -3.0));
    CHECK_FALSE(g_delta_near_pole(Parity(1), -2.0));
    CHECK_FALSE(g_delta_near_pole(Parity(1), 0.0));
}

TEST_CASE("textbook forms agree") {
    for (int d = 0; d < 2; ++d)
        for (cplx s : {cplx(0.3, 1), cplx(2.5, -4), cplx(-1.5, 0.5), cplx(0.75, 30)}) {
            const cplx g = g_delta(Parity(d), s);
            CHECK(std::abs(g - g_delta_exp_form(Parity(d), s)) <= 1e-12 * std::abs(g));
            CHECK(std::abs(g - g_delta_trig_form(Parity(d), s)) <= 1e-12 * std::abs(g));
        }
}

TEST_CASE("log_g_delta matches g_delta and survives large heights") {
    for (int d = 0; d < 2; ++d)
        for (cplx s : {cplx(0.75, 5), cplx(2, -20), cplx(0.3, 80)}) {
            const cplx g = g_delta(Parity(d), s);
            CHECK(std::abs(std::exp(log_g_delta(Parity(d), s)) - g) <= 1e-11 * std::abs(g));
        }
    const cplx big = log_g_delta(Parity(0), cplx(0.5, 1e5));
    CHECK(std::isfinite(big.real()));
    CHECK(std::abs(big.real()) < 1e-6);
}

TEST_CASE("reciprocity on random points") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> re(-2, 3), im(-10, 10);
    double worst = 0.0;
    for (int d = 0; d < 2; ++d)
        for (int k = 0; k < 100; ++k) {
            const cplx s(re(rng), im(rng));
            if (g_delta_near_pole(Parity(d), s, 1e-3) || g_delta_near_pole(Parity(d), 1.0 - s, 1e-3)) continue;
            worst = std::max(worst, std::abs(g_delta(Parity(d), s) * g_delta(Parity(d), 1.0 - s) - Parity(d).sign()));
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("Stirling ratio") {
    CHECK(std::abs(g_stirling_ratio(Parity(0), 2.0, 200.0) - 1.0) < 0.01);
    CHECK(std::abs(g_stirling_ratio(Parity(1), 0.5, 500.0) - 1.0) < 0.005);
    CHECK(std::abs(std::abs(g_delta(Parity(0), cplx(0.5, 300.0))) - 1.0) < 1e-3);
}

TEST_CASE("gamma multiplication") {
    CHECK(gamma_multiplication_residual(2, 0.75) <= 1e-9);
    CHECK(gamma_multiplication_residual(3, 1.7) <= 1e-9);
    CHECK(gamma_multiplication_residual(2, 0.5) <= 1e-12);
    CHECK(gamma_multiplication_residual(4, cplx(1.2, 7.0)) <= 1e-9);
}

TEST_CASE("asymptotic pair") {
    const auto e = asymptotic_pair(0.0, 0.0, Parity(0), Parity(0), 1);
    const cplx s(1.0, 100.0);
    const cplx exact = g_delta(Parity(0), s) * g_delta(Parity(0), s);
    CHECK(std::abs(e(s) - exact) / std::abs(exact) < 0.03);

    const auto a = asymptotic_pair(cplx(-0.3, 0.1), cplx(0.2, 0), Parity(1), Parity(0), 4);
    const auto b = asymptotic_pair(cplx(0.2, 0), cplx(-0.3, 0.1), Parity(0), Parity(1), 4);
    for (int g = 0; g < 2; ++g)
        for (std::size_t j = 0; j < a.C[g].size(); ++j) CHECK(std::abs(a.C[g][j] - b.C[g][j]) < 1e-14);

    const auto p = EmbeddingParams::discrete_series(23);
    const auto t = asymptotic_pair(p.lambda[0], p.lambda[1], p.delta[0], p.delta[1], 2);
    const cplx z(0.75, 40.0);
    CHECK(std::abs(t.leading_argument(z) - (2.0 * z + p.lambda[2] - 0.5)) < 1e-13);

    // Error decreases with the order at fixed height.
    const cplx w(0.75, 100.0);
    const cplx ex = g_delta(Parity(1), w - p.lambda[0]) * g_delta(Parity(0), w - p.lambda[1]);
    double prev = 1e300;
    for (int M : {1, 2, 4}) {
        const auto m = asymptotic_pair(p.lambda[0], p.lambda[1], Parity(1), Parity(0), M);
        const double err = std::abs(m(w) - ex) / std::abs(ex);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("parity arithmetic") {
    CHECK(Parity(3) == Parity(1));
    CHECK(Parity(-1) == Parity(1));
    CHECK((Parity(1) + Parity(1)) == Parity(0));
    CHECK(Parity(1).sign() == -1.0);
}

TEST_CASE("embedding parameters") {
    const auto p = EmbeddingParams::discrete_series(23);
    CHECK(p.normalized());
    CHECK(p.ordered());
    CHECK(p.lambda[2] == cplx(11.0, 0.0));
    CHECK(p.delta[0] == Parity(1));
    CHECK(p.delta[2] == Parity(1));
    EmbeddingParams bad;
    bad.lambda = {0.5, 0.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), DomainError);
}
