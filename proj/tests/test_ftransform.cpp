#include "gl3v/errors.hpp"
#include "gl3v/ftransform.hpp"

#include <doctest.h>

#include <cmath>

using namespace gl3v;

namespace {
EmbeddingParams synthetic() {
    EmbeddingParams p;
    p.lambda = {0.3, 0.0, -0.3};
    p.delta = {Parity(0), Parity(0), Parity(0)};
    return p;
}
} // namespace

TEST_CASE("contour line validation") {
    VerticalLineSpec l;
    CHECK_NOTHROW(l.validate());
    l.sigma = 0.4;
    CHECK_THROWS_AS(l.validate(), ContourError);
    l = {};
    l.h = 0.0;
    CHECK_THROWS_AS(l.validate(), DomainError);
}

TEST_CASE("F agrees with the repeated-integral oracle") {
    const auto p = synthetic();
    for (int eta = 0; eta < 2; ++eta) {
        const auto fam = build_gaussian_family(Parity(eta), p);
        const auto F = cached_transform(p, fam);
        for (double x : {0.3, 2.0}) {
            const cplx o = direct_F_oracle(p, fam, x);
            CHECK(std::abs((*F)(x).value - o) <= 1e-6 * std::abs(o));
        }
    }
}

TEST_CASE("F parity") {
    const auto p = synthetic();
    for (int eta = 0; eta < 2; ++eta) {
        const auto fam = build_gaussian_family(Parity(eta), p);
        const auto F = cached_transform(p, fam);
        for (double x : {0.05, 0.7, 3.0, 40.0}) {
            const cplx a = (*F)(x).value, b = (*F)(-x).value;
            CHECK(std::abs(b - Parity(eta).sign() * a) <= 1e-9 * F->max_abs());
        }
    }
}

TEST_CASE("oracle parameter cone") {
    EmbeddingParams p;
    p.lambda = {0.0, 0.0, 0.0};
    const auto fam = build_gaussian_family(Parity(0), p);
    CHECK_THROWS_AS(direct_F_oracle(p, fam, 1.0), ConvergenceError);
}

TEST_CASE("phi-side and f-side routes agree") {
    const auto p = EmbeddingParams::discrete_series(3);
    const auto fam = build_test_function(4.0, Parity(0), Parity(0), p);
    const FTransform a(p, fam, {}, FRoute::phi_side);
    const FTransform b(p, fam, {}, FRoute::f_side);
    for (double x : {1.0, 10.0, 100.0, 1000.0}) {
        const cplx u = a(x).value, v = b(x).value;
        CHECK(std::abs(u - v) <= 1e-9 * std::max(a.max_abs(), b.max_abs()));
    }
}

TEST_CASE("raising the contour height stays within the error estimate") {
    const auto p = EmbeddingParams::discrete_series(3);
    const auto fam = build_test_function(0.5, Parity(0), Parity(0), p);
    VerticalLineSpec low, high;
    high.H = 2.0 * low.H;
    const FTransform a(p, fam, low), b(p, fam, high);
    for (double x : {0.5, 5.0, 50.0, 500.0}) {
        const auto u = a(x), v = b(x);
        CHECK(std::abs(u.value - v.value) <= u.error + v.error + 1e-13 * a.max_abs());
    }
}

TEST_CASE("F beyond its support is zero with an error bound") {
    const auto p = synthetic();
    const auto fam = build_gaussian_family(Parity(0), p);
    const auto F = cached_transform(p, fam);
    const auto v = (*F)(10.0 * F->x_max());
    CHECK(v.value == cplx(0.0));
    CHECK(v.error > 0.0);
    CHECK(v.error <= 1e-7 * F->max_abs());
}

TEST_CASE("regime labels and envelopes") {
    const auto p = EmbeddingParams::discrete_series(3);
    const auto small = build_test_function(0.5, Parity(0), Parity(0), p);
    CHECK(regime_report(p, small, 3.0).regime == Regime::small_y);
    const auto fam = build_test_function(4.0, Parity(0), Parity(0), p);
    const auto r1 = regime_report(p, fam, 1.0);
    CHECK(r1.regime == Regime::small_x);
    CHECK(r1.x_exponent == 0.5);
    CHECK(regime_report(p, fam, 10.0).regime == Regime::power);
    CHECK(regime_report(p, fam, 100.0).regime == Regime::rapid);
    // delta = (1, 0, 1) with eta = 0: G_1(s) and G_0(s + 1) share their poles.
    CHECK(r1.pole_overlap);
}

TEST_CASE("small-x envelope constant stays bounded") {
    const auto p = EmbeddingParams::discrete_series(3);
    double first = 0.0;
    for (double Y : {2.0, 4.0, 8.0}) {
        const auto fam = build_test_function(Y, Parity(0), Parity(0), p);
        const auto r = regime_report(p, fam, 1.0);
        if (first == 0.0) first = r.ratio;
        CHECK(r.ratio <= 1.15 * first);
    }
}
