#include "gl3v/errors.hpp"
#include "gl3v/mellin.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace gl3v;
using std::numbers::pi;

TEST_CASE("signed Mellin transform of the Gaussian") {
    const auto g = gaussian_function(Parity(0));
    CHECK(std::abs(signed_mellin(g, Parity(0), 1.0) - 1.0) < 1e-12);
    CHECK(std::abs(signed_mellin(g, Parity(0), 2.0) - 1.0 / pi) < 1e-12);
    // pi^{-s/2} Gamma(s/2), mpmath
    CHECK(std::abs(signed_mellin(g, Parity(0), cplx(0.3, 1.5)) - cplx(-0.54055954956651879709, -0.49441554535657047917)) <
          1e-11);
}

TEST_CASE("signed Mellin contract errors") {
    const auto odd = gaussian_function(Parity(1));
    CHECK_THROWS_AS(signed_mellin(odd, Parity(0), 1.0), ParityError);
    const auto even = gaussian_function(Parity(0));
    CHECK_THROWS_AS(signed_mellin(even, Parity(0), -0.5), DivergenceError);
    // The odd Gaussian vanishes to first order, so Re s > -1 converges.
    CHECK_NOTHROW(signed_mellin(odd, Parity(1), -0.5));
}

TEST_CASE("Fourier transform of the Gaussian") {
    const auto g = gaussian_function(Parity(0));
    CHECK(std::abs(fourier_transform(g, 0.0) - 1.0) < 1e-13);
    CHECK(std::abs(fourier_transform(g, 1.0) - std::exp(-pi)) < 1e-13);
    const auto h = gaussian_function(Parity(1));
    // x e^{-pi x^2} transforms to -i r e^{-pi r^2}.
    CHECK(std::abs(fourier_transform(h, 0.7) - cplx(0, -0.7 * std::exp(-pi * 0.49))) < 1e-13);
}

TEST_CASE("bump transform") {
    const Bump b;
    // mpmath quadrature of exp(-1/(1-x^2)) cos(2 pi x r) / its integral
    CHECK(std::abs(b.hat(0.5) - 0.40654821872618195315) < 1e-14);
    CHECK(std::abs(b.hat(1.0) + 0.096527332870191751152) < 1e-14);
    CHECK(std::abs(b.hat(5.0) - 0.0012907492433648210182) < 1e-15);
    CHECK(std::abs(b.hat(20.0) - 1.8801444104793569586e-6) < 1e-17);
    CHECK(std::abs(b.hat(-3.3) - std::conj(b.hat(3.3))) < 1e-16);
    CHECK(std::abs(b.hat(0.0) - 1.0) < 1e-14);
    const Bump odd(Parity(1));
    CHECK(std::abs(odd.hat(1.0) - cplx(0, -0.016765149510615904473)) < 1e-14);
    // Faster than r^{-6} on [10, 100].
    CHECK(std::abs(b.hat(100.0)) < std::abs(b.hat(10.0)) * 1e-6);
}

TEST_CASE("Mellin-Fourier bridge") {
    const auto g = gaussian_function(Parity(0));
    CHECK(mellin_fourier_residual(g, 0.5) <= 1e-8);
    CHECK(mellin_fourier_residual(g, cplx(0.3, 1.5)) <= 1e-8);
    CHECK(mellin_fourier_residual(gaussian_function(Parity(1)), 0.5) <= 1e-8);
}

TEST_CASE("test-function family") {
    const auto p = EmbeddingParams::discrete_series(3);
    auto zero = build_test_function(0.0, Parity(0), Parity(1), p);  // delta3 + eta = 0
    CHECK(zero.phi_parity() == Parity(0));
    // delta3 = 1: phi is built from derivatives of the shifted bumps.
    const cplx d = zero.phi0.derivative(1, 0.3) / (pi * cplx(0, 1));
    CHECK(std::abs(zero.phi(0.3) - d) < 1e-15);

    const auto two = build_test_function(2.0, Parity(0), Parity(0), p);
    CHECK(two.phi(0.5) == cplx(0.0));
    CHECK(two.phi(3.5) == cplx(0.0));
    CHECK(std::abs(two.phi(2.3)) > 0.0);
    CHECK(std::abs(two.phi(-2.3)) > 0.0);
    CHECK(two.phi_support() == doctest::Approx(3.0));

    for (int eta = 0; eta < 2; ++eta)
        for (int omega = 0; omega < 2; ++omega) {
            const auto fam = build_test_function(1.5, Parity(omega), Parity(eta), p);
            for (double x : {0.2, 0.9, 2.7}) {
                const cplx a = fam.f(x), b = fam.f(-x);
                CHECK(std::abs(b - Parity(eta).sign() * a) <= 1e-12 * std::abs(a) + 1e-300);
            }
        }

    CHECK(build_test_function(0.0, Parity(1), Parity(0), p).degenerate());
    CHECK_FALSE(build_test_function(0.5, Parity(1), Parity(0), p).degenerate());
}

TEST_CASE("shift covariance of the phi transform") {
    const auto p = EmbeddingParams::discrete_series(3);
    for (double Y : {2.0, 5.0}) {
        const auto fam = build_test_function(Y, Parity(0), Parity(0), p);
        const auto phi = fam.phi_function();
        RealLineFunction phi1 = phi;
        phi1.eval = [fam](double x) { return fam.phi1(x); };
        phi1.support = phi.support / Y;
        const Parity par = fam.phi_parity();
        for (cplx s : {cplx(0.75, 0), cplx(1.2, 3)}) {
            const cplx a = signed_mellin(phi, par, s);
            const cplx b = std::pow(cplx(Y), s) * signed_mellin(phi1, par, s);
            CHECK(std::abs(a - b) <= 1e-9 * std::abs(a));
        }
    }
}
