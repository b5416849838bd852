#include "gl3v/coefficients.hpp"
#include "gl3v/errors.hpp"
#include "gl3v/twisted_sums.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace gl3v;

namespace {
const CoefficientTable& gl2() {
    static const auto t = build_table(FormKind::gl2_holomorphic, 1 << 17);
    return t;
}
const CoefficientTable& sym2() {
    static const auto t = build_table(FormKind::gl3_sym2, 1 << 17);
    return t;
}
} // namespace

TEST_CASE("sharp sums against an independent evaluation") {
    // tau(n) / n^{11/2} e(n alpha) summed in 30-digit arithmetic (mpmath)
    const cplx s = sharp_sum(gl2(), 1000.0, std::numbers::phi);
    CHECK(std::abs(s - cplx(50.352452615161077, -9.4154673520769041)) < 1e-10);
    const cplx r = sharp_sum(gl2(), 300.0, 3, 10);
    CHECK(std::abs(r - cplx(-3.0626416269715004, 9.4676142738664071)) < 1e-11);
    CHECK(std::abs(sharp_sum(gl2(), 300.0, 0.3) - r) < 1e-11);
}

TEST_CASE("sharp sum symmetries") {
    const auto& t = sym2();
    double total = 0.0;
    for (int n = 1; n <= 500; ++n) total += t(n);
    CHECK(std::abs(sharp_sum(t, 500.5, 0.0) - total) < 1e-12);
    const cplx a = sharp_sum(t, 2000.0, 3, 7), b = sharp_sum(t, 2000.0, 10, 7);
    CHECK(std::abs(a - b) < 1e-12);
    const cplx u = sharp_sum(t, 2000.0, 0.2137);
    CHECK(std::abs(sharp_sum(t, 2000.0, -0.2137) - std::conj(u)) < 1e-10);
    CHECK(std::abs(sharp_sum(t, 2000.0, 1.2137) - u) < 1e-9);
    CHECK_THROWS_AS(sharp_sum(t, 1e9, 0.1), TableTooShortError);
}

TEST_CASE("phase reduction at large n") {
    const double alpha = std::numbers::sqrt2 - 1.0;
    const std::int64_t n = 123456789012;
    const long double exact = static_cast<long double>(n) * static_cast<long double>(alpha);
    const double want = static_cast<double>(exact - std::floor(exact));
    CHECK(std::abs(frac_product(n, alpha) - want) < 1e-6);
    CHECK(frac_product(7, 0.5) == 0.5);
    CHECK(frac_product(-3, 0.25) == 0.25);
}

TEST_CASE("smoothed sums") {
    const auto& t = gl2();
    const auto sharp = smoothed_sum(t, 777.0, 0.31, sharp_weight());
    // The sharp weight sums n = 1..T once, so the value is the sharp sum.
    CHECK(std::abs(sharp.value - sharp_sum(t, 777.0, 0.31)) < 1e-11);
    const auto g = smoothed_sum(t, 500.0, 0.0, gaussian_weight());
    double direct = 0.0;
    for (int n = 1; n <= 7 * 500; ++n) direct += 2.0 * t(n) * std::exp(-std::numbers::pi * (n / 500.0) * (n / 500.0));
    CHECK(std::abs(g.value - direct) < 1e-10);
    CHECK(g.tail < 1e-10);
    // Linearity in the table.
    std::vector<double> twice(t.values());
    for (auto& v : twice) v *= 2.0;
    const CoefficientTable t2(t.descriptor(), twice);
    CHECK(std::abs(smoothed_sum(t2, 500.0, 0.2, gaussian_weight()).value -
                   2.0 * smoothed_sum(t, 500.0, 0.2, gaussian_weight()).value) < 1e-10);
}

TEST_CASE("Gaussian-smoothed GL(2) sums grow like T^{1/2}") {
    std::vector<double> lx, ly;
    for (double T : {100.0, 400.0, 1600.0, 6400.0}) {
        lx.push_back(std::log(T));
        ly.push_back(std::log(std::abs(smoothed_sum(gl2(), T, 0.0, gaussian_weight()).value) + 1.0));
    }
    CHECK(least_squares(lx, ly).first <= 0.6);
}

TEST_CASE("partial summation") {
    const std::vector<cplx> b(100, cplx(3.0));
    std::vector<cplx> a(100);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> d(-9, 9);
    for (auto& v : a) v = d(rng);
    cplx A = 0.0;
    for (auto v : a) A += v;
    CHECK(std::abs(partial_summation_transfer(a, b, 100) - A * 3.0) < 1e-12);
    std::vector<cplx> c(100);
    for (auto& v : c) v = d(rng);
    cplx direct = 0.0;
    for (int i = 0; i < 100; ++i) direct += a[i] * c[i];
    CHECK(partial_summation_transfer(a, c, 100) == direct);
    // Removing a power weight n^{l3 + d3}.
    std::vector<cplx> w(100), aw(100);
    for (int n = 1; n <= 100; ++n) {
        w[n - 1] = std::pow(static_cast<double>(n), -12.0);
        aw[n - 1] = a[n - 1] * std::pow(static_cast<double>(n), 12.0);
    }
    cplx weighted = 0.0;
    for (int i = 0; i < 100; ++i) weighted += a[i];
    CHECK(std::abs(partial_summation_transfer(aw, w, 100) - weighted) <= 1e-10 * std::abs(weighted));
}

TEST_CASE("Dirichlet kernel") {
    const KernelSpec one{[](double) { return 1.0; }, 1};
    CHECK(std::abs(kernel_l1_norm(one) - 1.0) < 1e-12);
    const SharpeningKernel kern;
    const auto k = kern.kernel(64);
    double s = 0.0;
    for (int n = 1; n <= 64; ++n) s += k.g(n / 64.0);
    CHECK(std::abs(dirichlet_kernel(k, 0.0) - s) < 1e-10);
    for (int N : {64, 512}) CHECK(kernel_l1_norm(kern.kernel(N)) / std::log(static_cast<double>(N)) < 20.0);
}

TEST_CASE("sharpening kernel") {
    const SharpeningKernel kern;
    CHECK(kern.rho() == 0.5);
    CHECK(std::abs(kern.min_on_unit() - 0.40654821872618195) < 1e-12);
    CHECK(std::abs(kern.phi0_hat(2.0) + 0.096527332870191751) < 1e-13);
    CHECK_THROWS_AS(SharpeningKernel(1.0), KernelSingularityError);
}

TEST_CASE("sharpening round trip") {
    const SharpeningKernel kern;
    for (double alpha : {0.3, std::numbers::phi}) {
        const cplx s = sharp_sum(gl2(), 64.0, alpha);
        CHECK(std::abs(sharpen_by_convolution(gl2(), kern, 64, alpha) - s) <= 1e-8 * std::abs(s));
    }
    // a_n = delta_{n,1}: the smoothed sum is e(theta) phihat_0(1/N).
    const int N = 16;
    auto single = [&](double theta) { return std::polar(kern.phi0_hat(1.0 / N), 2.0 * std::numbers::pi * theta); };
    const cplx v = sharpen_by_convolution(single, kern, N, 0.37, 1);
    CHECK(std::abs(v - std::polar(1.0, 2.0 * std::numbers::pi * 0.37)) < 1e-12);
}

TEST_CASE("Parseval") {
    CHECK(parseval_residual(gl2(), 1) < 1e-15);
    double n200 = 0.0, n500 = 0.0;
    for (int n = 1; n <= 500; ++n) (n <= 200 ? n200 : n500) += sym2()(n) * sym2()(n);
    n500 += n200;
    CHECK(parseval_residual(gl2(), 200) <= 1e-9 * 200.0);
    CHECK(parseval_residual(sym2(), 500) <= 1e-9 * n500);
}

TEST_CASE("exponent fits") {
    const auto set = adversarial_alpha_set(1, 10);
    REQUIRE(set.size() == 14);
    CHECK(set[0] == std::numbers::phi);
    CHECK(set == adversarial_alpha_set(1, 10));
    CHECK(set != adversarial_alpha_set(2, 10));

    const auto one = build_table(FormKind::constant_one, 8192);
    const auto c = exponent_fit(one, 256, 8192, {0.0}, false);
    CHECK(std::abs(c.beta - 1.0) < 0.02);
    const auto g = exponent_fit(gl2(), 256, 8192, set);
    CHECK(g.beta > 0.3);
    CHECK(g.beta < 0.7);
    CHECK(g.envelope.size() == 5);
}

TEST_CASE("sums CSV") {
    std::ostringstream os;
    write_sums_csv(os, {{10.0, 0.25, cplx(1, -2), SumKind::sharp, 0.0}});
    const std::string s = os.str();
    CHECK(s.rfind(kSumsCsvVersion, 0) == 0);
    CHECK(s.find("T,alpha,re,im,abs") != std::string::npos);
}
