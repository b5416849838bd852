#pragma once

#include "gl3v/coefficients.hpp"
#include "gl3v/mellin.hpp"
#include "gl3v/rational.hpp"
#include "gl3v/special_fn_types.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace gl3v {

// n alpha mod 1 in [0, 1). The product is split exactly with an fma so the
// reduction does not lose the low bits of n alpha for large n.
double frac_product(std::int64_t n, double alpha);

// e(n alpha) through frac_product.
cplx e_product(std::int64_t n, double alpha);

enum class SumKind { sharp, smoothed };

struct SumResult {
    double T = 0.0;
    double alpha = 0.0;
    cplx value{};
    SumKind kind = SumKind::sharp;
    double tail = 0.0;  // truncation estimate (smoothed sums)
};

// sum_{n <= T} a_n e(n alpha). Throws TableTooShortError when floor(T) > n_max.
cplx sharp_sum(const CoefficientTable& table, double T, double alpha);

// Exact-rational phase mode: alpha = a / c, phases e(n a / c) reduced in integers.
cplx sharp_sum(const CoefficientTable& table, double T, i64 a, i64 c);

// A weight phi on R for smoothed sums. support: phi vanishes for |x| >= support
// (for rapidly decaying weights the point past which |phi| is negligible).
// rapid: phi does not vanish past support, so the tail is estimated.
struct Weight {
    std::function<cplx(double)> phi;
    double support = 1.0;
    bool rapid = false;
};

// Indicator of (0, 1]; recovers the sharp sum.
Weight sharp_weight();
// exp(-pi x^2).
Weight gaussian_weight();

// sum_{n != 0} a_{|n|} e(n alpha) phi(n / T) with a tail estimate.
// Throws TableTooShortError when the table does not cover support * T, or the
// estimated tail exceeds tol relative to the value.
SumResult smoothed_sum(const CoefficientTable& table, double T, double alpha, const Weight& w, double tol = 1e-10);

// sum_{n<K} A_n (b_n - b_{n+1}) + A_K b_K with A_n = a_1 + ... + a_n.
// a and b are indexed from n = 1 at position 0 and must have at least K entries.
cplx partial_summation_transfer(const std::vector<cplx>& a, const std::vector<cplx>& b, std::size_t K);

struct KernelSpec {
    std::function<double(double)> g;  // weight on [0, 1]
    int N = 1;
};

// D_{g,N}(x) = sum_{n=1}^N e(n x) g(n / N).
cplx dirichlet_kernel(const KernelSpec& k, double x);

// int_0^1 |D_{g,N}(x)| dx, midpoint rule at M >= 16 N nodes (M a power of two).
double kernel_l1_norm(const KernelSpec& k);

// phi_0(x) = rho^{-1} B(x / rho) for the even bump B, so that
// phihat_0(r) = Bhat(rho r). Its transform is non-zero on [0, 1] when rho
// keeps rho inside the first lobe of Bhat. The constructor throws
// KernelSingularityError if min_{[0,1]} |phihat_0| < 1e-6.
class SharpeningKernel {
public:
    explicit SharpeningKernel(double rho = 0.5);

    double rho() const { return rho_; }
    double phi0_hat(double r) const;
    double min_on_unit() const { return min_; }
    // g = 1 / phihat_0 on [0, 1].
    KernelSpec kernel(int N) const;
    // phihat_0 as a smoothed-sum weight, truncated where |phihat_0| < 1e-13.
    Weight weight() const;
    // phihat_0(m / N) for m = 0..ceil(support N), memoized per N.
    std::shared_ptr<const std::vector<double>> weight_samples(int N) const;

private:
    struct Cache;
    double rho_;
    double min_ = 0.0;
    double tail_point_ = 0.0;
    std::shared_ptr<Cache> cache_;
};

// int_{R/Z} smoothed(alpha - beta) D_{g,N}(beta) d beta at M equally spaced
// nodes, where smoothed(theta) = sum_n a_n e(n theta) phihat_0(n / N) and
// g = 1/phihat_0. degree bounds the frequencies of smoothed; the rule is
// exact with M >= 2 (N + degree) + 1 and reproduces sum_{n <= N} a_n e(n alpha).
cplx sharpen_by_convolution(const std::function<cplx(double)>& smoothed, const SharpeningKernel& kern, int N,
                            double alpha, std::int64_t degree);

// Same, with the smoothed evaluator built from the table; the M node values
// are produced with one FFT rather than M separate sums.
cplx sharpen_by_convolution(const CoefficientTable& table, const SharpeningKernel& kern, int N, double alpha);

// |(1/M) sum_j |S(T, j/M)|^2 - sum_{n <= T} |a_n|^2| at M = 2T + 1 nodes.
double parseval_residual(const CoefficientTable& table, std::int64_t T);

struct FitPoint {
    double T = 0.0;
    double alpha = 0.0;
    double abs = 0.0;
};

struct ExponentFit {
    double beta = 0.0;
    double intercept = 0.0;
    double rms = 0.0;                 // residual of the log-log fit
    std::vector<FitPoint> envelope;   // max over each dyadic block
    std::vector<double> alpha_set;
};

// Golden ratio, sqrt 2 - 1, `randoms` seeded uniform points, 1/3 and 0.
std::vector<double> adversarial_alpha_set(std::uint64_t seed = 1, int randoms = 10);

// Least-squares slope of log max_alpha |S(T, alpha)| over dyadic blocks
// [2^k, 2^{k+1}) covering [T_lo, T_hi]. Within each block the maximum is over
// every integer T and the alpha set, followed by a local refinement around the
// maximizing alpha. A lower bound on the sup over alpha.
ExponentFit exponent_fit(const CoefficientTable& table, double T_lo, double T_hi,
                         const std::vector<double>& alpha_set, bool refine = true);

// Least-squares slope and intercept of y against x.
std::pair<double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y);

inline constexpr const char* kSumsCsvVersion = "# gl3v sums v1";

// Columns T, alpha, re, im, abs after the version line.
void write_sums_csv(std::ostream& os, const std::vector<SumResult>& rows);

} // namespace gl3v
