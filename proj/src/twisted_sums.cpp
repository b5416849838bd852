#include "gl3v/twisted_sums.hpp"

#include "gl3v/errors.hpp"
#include "gl3v/fft.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>

namespace gl3v {

namespace {

constexpr double kPi = std::numbers::pi;

// e(f) for f in [0, 1), exact at quarter turns.
cplx e_unit(double f) {
    if (f == 0.0) return {1.0, 0.0};
    if (f == 0.25) return {0.0, 1.0};
    if (f == 0.5) return {-1.0, 0.0};
    if (f == 0.75) return {0.0, -1.0};
    if (f > 0.5) f -= 1.0;
    return std::polar(1.0, 2.0 * kPi * f);
}

std::int64_t sum_limit(const CoefficientTable& table, double T) {
    if (!(T >= 0.0)) throw DomainError("sharp_sum: T must be non-negative");
    const auto n = static_cast<std::int64_t>(std::floor(T));
    if (n > table.n_max())
        throw TableTooShortError("sharp_sum: T = " + std::to_string(n) + " exceeds the table length " +
                                 std::to_string(table.n_max()));
    return n;
}

} // namespace

double frac_product(std::int64_t n, double alpha) {
    const double a = alpha - std::floor(alpha);
    const auto nd = static_cast<double>(n);
    const double p = nd * a;
    const double err = std::fma(nd, a, -p);
    double f = p - std::floor(p);
    f += err;
    f -= std::floor(f);
    return f >= 1.0 ? 0.0 : f;
}

cplx e_product(std::int64_t n, double alpha) { return e_unit(frac_product(n, alpha)); }

cplx sharp_sum(const CoefficientTable& table, double T, double alpha) {
    const std::int64_t n_hi = sum_limit(table, T);
    const auto& a = table.values();
    cplx s = 0.0;
    for (std::int64_t n = 1; n <= n_hi; ++n) s += a[static_cast<std::size_t>(n)] * e_product(n, alpha);
    return s;
}

cplx sharp_sum(const CoefficientTable& table, double T, i64 a, i64 c) {
    if (c < 1) throw DomainError("sharp_sum: denominator must be positive");
    const std::int64_t n_hi = sum_limit(table, T);
    const auto& v = table.values();
    const i64 ar = ((a % c) + c) % c;
    cplx s = 0.0;
    for (std::int64_t n = 1; n <= n_hi; ++n) {
        const auto r = static_cast<i64>((static_cast<__int128>(n) * ar) % c);
        s += v[static_cast<std::size_t>(n)] * e_fraction(r, c);
    }
    return s;
}

Weight sharp_weight() {
    return {[](double x) -> cplx { return (x > 0.0 && x <= 1.0) ? 1.0 : 0.0; }, 1.0, false};
}

Weight gaussian_weight() {
    return {[](double x) -> cplx { return std::exp(-kPi * x * x); }, 7.0, true};
}

SumResult smoothed_sum(const CoefficientTable& table, double T, double alpha, const Weight& w, double tol) {
    if (!(T > 0.0)) throw DomainError("smoothed_sum: T must be positive");
    const auto want = static_cast<std::int64_t>(std::ceil(w.support * T));
    if (want > table.n_max() && !w.rapid)
        throw TableTooShortError("smoothed_sum: weight support needs n <= " + std::to_string(want) +
                                 ", table has " + std::to_string(table.n_max()));
    const std::int64_t n_hi = std::min(want, table.n_max());
    const auto& a = table.values();
    cplx s = 0.0;
    double amax = 0.0;
    for (std::int64_t n = 1; n <= n_hi; ++n) {
        const double an = a[static_cast<std::size_t>(n)];
        amax = std::max(amax, std::abs(an));
        if (an == 0.0) continue;
        const double x = static_cast<double>(n) / T;
        const cplx e = e_product(n, alpha);
        s += an * (e * w.phi(x) + std::conj(e) * w.phi(-x));
    }
    SumResult r{T, alpha, s, SumKind::smoothed, 0.0};
    if (w.rapid) {
        // Sampled sum of |phi| over (n_hi, 4 n_hi], times the largest coefficient seen.
        const std::int64_t stride = std::max<std::int64_t>(1, n_hi / 256);
        double acc = 0.0;
        for (std::int64_t n = n_hi + 1; n <= 4 * std::max<std::int64_t>(n_hi, 1); n += stride) {
            const double x = static_cast<double>(n) / T;
            acc += std::abs(w.phi(x)) + std::abs(w.phi(-x));
        }
        r.tail = amax * acc * static_cast<double>(stride);
        if (r.tail > tol * std::max(std::abs(s), amax))
            throw TableTooShortError("smoothed_sum: weight tail past n = " + std::to_string(n_hi) + " is " +
                                     std::to_string(r.tail) + ", above tolerance");
    }
    return r;
}

cplx partial_summation_transfer(const std::vector<cplx>& a, const std::vector<cplx>& b, std::size_t K) {
    if (K < 1) throw DomainError("partial_summation_transfer: K must be at least 1");
    if (a.size() < K || b.size() < K) throw DomainError("partial_summation_transfer: inputs shorter than K");
    cplx A = 0.0, s = 0.0;
    for (std::size_t n = 0; n + 1 < K; ++n) {
        A += a[n];
        s += A * (b[n] - b[n + 1]);
    }
    A += a[K - 1];
    return s + A * b[K - 1];
}

cplx dirichlet_kernel(const KernelSpec& k, double x) {
    cplx s = 0.0;
    for (int n = 1; n <= k.N; ++n) s += e_product(n, x) * k.g(static_cast<double>(n) / k.N);
    return s;
}

double kernel_l1_norm(const KernelSpec& k) {
    if (k.N < 1) throw DomainError("kernel_l1_norm: N must be positive");
    std::size_t M = 1;
    while (M < 16 * static_cast<std::size_t>(k.N)) M <<= 1;
    // Midpoint nodes (j + 1/2)/M: fold the half-step shift into the coefficients.
    std::vector<cplx> c(M, 0.0);
    const double Md = static_cast<double>(M);
    for (int n = 1; n <= k.N; ++n)
        c[static_cast<std::size_t>(n)] = k.g(static_cast<double>(n) / k.N) * std::polar(1.0, kPi * n / Md);
    fft_inplace(c, +1);
    double s = 0.0;
    for (const cplx& v : c) s += std::abs(v);
    return s / Md;
}

struct SharpeningKernel::Cache {
    std::mutex mu;
    std::map<int, std::shared_ptr<const std::vector<double>>> samples;
};

SharpeningKernel::SharpeningKernel(double rho) : rho_(rho), cache_(std::make_shared<Cache>()) {
    if (!(rho > 0.0)) throw DomainError("SharpeningKernel: rho must be positive");
    // A sign change between samples is a zero.
    min_ = std::numeric_limits<double>::infinity();
    double prev = phi0_hat(0.0);
    for (int i = 0; i <= 1024; ++i) {
        const double v = phi0_hat(i / 1024.0);
        min_ = std::min(min_, (v * prev < 0.0) ? 0.0 : std::abs(v));
        prev = v;
    }
    if (min_ < 1e-6)
        throw KernelSingularityError("SharpeningKernel: min |phihat_0| on [0,1] is " + std::to_string(min_) +
                                     " for rho = " + std::to_string(rho));
    double r = 1.0;
    for (; r < 1e6; r *= 1.25) {
        double m = 0.0;
        for (int i = 0; i <= 16; ++i) m = std::max(m, std::abs(phi0_hat(r * (1.0 + i / 16.0))));
        if (m < 1e-13) break;
    }
    tail_point_ = r;
}

double SharpeningKernel::phi0_hat(double r) const {
    static const Bump bump{Parity(0)};
    return bump.hat(rho_ * std::abs(r)).real();
}

KernelSpec SharpeningKernel::kernel(int N) const {
    return {[this](double x) { return 1.0 / phi0_hat(x); }, N};
}

Weight SharpeningKernel::weight() const {
    return {[this](double x) -> cplx { return phi0_hat(x); }, tail_point_, true};
}

std::shared_ptr<const std::vector<double>> SharpeningKernel::weight_samples(int N) const {
    {
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto it = cache_->samples.find(N);
        if (it != cache_->samples.end()) return it->second;
    }
    const auto degree = static_cast<std::size_t>(std::ceil(tail_point_ * N));
    auto v = std::make_shared<std::vector<double>>(degree + 1);
    for (std::size_t m = 0; m <= degree; ++m) (*v)[m] = phi0_hat(static_cast<double>(m) / N);
    std::lock_guard<std::mutex> lock(cache_->mu);
    return cache_->samples.emplace(N, std::move(v)).first->second;
}

cplx sharpen_by_convolution(const std::function<cplx(double)>& smoothed, const SharpeningKernel& kern, int N,
                            double alpha, std::int64_t degree) {
    if (N < 1) throw DomainError("sharpen_by_convolution: N must be positive");
    const auto M = static_cast<std::int64_t>(2 * (N + std::max<std::int64_t>(degree, N)) + 1);
    const KernelSpec k = kern.kernel(N);
    std::vector<double> g(static_cast<std::size_t>(N) + 1);
    for (int n = 1; n <= N; ++n) g[static_cast<std::size_t>(n)] = k.g(static_cast<double>(n) / N);
    cplx s = 0.0;
    for (std::int64_t j = 0; j < M; ++j) {
        cplx D = 0.0;
        for (int n = 1; n <= N; ++n)
            D += g[static_cast<std::size_t>(n)] * e_fraction(static_cast<i64>((static_cast<__int128>(n) * j) % M), M);
        const double beta = static_cast<double>(j) / static_cast<double>(M);
        s += smoothed(alpha - beta) * D;
    }
    return s / static_cast<double>(M);
}

cplx sharpen_by_convolution(const CoefficientTable& table, const SharpeningKernel& kern, int N, double alpha) {
    if (N < 1) throw DomainError("sharpen_by_convolution: N must be positive");
    const auto w = kern.weight_samples(N);
    const auto degree = static_cast<std::int64_t>(w->size()) - 1;
    if (degree > table.n_max())
        throw TableTooShortError("sharpen_by_convolution: smoothed sum needs n <= " + std::to_string(degree));
    std::size_t M = 1;
    while (static_cast<std::int64_t>(M) < 2 * (N + degree) + 1) M <<= 1;
    const auto& a = table.values();

    // smoothed(alpha - j/M) = sum_{m != 0} c_m e(-m j / M).
    std::vector<cplx> c(M, 0.0);
    for (std::int64_t m = 1; m <= degree; ++m) {
        const double am = a[static_cast<std::size_t>(m)];
        if (am == 0.0) continue;
        const double wm = (*w)[static_cast<std::size_t>(m)];
        const cplx e = e_product(m, alpha);
        c[static_cast<std::size_t>(m)] += am * e * wm;
        c[M - static_cast<std::size_t>(m)] += am * std::conj(e) * wm;
    }
    fft_inplace(c, -1);

    const KernelSpec k = kern.kernel(N);
    std::vector<cplx> D(M, 0.0);
    for (int n = 1; n <= N; ++n) D[static_cast<std::size_t>(n)] = k.g(static_cast<double>(n) / N);
    fft_inplace(D, +1);

    cplx s = 0.0;
    for (std::size_t j = 0; j < M; ++j) s += c[j] * D[j];
    return s / static_cast<double>(M);
}

double parseval_residual(const CoefficientTable& table, std::int64_t T) {
    if (T < 1) throw DomainError("parseval_residual: T must be at least 1");
    const std::int64_t n_hi = sum_limit(table, static_cast<double>(T));
    const auto M = static_cast<std::size_t>(2 * T + 1);
    const auto& a = table.values();
    std::vector<cplx> S(M, 0.0);
    double direct = 0.0;
    for (std::int64_t n = 1; n <= n_hi; ++n) {
        S[static_cast<std::size_t>(n)] = a[static_cast<std::size_t>(n)];
        direct += a[static_cast<std::size_t>(n)] * a[static_cast<std::size_t>(n)];
    }
    fft_inplace(S, +1);
    double quad = 0.0;
    for (const cplx& v : S) quad += std::norm(v);
    quad /= static_cast<double>(M);
    return std::abs(quad - direct);
}

std::vector<double> adversarial_alpha_set(std::uint64_t seed, int randoms) {
    std::vector<double> out{(1.0 + std::sqrt(5.0)) / 2.0, std::sqrt(2.0) - 1.0};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < randoms; ++i) out.push_back(u(rng));
    out.push_back(1.0 / 3.0);
    out.push_back(0.0);
    return out;
}

std::pair<double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("least_squares: need at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw DomainError("least_squares: degenerate abscissae");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

namespace {

struct BlockMax {
    double abs = -1.0;
    std::int64_t T = 0;
};

// Maximum of |S(n, alpha)| over n in each block [lo_b, hi_b].
std::vector<BlockMax> block_maxima(const std::vector<double>& a, double alpha,
                                   const std::vector<std::pair<std::int64_t, std::int64_t>>& blocks) {
    std::vector<BlockMax> out(blocks.size());
    cplx s = 0.0;
    std::size_t b = 0;
    const std::int64_t last = blocks.back().second;
    for (std::int64_t n = 1; n <= last; ++n) {
        s += a[static_cast<std::size_t>(n)] * e_product(n, alpha);
        while (b < blocks.size() && n > blocks[b].second) ++b;
        if (b < blocks.size() && n >= blocks[b].first) {
            const double v = std::abs(s);
            if (v > out[b].abs) out[b] = {v, n};
        }
    }
    return out;
}

} // namespace

ExponentFit exponent_fit(const CoefficientTable& table, double T_lo, double T_hi,
                         const std::vector<double>& alpha_set, bool refine) {
    if (alpha_set.empty()) throw DomainError("exponent_fit: empty alpha set");
    if (!(T_lo >= 1.0) || !(T_hi >= 4.0 * T_lo)) throw DomainError("exponent_fit: T range too narrow");
    const auto hi = static_cast<std::int64_t>(std::floor(T_hi));
    sum_limit(table, T_hi);

    std::vector<std::pair<std::int64_t, std::int64_t>> blocks;
    auto lo = static_cast<std::int64_t>(1) << static_cast<int>(std::ceil(std::log2(T_lo)));
    while (2 * lo <= hi) {
        const std::int64_t end = (4 * lo > hi) ? hi : 2 * lo - 1;
        blocks.emplace_back(lo, end);
        lo *= 2;
    }
    if (blocks.size() < 2) throw DomainError("exponent_fit: fewer than two dyadic blocks");

    const auto& a = table.values();
    std::vector<BlockMax> best(blocks.size());
    std::vector<double> best_alpha(blocks.size(), alpha_set.front());
    for (double alpha : alpha_set) {
        const auto bm = block_maxima(a, alpha, blocks);
        for (std::size_t b = 0; b < blocks.size(); ++b)
            if (bm[b].abs > best[b].abs) {
                best[b] = bm[b];
                best_alpha[b] = alpha;
            }
    }
    if (refine) {
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const double step = 1.0 / (16.0 * static_cast<double>(blocks[b].second));
            const double center = best_alpha[b];
            for (int j = -8; j <= 8; ++j) {
                if (j == 0) continue;
                const double alpha = center + j * step;
                const auto bm = block_maxima(a, alpha, {blocks[b]});
                if (bm[0].abs > best[b].abs) {
                    best[b] = bm[0];
                    best_alpha[b] = alpha;
                }
            }
        }
    }

    ExponentFit fit;
    fit.alpha_set = alpha_set;
    std::vector<double> lx, ly;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        fit.envelope.push_back({static_cast<double>(best[b].T), best_alpha[b], best[b].abs});
        if (best[b].abs <= 0.0) throw DomainError("exponent_fit: vanishing envelope");
        lx.push_back(std::log(static_cast<double>(best[b].T)));
        ly.push_back(std::log(best[b].abs));
    }
    std::tie(fit.beta, fit.intercept) = least_squares(lx, ly);
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (fit.intercept + fit.beta * lx[i]);
        ss += r * r;
    }
    fit.rms = std::sqrt(ss / static_cast<double>(lx.size()));
    return fit;
}

void write_sums_csv(std::ostream& os, const std::vector<SumResult>& rows) {
    os << kSumsCsvVersion << '\n' << "T,alpha,re,im,abs\n";
    os << std::setprecision(17);
    for (const auto& r : rows)
        os << r.T << ',' << r.alpha << ',' << r.value.real() << ',' << r.value.imag() << ',' << std::abs(r.value)
           << '\n';
}

} // namespace gl3v
