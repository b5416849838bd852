#include "gl3v/special_fn.hpp"

#include "gl3v/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace gl3v {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};
const double kLog2Pi = std::log(2.0 * kPi);

// B_{2k} / (2k (2k-1)), k = 1..10.
constexpr double kStirling[] = {
    1.0 / 12.0,        -1.0 / 360.0,        1.0 / 1260.0,       -1.0 / 1680.0,
    1.0 / 1188.0,      -691.0 / 360360.0,   1.0 / 156.0,        -3617.0 / 122400.0,
    43867.0 / 244188.0, -174611.0 / 125400.0,
};

cplx stirling(cplx z) {
    cplx r = (z - 0.5) * std::log(z) - z + 0.5 * kLog2Pi;
    const cplx w = 1.0 / z;
    const cplx w2 = w * w;
    cplx p = w;
    for (double c : kStirling) {
        r += c * p;
        p *= w2;
    }
    return r;
}

// log sin(pi z), free of overflow for large |Im z|. Branch fixed only mod 2 pi i.
cplx log_sin_pi(cplx z) {
    const double y = z.imag();
    if (std::abs(y) < 5.0) return std::log(std::sin(kPi * z));
    if (y > 0) {
        const cplx q = std::exp(2.0 * kPi * kI * z);
        return -kI * kPi * z + std::log((q - 1.0) / (2.0 * kI));
    }
    const cplx q = std::exp(-2.0 * kPi * kI * z);
    return kI * kPi * z + std::log((1.0 - q) / (2.0 * kI));
}

double distance_to_nonpositive_integers(cplx s) {
    const double re = s.real();
    if (re > 0.5) return std::abs(s);  // nearest candidate is 0
    const double n = std::round(re);
    return std::abs(s - cplx(std::min(n, 0.0), 0.0));
}

cplx log_gamma_right(cplx s) {
    // Upward recurrence until Stirling is accurate, with complex logs summed
    // term by term so the result stays on the analytic branch.
    cplx shift = 0.0;
    cplx z = s;
    while (std::abs(z) < 13.0 || z.real() < 0.5) {
        shift += std::log(z);
        z += 1.0;
    }
    return stirling(z) - shift;
}

} // namespace

cplx log_gamma(cplx s, double eps) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) throw DomainError("log_gamma: non-finite argument");
    if (s.real() <= 0.5 && distance_to_nonpositive_integers(s) < eps) {
        std::ostringstream os;
        os << "log_gamma: argument " << s << " is at a pole";
        throw PoleError(os.str());
    }
    if (s.real() >= 0.5) return log_gamma_right(s);
    cplx r = std::log(kPi) - log_sin_pi(s) - log_gamma_right(1.0 - s);
    if (s.imag() == 0.0) r = cplx(r.real(), 0.0) + cplx(0.0, r.imag());
    return r;
}

bool g_delta_near_pole(Parity delta, cplx s, double eps) {
    if (s.real() > 0.5) return false;
    double n = std::round(s.real());
    if (n > 0) n = 0;
    // Nearest member of (2Z + delta) n Z_{<=0}.
    const int ni = static_cast<int>(n);
    double best = 1e300;
    for (int m : {ni - 1, ni, ni + 1}) {
        if (m > 0 || Parity(m) != delta) continue;
        best = std::min(best, std::abs(s - cplx(m, 0.0)));
    }
    return best < eps;
}

namespace {

// log of e(z/4) + (-1)^delta e(-z/4), factoring out the dominant exponential.
cplx log_bracket(Parity delta, cplx z) {
    const double sgn = delta.sign();
    if (z.imag() >= 0) {
        // e(-z/4) dominates.
        return -kI * (kPi / 2.0) * z + std::log(sgn + std::exp(kI * kPi * z));
    }
    return kI * (kPi / 2.0) * z + std::log(1.0 + sgn * std::exp(-kI * kPi * z));
}

cplx log_g_right(Parity delta, cplx s) {
    return -s * kLog2Pi + log_gamma_right(s) + log_bracket(delta, s);
}

void check_pole(Parity delta, cplx s, double eps) {
    if (g_delta_near_pole(delta, s, eps)) {
        std::ostringstream os;
        os << "G_" << delta.value() << ": argument " << s << " is at a pole";
        throw PoleError(os.str());
    }
}

} // namespace

cplx log_g_delta(Parity delta, cplx s, double eps) {
    check_pole(delta, s, eps);
    if (s.real() >= 0.5) return log_g_right(delta, s);
    // G_delta(s) = (2 pi)^{-s} pi / (Gamma(1-s) * {sin, cos}(pi s / 2)) times {1, i}.
    const cplx half = s / 2.0;
    cplx trig = delta.value() == 0 ? log_sin_pi(half) : log_sin_pi(half + 0.5);
    cplx r = -s * kLog2Pi + std::log(kPi) - trig - log_gamma_right(1.0 - s);
    if (delta.value() == 1) r += kI * (kPi / 2.0);
    return r;
}

cplx g_delta(Parity delta, cplx s, double eps) {
    const cplx l = log_g_delta(delta, s, eps);
    if (!std::isfinite(l.real())) return 0.0;
    return std::exp(l);
}

cplx g_delta_exp_form(Parity delta, cplx s) {
    const cplx gam = std::exp(log_gamma(s));
    return std::pow(2.0 * kPi, -s) * gam *
           (std::exp(kI * kPi * s / 2.0) + delta.sign() * std::exp(-kI * kPi * s / 2.0));
}

cplx g_delta_trig_form(Parity delta, cplx s) {
    const cplx gam = std::exp(log_gamma(s));
    const cplx base = 2.0 * std::pow(2.0 * kPi, -s) * gam;
    return delta.value() == 0 ? base * std::cos(kPi * s / 2.0) : kI * base * std::sin(kPi * s / 2.0);
}

double g_stirling_ratio(Parity delta, double sigma, double t) {
    if (std::abs(t) < 1.0) throw DomainError("g_stirling_ratio: need |t| >= 1");
    const cplx l = log_g_delta(delta, cplx(sigma, t));
    return std::exp(l.real() - (sigma - 0.5) * std::log(std::abs(t) / (2.0 * kPi)));
}

double gamma_multiplication_residual(int n, cplx s) {
    if (n < 2) throw DomainError("gamma_multiplication_residual: n >= 2 required");
    cplx lhs = 0.0;
    for (int j = 0; j < n; ++j) lhs += log_gamma(s + static_cast<double>(j) / n);
    const cplx rhs = 0.5 * (n - 1) * kLog2Pi + (0.5 - static_cast<double>(n) * s) * std::log(static_cast<double>(n)) +
                     log_gamma(static_cast<double>(n) * s);
    return std::abs(std::exp(lhs - rhs) - 1.0);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> bernoulli_numbers(int n) {
    std::vector<double> B(n + 1, 0.0);
    B[0] = 1.0;
    for (int m = 1; m <= n; ++m) {
        double acc = 0.0;
        double binom = 1.0;  // C(m+1, k)
        for (int k = 0; k < m; ++k) {
            acc += binom * B[k];
            binom = binom * (m + 1 - k) / (k + 1);
        }
        B[m] = -acc / (m + 1);
    }
    return B;
}

cplx bernoulli_poly(int n, cplx x, const std::vector<double>& B) {
    cplx r = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= n; ++k) {
        r += binom * B[k] * std::pow(x, n - k);
        binom = binom * (n - k) / (k + 1);
    }
    return r;
}

using Series = std::vector<cplx>;

Series mul(const Series& a, const Series& b) {
    Series r(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; i + j < a.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

Series exp_series(const Series& a) {
    // a[0] == 0; r' = a' r.
    Series r(a.size(), 0.0);
    r[0] = 1.0;
    for (std::size_t n = 1; n < a.size(); ++n) {
        cplx acc = 0.0;
        for (std::size_t k = 1; k <= n; ++k) acc += static_cast<double>(k) * a[k] * r[n - k];
        r[n] = acc / static_cast<double>(n);
    }
    return r;
}

} // namespace

AsymptoticExpansion asymptotic_pair(cplx mu1, cplx mu2, Parity eps1, Parity eps2, int M) {
    if (M < 1) throw DomainError("asymptotic_pair: order must be >= 1");
    const cplx nu = mu1 + mu2 + 0.5;
    const cplx a1 = -mu1, a2 = -mu2, b = -nu;
    const auto B = bernoulli_numbers(M + 2);

    // Gamma(s+a1)Gamma(s+a2)/Gamma(2s+b) = sqrt(2 pi) 2^{-2s-b+1/2} exp(sum c_k s^{-k}).
    Series c(M, 0.0);
    for (int k = 1; k < M; ++k) {
        const double sgn = (k % 2 == 1) ? 1.0 : -1.0;
        c[k] = sgn / (k * (k + 1.0)) *
               (bernoulli_poly(k + 1, a1, B) + bernoulli_poly(k + 1, a2, B) -
                bernoulli_poly(k + 1, b, B) / std::pow(2.0, k));
    }
    const Series target = exp_series(c);

    // Basis Gamma(z-j)/Gamma(z) = u^j prod_{i<=j} 1/(2 + (b-i) u), z = 2/u + b.
    std::vector<Series> basis;
    Series g(M, 0.0);
    g[0] = 1.0;
    for (int j = 0; j < M; ++j) {
        if (j > 0) {
            // multiply by u / (2 + (b - j) u) = (u/2) sum (-(b-j) u/2)^k
            Series f(M, 0.0);
            const cplx r = -(b - static_cast<double>(j)) / 2.0;
            cplx p = 0.5;
            for (int k = 1; k < M; ++k) {
                f[k] = p;
                p *= r;
            }
            g = mul(g, f);
        }
        basis.push_back(g);
    }
    std::vector<cplx> e(M, 0.0);
    for (int j = 0; j < M; ++j) {
        cplx acc = target[j];
        for (int i = 0; i < j; ++i) acc -= e[i] * basis[i][j];
        e[j] = acc / basis[j][j];
    }

    const cplx lead = std::pow(2.0, nu + 0.5);
    const cplx e8 = std::exp(kI * kPi / 4.0);
    const double sgn = (eps1 + eps2).sign();
    AsymptoticExpansion E;
    E.order = M;
    E.shift = -nu;
    E.scale = 2.0;
    E.C[0].resize(M);
    E.C[1].resize(M);
    for (int j = 0; j < M; ++j) {
        const double tp = std::pow(2.0 * kPi, j);
        const cplx ij = std::exp(kI * kPi * (j / 2.0));  // e(j/4)
        const cplx dp = lead * e8 * e[j] * ij / tp;
        const cplx dm = sgn * lead * std::conj(e8) * e[j] / (ij * tp);
        E.C[0][j] = 0.5 * (dp + dm);
        E.C[1][j] = 0.5 * (dp - dm);
    }
    return E;
}

cplx AsymptoticExpansion::operator()(cplx s) const {
    cplx sum = 0.0;
    const cplx pre = -scale * s * std::log(scale);
    for (int g = 0; g < 2; ++g) {
        for (int j = 0; j < order; ++j) {
            if (C[g][j] == 0.0) continue;
            sum += C[g][j] * std::exp(pre + log_g_delta(Parity(g), scale * s + shift - static_cast<double>(j)));
        }
    }
    return sum;
}

// ---------------------------------------------------------------------------

bool EmbeddingParams::normalized(double tol) const {
    return std::abs(lambda[0] + lambda[1] + lambda[2]) <= tol && (delta[0] + delta[1] + delta[2]).value() == 0;
}

bool EmbeddingParams::ordered() const {
    const double r1 = lambda[0].real(), r2 = lambda[1].real(), r3 = lambda[2].real();
    return r1 <= r3 && r2 <= r3 && r1 < 0.5 && r2 < 0.5 && r3 >= 0.0;
}

void EmbeddingParams::validate() const {
    if (!normalized()) throw DomainError("embedding parameters: need sum lambda = 0 and sum delta even");
    if (!ordered()) throw DomainError("embedding parameters: lambda_3 must carry the maximal real part");
}

EmbeddingParams EmbeddingParams::discrete_series(int k, double t) {
    if (k < 2) throw DomainError("discrete series weight must be >= 2");
    EmbeddingParams p;
    const double h = (k - 1) / 2.0;
    p.lambda = {cplx(0.0, -2.0 * t), cplx(-h, t), cplx(h, t)};
    p.delta = {Parity(k), Parity(0), Parity(k)};
    return p;
}

} // namespace gl3v
