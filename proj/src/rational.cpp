#include "gl3v/rational.hpp"

#include "gl3v/errors.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace gl3v {

i64 gcd(i64 a, i64 b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b != 0) {
        i64 r = a % b;
        a = b;
        b = r;
    }
    return a;
}

i64 mod_inverse(i64 a, i64 c) {
    if (c < 1) throw DomainError("mod_inverse: modulus must be positive");
    i64 r0 = ((a % c) + c) % c, r1 = c;
    i64 s0 = 1, s1 = 0;
    while (r1 != 0) {
        i64 qt = r0 / r1;
        i64 t = r0 - qt * r1;
        r0 = r1;
        r1 = t;
        t = s0 - qt * s1;
        s0 = s1;
        s1 = t;
    }
    if (c == 1) return 0;
    if (r0 != 1) throw NonInvertibleError("mod_inverse: gcd(a, c) != 1");
    return ((s0 % c) + c) % c;
}

std::vector<i64> divisors(i64 c) {
    if (c < 0) c = -c;
    std::vector<i64> lo, hi;
    for (i64 d = 1; d * d <= c; ++d) {
        if (c % d == 0) {
            lo.push_back(d);
            if (d * d != c) hi.push_back(c / d);
        }
    }
    lo.insert(lo.end(), hi.rbegin(), hi.rend());
    return lo;
}

int mobius(i64 d) {
    if (d < 1) throw DomainError("mobius: argument must be positive");
    int sign = 1;
    for (i64 p = 2; p * p <= d; ++p) {
        if (d % p == 0) {
            d /= p;
            if (d % p == 0) return 0;
            sign = -sign;
        }
    }
    if (d > 1) sign = -sign;
    return sign;
}

namespace {

i64 mulmod(i64 a, i64 b, i64 m) {
    return static_cast<i64>((static_cast<__int128>(a) * b) % m);
}

double cos_of_fraction(i64 r, i64 c) {
    // cos(2 pi r / c) with r already reduced to [0, c); fold to the nearer
    // half-period to keep the argument small.
    if (2 * r > c) r -= c;
    return std::cos(2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(c));
}

} // namespace

cplx e_fraction(i64 r, i64 c) {
    if (c < 1) throw DomainError("e_fraction: denominator must be positive");
    r = ((r % c) + c) % c;
    if ((4 * r) % c == 0) {
        switch (4 * r / c) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
        }
    }
    if (2 * r > c) r -= c;
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(c));
}

double kloosterman(i64 n, i64 m, i64 c) {
    if (c < 1) throw DomainError("kloosterman: modulus must be positive");
    if (c == 1) return 1.0;
    const i64 nr = ((n % c) + c) % c;
    const i64 mr = ((m % c) + c) % c;
    // Imaginary parts cancel in pairs x <-> -x, so only cosines accumulate.
    double sum = 0.0;
    for (i64 x = 1; x < c; ++x) {
        if (gcd(x, c) != 1) continue;
        const i64 xbar = mod_inverse(x, c);
        const i64 r = (mulmod(nr, x, c) + mulmod(mr, xbar, c)) % c;
        sum += cos_of_fraction(r, c);
    }
    return sum;
}

double kloosterman_naive(i64 n, i64 m, i64 c) {
    if (c < 1) throw DomainError("kloosterman: modulus must be positive");
    std::complex<double> sum = 0.0;
    for (i64 x = 0; x < c; ++x) {
        if (gcd(x, c) != 1) continue;
        i64 xbar = 0;
        while ((x * xbar) % c != 1 % c) ++xbar;
        const double arg = 2.0 * std::numbers::pi *
                           static_cast<double>(n * x + m * xbar) / static_cast<double>(c);
        sum += std::polar(1.0, arg);
    }
    return sum.real();
}

std::vector<Convergent> continued_fraction(double alpha, int max_depth) {
    if (max_depth < 1) throw DomainError("continued_fraction: max_depth must be >= 1");
    std::vector<Convergent> out;
    i64 p_prev = 1, q_prev = 0;  // p_{-1}, q_{-1}
    i64 p_prev2 = 0, q_prev2 = 1;  // p_{-2}, q_{-2}
    double x = alpha;
    for (int k = 0; k < max_depth; ++k) {
        const double fl = std::floor(x);
        if (std::fabs(fl) > 1e12) break;
        const i64 ak = static_cast<i64>(fl);
        const __int128 p = static_cast<__int128>(ak) * p_prev + p_prev2;
        const __int128 q = static_cast<__int128>(ak) * q_prev + q_prev2;
        if (q > static_cast<__int128>(1) << 62 || p > static_cast<__int128>(1) << 62 ||
            p < -(static_cast<__int128>(1) << 62))
            break;
        out.push_back({static_cast<i64>(p), static_cast<i64>(q), k, ak});
        p_prev2 = p_prev;
        q_prev2 = q_prev;
        p_prev = static_cast<i64>(p);
        q_prev = static_cast<i64>(q);
        const double frac = x - fl;
        if (frac < 1e-14) break;
        x = 1.0 / frac;
        if (x > 1e12) break;
    }
    return out;
}

ApproximantChoice select_approximant(double alpha, double T) {
    if (!(T >= 1.0)) throw DomainError("select_approximant: T must be >= 1");
    const auto cf = continued_fraction(alpha, 64);
    ApproximantChoice choice;
    std::size_t k = 0;
    while (k + 1 < cf.size() &&
           static_cast<double>(cf[k + 1].q) * static_cast<double>(cf[k + 1].q) <= T)
        ++k;
    choice.k = static_cast<int>(k);
    choice.a = -cf[k].p;
    choice.c = cf[k].q;
    choice.terminal = (k + 1 == cf.size());
    // Y computed from the exact residual alpha - p/q; reduce with fma to keep
    // the small difference accurate.
    const double resid =
        std::fma(-static_cast<double>(cf[k].p), 1.0 / static_cast<double>(cf[k].q), alpha);
    choice.Y = T * std::fabs(resid);
    if (choice.terminal && std::fabs(resid) < 1e-14) choice.Y = 0.0;
    return choice;
}

} // namespace gl3v
