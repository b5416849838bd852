#pragma once

#include "gl3v/special_fn_types.hpp"

#include <cstdint>
#include <vector>

namespace gl3v {

using i64 = std::int64_t;

i64 gcd(i64 a, i64 b);

// a^{-1} mod c in [0, c). Throws NonInvertibleError when gcd(a, c) != 1.
i64 mod_inverse(i64 a, i64 c);

std::vector<i64> divisors(i64 c);
int mobius(i64 d);

// e(r/c) with r reduced exactly mod c; exact at multiples of a quarter turn.
cplx e_fraction(i64 r, i64 c);

// Kloosterman sum S(n, m; c) = sum over x in (Z/c)^* of e((n x + m xbar)/c).
// Phases are reduced exactly in integers before conversion to floating point.
double kloosterman(i64 n, i64 m, i64 c);

// Brute force over all residues; test and oracle use only.
double kloosterman_naive(i64 n, i64 m, i64 c);

struct Convergent {
    i64 p = 0;
    i64 q = 1;
    int index = 0;
    i64 partial_quotient = 0;
};

// Gauss-map expansion. Stops early at rational alpha: when the fractional
// remainder drops below 1e-14 or a partial quotient would exceed 1e12.
std::vector<Convergent> continued_fraction(double alpha, int max_depth = 64);

struct ApproximantChoice {
    i64 a = 0;       // -p_k
    i64 c = 1;       // q_k
    double Y = 0.0;  // T |alpha + a/c|
    int k = 0;
    bool terminal = false;  // expansion ended before q_{k+1}^2 >= T
};

// Picks the convergent with q_k^2 <= T <= q_{k+1}^2.
ApproximantChoice select_approximant(double alpha, double T);

} // namespace gl3v
