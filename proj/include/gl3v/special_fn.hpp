#pragma once

#include "gl3v/special_fn_types.hpp"

#include <vector>

namespace gl3v {

inline constexpr double kPoleEpsilon = 1e-8;

// Principal log-gamma (analytic continuation from the positive axis for
// Re s >= 1/2, reflection below). Throws PoleError within eps of Z_{<=0}.
cplx log_gamma(cplx s, double eps = kPoleEpsilon);

// G_delta(s) = (2 pi)^{-s} Gamma(s) [e(s/4) + (-1)^delta e(-s/4)].
cplx g_delta(Parity delta, cplx s, double eps = kPoleEpsilon);

// log G_delta(s), stable for large |Im s| where G itself is moderate but
// Gamma and the bracket separately under/overflow. -inf real part at zeros.
cplx log_g_delta(Parity delta, cplx s, double eps = kPoleEpsilon);

// The two textbook forms, evaluated literally; used for cross-checks.
cplx g_delta_exp_form(Parity delta, cplx s);
cplx g_delta_trig_form(Parity delta, cplx s);

// True when s lies within eps of the pole set (2Z + delta) n Z_{<=0}.
bool g_delta_near_pole(Parity delta, cplx s, double eps = kPoleEpsilon);

struct GFactor {
    Parity delta;
    cplx shift{};  // evaluates G_delta(s - shift)

    cplx operator()(cplx s) const { return g_delta(delta, s - shift); }
    cplx log(cplx s) const { return log_g_delta(delta, s - shift); }
};

// |G_delta(sigma + i t)| / (|t| / 2 pi)^{sigma - 1/2}.
double g_stirling_ratio(Parity delta, double sigma, double t);

// Relative residual of prod_j Gamma(s + j/n) = (2 pi)^{(n-1)/2} n^{1/2 - ns} Gamma(ns).
double gamma_multiplication_residual(int n, cplx s);

// E(s) = sum_gamma sum_{j<M} C[gamma][j] 2^{-2s} G_gamma(2s + shift - j),
// an expansion of G_{eps1}(s - mu1) G_{eps2}(s - mu2) for large |Im s|.
struct AsymptoticExpansion {
    int order = 0;
    std::vector<cplx> C[2];
    cplx shift{};          // -(mu1 + mu2) - 1/2
    double scale = 2.0;    // the n in n^{-ns}

    cplx operator()(cplx s) const;
    cplx leading_argument(cplx s) const { return scale * s + shift; }
};

AsymptoticExpansion asymptotic_pair(cplx mu1, cplx mu2, Parity eps1, Parity eps2, int M);

} // namespace gl3v
