#pragma once

#include "gl3v/coefficients.hpp"
#include "gl3v/ftransform.hpp"
#include "gl3v/mellin.hpp"
#include "gl3v/rational.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace gl3v {

struct VoronoiInstance {
    const CoefficientTable* table = nullptr;
    EmbeddingParams params;
    i64 q = 1;
    i64 a = 0;
    i64 c = 1;
    double T = 10.0;
    TestFunctionFamily fam;
    VerticalLineSpec line;

    // Throws DomainError / NonInvertibleError on bad data.
    void validate() const;
    // a^{-1} mod |c|.
    i64 abar() const;
};

// Builds the instance with the (Y, omega, eta) bump family for the table's
// embedding parameters. A negative c is replaced by (-a, -c).
VoronoiInstance make_instance(const CoefficientTable& table, i64 q, i64 a, i64 c, double T, double Y,
                              Parity omega, Parity eta, VerticalLineSpec line = {});

struct TruncationOptions {
    double budget = 1e-4;          // allowed tail relative to |value| + floor
    double floor = 0.0;            // absolute scale added to |value| in budget checks
    double quiet_fraction = 1e-2;  // a dyadic block is quiet below quiet_fraction * budget
    int quiet_blocks = 3;
    std::int64_t n_limit = 0;      // hard cap on n per divisor (0: none)
};

struct SideSum {
    cplx value{};
    double tail = 0.0;
    std::int64_t n_cutoff = 0;
};

struct DivisorTerm {
    i64 d = 1;
    i64 modulus = 1;       // q c / d
    double X = 0.0;        // c^3 q / (d^2 T); F is sampled at n / X
    std::int64_t n_cutoff = 0;
    cplx partial{};
    double tail_estimate = 0.0;
    double quad_error = 0.0;
    bool table_limited = false;  // the cutoff was forced by the table length or n_limit
};

struct RhsSum {
    cplx value{};
    double tail = 0.0;
    double quad_error = 0.0;
    std::vector<DivisorTerm> terms;  // sorted by d
};

// sum_{n != 0} a_{q,n} e(-n a / c) f(n / T). Throws TableTooShortError when the
// table does not cover the support of f(. / T).
SideSum lhs_sum(const VoronoiInstance& inst);

// sum_{d | cq} |c/d| sum_{n != 0} a_{n,d} / |n| S(q abar, n; qc/d) F(n d^2 T / (c^3 q)).
// Each divisor's n-sum runs over dyadic blocks and stops after quiet_blocks
// quiet blocks past its largest one, once the envelope tail is within budget, or
// at the end of F's support. Throws BudgetError when the certified tail exceeds
// the budget.
RhsSum rhs_sum(const VoronoiInstance& inst, const TruncationOptions& opts = {});

struct IdentityReport {
    i64 q = 1, a = 0, c = 1;
    double T = 0.0, Y = 0.0;
    int omega = 0, eta = 0;
    cplx lhs{}, rhs{};
    double floor = 0.0;
    double residual = 0.0;       // |lhs - rhs| / (|lhs| + |rhs| + floor)
    double lhs_tail = 0.0;
    double rhs_tail = 0.0;
    double rhs_quad_error = 0.0;
    double error_budget = 0.0;   // (lhs_tail + rhs_tail + rhs_quad_error) / (|lhs| + |rhs| + floor)
    std::int64_t lhs_cutoff = 0;
    std::vector<DivisorTerm> divisors;

    // Key-value lines, one field per line.
    void write_kv(std::ostream& os) const;
    // Columns d, n_cutoff, partial_re, partial_im, tail_estimate after a version line.
    void write_divisor_csv(std::ostream& os) const;
};

// floor = 1e-12 T max|a_n| over the coefficients used on the left.
IdentityReport identity_residual(const VoronoiInstance& inst, const TruncationOptions& opts = {});

struct ScalingPoint {
    double T = 0.0;
    i64 a = 0, c = 1;
    double Y = 0.0;
    double rhs_abs = 0.0;
    double lhs_abs = 0.0;
    double residual = 0.0;
};

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<ScalingPoint> points;
};

// For each T: (a, c, Y) from select_approximant(alpha, T), the (Y, 0, 0) family,
// q = 1; least-squares slope of log |rhs| against log T.
ScalingFit rhs_scaling_experiment(const CoefficientTable& table, double alpha, const std::vector<double>& T_grid,
                                  const TruncationOptions& opts = {}, VerticalLineSpec line = {});

} // namespace gl3v
