#pragma once

#include "gl3v/special_fn_types.hpp"

#include <functional>
#include <vector>

namespace gl3v {

struct QuadResult {
    cplx value{};
    double error = 0.0;  // difference between the last two refinement levels
    int evaluations = 0;
};

// Tanh-sinh rule on a finite interval. Endpoint singularities of algebraic
// type are tolerated; the integrand is never evaluated at a or b.
QuadResult tanh_sinh(const std::function<cplx(double)>& f, double a, double b, double tol = 1e-13,
                     int max_level = 12);

// Exp-sinh rule on (0, inf) for integrands decaying at infinity. Each side
// stops at the first node where the weighted integrand underflows.
QuadResult exp_sinh(const std::function<cplx(double)>& f, double tol = 1e-13, int max_level = 12);

// Fixed tanh-sinh nodes on (-1, 1) at step h, for batched evaluation.
struct NodeSet {
    std::vector<double> x;      // tanh((pi/2) sinh(kh))
    std::vector<double> xc;     // 1 - |x|, free of cancellation near the ends
    std::vector<double> w;
};
const NodeSet& tanh_sinh_nodes(double h);

} // namespace gl3v
