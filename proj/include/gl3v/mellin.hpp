#pragma once

#include "gl3v/special_fn_types.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace gl3v {

// A function on R with the shape information the transforms rely on.
struct RealLineFunction {
    std::function<cplx(double)> eval;
    Parity parity;
    double support = std::numeric_limits<double>::infinity();  // zero for |x| >= support
    double order_at_zero = 0.0;                                 // g(x) = O(|x|^order) at 0
};

// x^p exp(-pi x^2), p = parity.
RealLineFunction gaussian_function(Parity p);

// M_eta g(s) = int g(x) |x|^{s-1} sg(x)^eta dx.
// Throws ParityError when g's declared or sampled parity differs from eta,
// DivergenceError when Re s + order_at_zero <= 0.
cplx signed_mellin(const RealLineFunction& g, Parity eta, cplx s, double tol = 1e-13);

// ghat(r) = int g(x) e(-x r) dx.
cplx fourier_transform(const RealLineFunction& g, double r, double tol = 1e-13);

// |M_eta ghat(s) - (-1)^eta G_eta(s) M_eta g(1-s)| with eta = parity of g.
double mellin_fourier_residual(const RealLineFunction& g, cplx s);

// exp(-1/(1-x^2)) on (-1,1), times x for odd parity, divided by its integral.
class Bump {
public:
    explicit Bump(Parity parity = Parity(0)) : parity_(parity) {}

    Parity parity() const { return parity_; }
    double operator()(double x) const { return derivative(0, x); }
    double derivative(int n, double x) const;
    cplx hat(double r) const;

    static double normalization();  // int exp(-1/(1-x^2)) dx

private:
    Parity parity_;
};

enum class Profile { bump, gaussian };

// The (Y, omega, eta) family: phi built from shifted bumps at +-Y and
// f(x) = |x|^{lambda3} sg(x)^{delta3} phihat(x). The gaussian profile is a
// synthetic variant with phi(x) = x^g exp(-pi x^2), g = eta + delta3.
struct TestFunctionFamily {
    double Y = 0.0;
    Parity omega;
    Parity eta;
    Parity delta3;
    cplx lambda3{};
    Profile profile = Profile::bump;
    Bump phi0;
    cplx kappa = 1.0;  // overall scale, applied to phi and f

    Parity phi_parity() const { return delta3 + eta; }
    cplx phi(double x) const;
    cplx phi1(double x) const { return phi(Y * x); }
    cplx phi_hat(double r) const;
    cplx phi0_hat(double r) const { return phi0.hat(r); }
    cplx f(double x) const;
    // f(x) for x > 0 given a precomputed phihat0(x); ignored by the gaussian profile.
    cplx f_positive(double x, cplx phi0_hat_x) const;

    // Largest |x| where phi may be non-zero (infinite for the gaussian).
    double phi_support() const;
    // True when f vanishes identically (Y = 0 with omega = 1).
    bool degenerate() const;

    RealLineFunction f_function() const;
    RealLineFunction phi_function() const;
};

TestFunctionFamily build_test_function(double Y, Parity omega, Parity eta, const EmbeddingParams& params);
TestFunctionFamily build_gaussian_family(Parity eta, const EmbeddingParams& params);

} // namespace gl3v
