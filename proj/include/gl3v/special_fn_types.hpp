#pragma once

#include <array>
#include <complex>

namespace gl3v {

using cplx = std::complex<double>;

// Element of Z/2Z. Arithmetic wraps; used as the exponent of (-1) and sg(x).
class Parity {
public:
    constexpr Parity() = default;
    constexpr explicit Parity(int v) : v_(((v % 2) + 2) % 2) {}
    constexpr int value() const { return v_; }
    constexpr double sign() const { return v_ ? -1.0 : 1.0; }
    friend constexpr Parity operator+(Parity a, Parity b) { return Parity(a.v_ + b.v_); }
    friend constexpr bool operator==(Parity a, Parity b) = default;

private:
    int v_ = 0;
};

// Archimedean data (lambda_j, delta_j) of a GL(3) form.
struct EmbeddingParams {
    std::array<cplx, 3> lambda{};
    std::array<Parity, 3> delta{};

    // Sum lambda = 0 and sum delta even.
    bool normalized(double tol = 1e-12) const;
    // Re l1, Re l2 <= Re l3; Re l1, Re l2 < 1/2; Re l3 >= 0.
    bool ordered() const;

    // Throws DomainError unless normalized() && ordered().
    void validate() const;

    // (-2it, -(k-1)/2 + it, (k-1)/2 + it) with delta1 = k mod 2 and the
    // split (delta2, delta3) = (0, k mod 2).
    static EmbeddingParams discrete_series(int k, double t = 0.0);
};

} // namespace gl3v
