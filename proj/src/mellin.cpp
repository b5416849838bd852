#include "gl3v/mellin.hpp"

#include "gl3v/errors.hpp"
#include "gl3v/quadrature.hpp"
#include "gl3v/special_fn.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gl3v {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

double extent_of(const RealLineFunction& g) {
    if (std::isfinite(g.support)) return g.support;
    double peak = 0.0;
    int quiet = 0;
    double x = 0.125;
    for (; x < 1e4; x *= 1.25) {
        const double v = std::abs(g.eval(x));
        peak = std::max(peak, v);
        quiet = (x > 1.0 && v < 1e-15 * peak) ? quiet + 1 : 0;
        if (quiet == 3) break;
    }
    if (quiet < 3) throw DomainError("function does not decay fast enough to be truncated");
    return x;
}

void check_parity(const RealLineFunction& g, Parity eta) {
    if (g.parity != eta) {
        std::ostringstream os;
        os << "signed_mellin: function has parity " << g.parity.value() << " but transform requested with eta = "
           << eta.value();
        throw ParityError(os.str());
    }
    const double ext = std::isfinite(g.support) ? g.support : 4.0;
    for (double frac : {0.113, 0.37, 0.61, 0.89}) {
        const double x = frac * ext;
        const cplx a = g.eval(x), b = g.eval(-x);
        if (std::abs(a - g.parity.sign() * b) > 1e-9 * (std::abs(a) + std::abs(b)) + 1e-300)
            throw ParityError("signed_mellin: sampled values contradict the declared parity");
    }
}

} // namespace

RealLineFunction gaussian_function(Parity p) {
    RealLineFunction g;
    g.parity = p;
    g.order_at_zero = p.value();
    g.eval = [p](double x) -> cplx { return (p.value() ? x : 1.0) * std::exp(-kPi * x * x); };
    g.support = std::numeric_limits<double>::infinity();
    return g;
}

cplx signed_mellin(const RealLineFunction& g, Parity eta, cplx s, double tol) {
    check_parity(g, eta);
    if (s.real() + g.order_at_zero <= 0.0) {
        std::ostringstream os;
        os << "signed_mellin: integral diverges at the origin for Re s = " << s.real();
        throw DivergenceError(os.str());
    }
    const double ext = extent_of(g);
    auto integrand = [&](double x) -> cplx { return g.eval(x) * std::exp((s - 1.0) * std::log(x)); };
    // Split at x = 1 so the algebraic endpoint at 0 gets its own panel.
    cplx total = 0.0;
    if (ext <= 1.0) {
        total = tanh_sinh(integrand, 0.0, ext, tol).value;
    } else {
        total = tanh_sinh(integrand, 0.0, 1.0, tol).value;
        const int panels = static_cast<int>(std::ceil((ext - 1.0) * (1.0 + std::abs(s.imag()) / 4.0)));
        const double w = (ext - 1.0) / panels;
        for (int k = 0; k < panels; ++k) total += tanh_sinh(integrand, 1.0 + k * w, 1.0 + (k + 1) * w, tol).value;
    }
    return 2.0 * total;
}

cplx fourier_transform(const RealLineFunction& g, double r, double tol) {
    const double ext = extent_of(g);
    const bool odd = g.parity.value() == 1;
    auto integrand = [&](double x) -> cplx {
        const double ph = 2.0 * kPi * x * r;
        return g.eval(x) * (odd ? std::sin(ph) : std::cos(ph));
    };
    const int panels = std::max(1, static_cast<int>(std::ceil(ext * (1.0 + std::abs(r)) / 2.0)));
    const double w = ext / panels;
    cplx total = 0.0;
    for (int k = 0; k < panels; ++k) total += tanh_sinh(integrand, k * w, (k + 1) * w, tol).value;
    return odd ? -2.0 * kI * total : 2.0 * total;
}

double mellin_fourier_residual(const RealLineFunction& g, cplx s) {
    const Parity eta = g.parity;
    RealLineFunction ghat;
    ghat.parity = eta;
    ghat.order_at_zero = eta.value();
    ghat.eval = [&g](double r) { return fourier_transform(g, r); };
    ghat.support = extent_of(ghat);
    const cplx lhs = signed_mellin(ghat, eta, s);
    const cplx rhs = eta.sign() * g_delta(eta, s) * signed_mellin(g, eta, 1.0 - s);
    return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------

namespace {

using Poly = std::vector<double>;

// P_n with d^n/dx^n exp(-1/(1-x^2)) = P_n(x) (1-x^2)^{-2n} exp(-1/(1-x^2)).
const std::vector<Poly>& bump_polys() {
    static const std::vector<Poly> polys = [] {
        std::vector<Poly> out{{1.0}};
        for (int n = 0; n < 16; ++n) {
            const Poly& p = out.back();
            Poly next(p.size() + 3, 0.0);
            // P' (1 - x^2)^2
            for (std::size_t k = 1; k < p.size(); ++k) {
                const double d = k * p[k];
                next[k - 1] += d;
                next[k + 1] -= 2.0 * d;
                next[k + 3] += d;
            }
            // 4 n x P (1 - x^2) - 2 x P
            for (std::size_t k = 0; k < p.size(); ++k) {
                next[k + 1] += (4.0 * n - 2.0) * p[k];
                next[k + 3] -= 4.0 * n * p[k];
            }
            out.push_back(next);
        }
        return out;
    }();
    return polys;
}

double raw_bump_derivative(int n, double x) {
    if (x <= -1.0 || x >= 1.0) return 0.0;
    const double a = (1.0 - x) * (1.0 + x);
    const double e = std::exp(-1.0 / a);
    if (e == 0.0) return 0.0;
    const Poly& p = bump_polys().at(static_cast<std::size_t>(n));
    double v = 0.0;
    for (std::size_t k = p.size(); k-- > 0;) v = v * x + p[k];
    return v * std::pow(a, -2.0 * n) * e;
}

} // namespace

double Bump::normalization() { return 0.4439938161680794; }

double Bump::derivative(int n, double x) const {
    if (n < 0 || n > 15) throw DomainError("Bump::derivative: order out of range");
    double v = raw_bump_derivative(n, x);
    if (parity_.value() == 1) v = x * v + (n > 0 ? n * raw_bump_derivative(n - 1, x) : 0.0);
    return v / normalization();
}

cplx Bump::hat(double r) const {
    // Integrate along z = x - i sgn(r) beta (1 - x^2), which passes near the
    // saddle of exp(-1/(1-z^2) - 2 pi i r z) and keeps the tail accurate.
    constexpr double beta = 0.5;
    const double sg = r >= 0 ? 1.0 : -1.0;
    const NodeSet& ns = tanh_sinh_nodes(1.0 / 64.0);
    cplx sum = 0.0;
    for (std::size_t i = 0; i < ns.x.size(); ++i) {
        const double x = ns.x[i];
        const double a = x >= 0 ? ns.xc[i] : 1.0 - x;  // 1 - x
        const double b = x >= 0 ? 1.0 + x : ns.xc[i];  // 1 + x
        const cplx z = x - kI * (sg * beta * a * b);
        const cplx one_minus_z2 = a * b * (1.0 + kI * (sg * beta * b)) * (1.0 - kI * (sg * beta * a));
        const cplx dz = 1.0 + kI * (2.0 * sg * beta * x);
        cplx v = std::exp(-1.0 / one_minus_z2 - 2.0 * kPi * kI * r * z) * dz;
        if (parity_.value() == 1) v *= z;
        sum += ns.w[i] * v;
    }
    return sum / normalization();
}

// ---------------------------------------------------------------------------

cplx TestFunctionFamily::phi(double x) const {
    if (profile == Profile::gaussian) {
        const double g = phi_parity().value() ? x : 1.0;
        return kappa * g * std::exp(-kPi * x * x);
    }
    const double w = omega.sign();
    if (delta3.value() == 0) return kappa * (phi0(x - Y) + w * phi0(x + Y));
    return kappa * (phi0.derivative(1, x - Y) + w * phi0.derivative(1, x + Y)) / (2.0 * kPi * kI);
}

cplx TestFunctionFamily::phi_hat(double r) const {
    if (profile == Profile::gaussian) {
        const cplx g = phi_parity().value() ? -kI * r : cplx(1.0);
        return kappa * g * std::exp(-kPi * r * r);
    }
    const cplx e = std::exp(-2.0 * kPi * kI * Y * r);
    cplx v = (e + omega.sign() * std::conj(e)) * phi0.hat(r);
    if (delta3.value() == 1) v *= r;
    return kappa * v;
}

cplx TestFunctionFamily::f_positive(double x, cplx phi0_hat_x) const {
    cplx v;
    if (profile == Profile::gaussian) {
        v = phi_hat(x);
    } else {
        const cplx e = std::exp(-2.0 * kPi * kI * Y * x);
        v = kappa * (e + omega.sign() * std::conj(e)) * phi0_hat_x;
        if (delta3.value() == 1) v *= x;
    }
    return std::exp(lambda3 * std::log(x)) * v;
}

cplx TestFunctionFamily::f(double x) const {
    if (x == 0.0) {
        if (lambda3 == 0.0 && delta3.value() == 0) return phi_hat(0.0);
        if (lambda3.real() > 0.0 || delta3.value() == 1) return 0.0;
        return std::numeric_limits<double>::infinity();
    }
    const double ax = std::abs(x);
    const cplx v = f_positive(ax, profile == Profile::bump ? phi0.hat(ax) : cplx(0.0));
    // f has parity eta.
    return (x < 0 && eta.value() == 1) ? -v : v;
}

double TestFunctionFamily::phi_support() const {
    return profile == Profile::bump ? Y + 1.0 : std::numeric_limits<double>::infinity();
}

bool TestFunctionFamily::degenerate() const {
    return profile == Profile::bump && Y == 0.0 && omega.value() == 1;
}

RealLineFunction TestFunctionFamily::f_function() const {
    RealLineFunction g;
    const TestFunctionFamily self = *this;
    g.eval = [self](double x) { return self.f(x); };
    g.parity = eta;
    g.order_at_zero = lambda3.real() + delta3.value() + (profile == Profile::bump ? omega.value() : 0);
    const double a = lambda3.real() + delta3.value();
    if (profile == Profile::gaussian) {
        g.support = std::sqrt((60.0 + std::max(0.0, a) * 3.0) / kPi) + 1.0;
    } else {
        // |phihat0(r)| ~ exp(-sqrt(2 pi r)); stop once r^a times that is tiny.
        double r = 4.0;
        while (-std::sqrt(2.0 * kPi * r) + a * std::log(r) > -80.0) r *= 1.1;
        g.support = r;
    }
    return g;
}

RealLineFunction TestFunctionFamily::phi_function() const {
    RealLineFunction g;
    const TestFunctionFamily self = *this;
    g.eval = [self](double x) { return self.phi(x); };
    g.parity = phi_parity();
    if (profile == Profile::gaussian) {
        g.order_at_zero = phi_parity().value();
        g.support = 9.0;
    } else {
        g.order_at_zero = Y > 1.0 ? 64.0 : phi_parity().value();
        g.support = Y + 1.0;
    }
    return g;
}

TestFunctionFamily build_test_function(double Y, Parity omega, Parity eta, const EmbeddingParams& params) {
    if (!(Y >= 0.0)) throw DomainError("build_test_function: Y must be non-negative");
    TestFunctionFamily fam;
    fam.Y = Y;
    fam.omega = omega;
    fam.eta = eta;
    fam.delta3 = params.delta[2];
    fam.lambda3 = params.lambda[2];
    fam.profile = Profile::bump;
    fam.phi0 = Bump(eta + omega);
    return fam;
}

TestFunctionFamily build_gaussian_family(Parity eta, const EmbeddingParams& params) {
    TestFunctionFamily fam;
    fam.eta = eta;
    fam.delta3 = params.delta[2];
    fam.lambda3 = params.lambda[2];
    fam.profile = Profile::gaussian;
    return fam;
}

} // namespace gl3v
