#include "gl3v/ftransform.hpp"

#include "gl3v/errors.hpp"
#include "gl3v/fft.hpp"
#include "gl3v/quadrature.hpp"
#include "gl3v/special_fn.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

namespace gl3v {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

std::size_t next_pow2(double v) {
    std::size_t n = 1;
    while (static_cast<double>(n) < v) n <<= 1;
    return n;
}

// phihat0 samples at x = exp(u0 + j du), j in [ja, jb), shared by every family
// that uses the same bump parity and grid.
struct HatSamples {
    std::ptrdiff_t ja = 0, jb = 0;
    std::vector<cplx> v;
};

std::shared_ptr<const HatSamples> hat_samples(Parity parity, double u0, double du, std::ptrdiff_t ja,
                                              std::ptrdiff_t jb) {
    using Key = std::tuple<int, double, double>;
    static std::mutex mu;
    static std::map<Key, std::shared_ptr<const HatSamples>> cache;
    const Key key{parity.value(), u0, du};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end() && it->second->ja <= ja && it->second->jb >= jb) return it->second;
        if (it != cache.end()) {
            ja = std::min(ja, it->second->ja);
            jb = std::max(jb, it->second->jb);
        }
    }
    auto hs = std::make_shared<HatSamples>();
    hs->ja = ja;
    hs->jb = jb;
    hs->v.resize(static_cast<std::size_t>(jb - ja));
    const Bump bump(parity);
    for (std::ptrdiff_t j = ja; j < jb; ++j) hs->v[static_cast<std::size_t>(j - ja)] = bump.hat(std::exp(u0 + j * du));
    std::lock_guard<std::mutex> lock(mu);
    // Keep one grid per parity; older grids are dropped.
    for (auto it = cache.begin(); it != cache.end();) {
        if (std::get<0>(it->first) == parity.value() && it->first != key)
            it = cache.erase(it);
        else
            ++it;
    }
    cache[key] = hs;
    return hs;
}

// Lagrange interpolation through y[i0..i0+m) at fractional position p (in units of the step, from i0).
cplx lagrange(const cplx* y, int m, double p) {
    cplx sum = 0.0;
    for (int i = 0; i < m; ++i) {
        double w = 1.0;
        for (int j = 0; j < m; ++j)
            if (j != i) w *= (p - j) / (i - j);
        sum += w * y[i];
    }
    return sum;
}

} // namespace

void VerticalLineSpec::validate() const {
    if (!(sigma >= 0.5)) {
        std::ostringstream os;
        os << "contour abscissa sigma = " << sigma << " lies below 1/2";
        throw ContourError(os.str());
    }
    if (!(h > 0.0) || !(H > 0.0)) throw DomainError("vertical line: H and h must be positive");
    const double r = H / h;
    if (std::abs(r - std::round(r)) > 1e-9 * r) throw DomainError("vertical line: H/h must be an integer");
}

FTransform::FTransform(const EmbeddingParams& params, const TestFunctionFamily& fam, VerticalLineSpec line,
                       FRoute route, FGridOptions opts)
    : params_(params), fam_(fam), line_(line), route_(route), opts_(opts) {
    line_.validate();
    if (!params_.normalized()) throw DomainError("F-transform: embedding parameters are not normalized");
    if (fam_.degenerate()) throw DomainError("F-transform: the family vanishes identically (Y = 0, omega = 1)");
    if (route_ == FRoute::automatic) {
        if (fam_.profile == Profile::gaussian)
            route_ = FRoute::phi_side;
        else if (fam_.Y >= 1.0 && params_.lambda[2].real() <= 3.0)
            route_ = FRoute::phi_side;
        else
            route_ = FRoute::f_side;
    }
    if (route_ == FRoute::phi_side && fam_.profile == Profile::bump && fam_.Y >= 1.0) scale_ = fam_.Y;
    if (route_ == FRoute::phi_side) prefactor_ = std::exp((1.0 - params_.lambda[2]) * std::log(scale_));
    // F carries (-1)^eta relative to the Mellin-side product.
    prefactor_ *= fam_.eta.sign();
    build();
}

std::vector<cplx> FTransform::spectrum(std::size_t n, double& tail) const {
    const double h = line_.h;
    const double L = 2.0 * kPi / h;
    const double du = L / static_cast<double>(n);
    const double sigma = line_.sigma;
    const cplx l3 = params_.lambda[2];
    const bool fside = route_ == FRoute::f_side;

    // Input support from a coarse scan of the sampled function.
    std::function<cplx(double)> coarse;
    if (fside) {
        coarse = [&](double u) { return 2.0 * fam_.f(std::exp(u)) * std::exp(u * (1.0 - sigma)); };
    } else {
        coarse = [&](double u) {
            return 2.0 * fam_.phi(scale_ * std::exp(u)) * std::exp(u * (cplx(sigma) - l3));
        };
    }
    std::vector<double> mag;
    const double cu0 = -L / 2.0, cdu = 0.05;
    double peak = 0.0;
    for (double u = cu0; u < L / 2.0; u += cdu) {
        const double m = std::abs(coarse(u));
        mag.push_back(std::isfinite(m) ? m : 1e300);
        peak = std::max(peak, mag.back());
    }
    if (!(peak > 0.0)) throw DomainError("F-transform: the sampled function vanishes");
    std::size_t ia = mag.size(), ib = 0;
    for (std::size_t i = 0; i < mag.size(); ++i) {
        if (mag[i] > 1e-18 * peak) {
            ia = std::min(ia, i);
            ib = i;
        }
    }
    if (ia == 0 || ib + 1 >= mag.size())
        throw DivergenceError("F-transform: sampled function does not decay inside the log window; "
                              "increase sigma margin or decrease h");
    const double ua = cu0 + (static_cast<double>(ia) - 2.0) * cdu;
    const double ub = cu0 + (static_cast<double>(ib) + 2.0) * cdu;
    const double u0 = cu0;

    std::vector<cplx> g(n, 0.0);
    const auto ja = static_cast<std::ptrdiff_t>(std::floor((ua - u0) / du));
    const auto jb = std::min(static_cast<std::ptrdiff_t>(n), static_cast<std::ptrdiff_t>(std::ceil((ub - u0) / du)));
    if (fside && fam_.profile == Profile::bump) {
        auto hs = hat_samples(fam_.phi0.parity(), u0, du, ja, jb);
        for (std::ptrdiff_t j = ja; j < jb; ++j) {
            const double u = u0 + j * du;
            const double x = std::exp(u);
            g[static_cast<std::size_t>(j)] =
                2.0 * fam_.f_positive(x, hs->v[static_cast<std::size_t>(j - hs->ja)]) * std::exp(u * (1.0 - sigma));
        }
    } else {
        for (std::ptrdiff_t j = ja; j < jb; ++j) g[static_cast<std::size_t>(j)] = coarse(u0 + j * du);
    }
    fft_inplace(g, fside ? -1 : +1);

    const double tmax = static_cast<double>(n) * h / 2.0;
    double total = 0.0;
    tail = 0.0;
    const int jmax = fside ? 3 : 2;
    for (std::size_t k = 0; k < n; ++k) {
        const double kk = k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
        const double t = kk * h;
        const cplx s(sigma, t);
        cplx lg = (fside ? -1.0 : 1.0) * kI * t * u0;
        for (int j = 0; j < jmax; ++j) lg += log_g_delta(params_.delta[j] + fam_.eta, s - params_.lambda[j]);
        const cplx p = du * g[k] * std::exp(lg);
        g[k] = std::isfinite(p.real()) && std::isfinite(p.imag()) ? p : cplx(0.0);
        const double a = std::abs(g[k]);
        total += a;
        if (std::abs(t) > 0.9 * tmax) tail += a;
    }
    tail *= h;
    (void)total;
    return g;
}

void FTransform::build() {
    const double h = line_.h;
    const double sigma = line_.sigma;
    const double Y = fam_.profile == Profile::bump ? fam_.Y : 0.0;
    double t_guess = line_.H;
    if (route_ == FRoute::f_side && fam_.profile == Profile::bump) {
        const RealLineFunction fr = fam_.f_function();
        t_guess = std::max(t_guess, 2.0 * kPi * (1.0 + Y) * std::min(fr.support, 4000.0) * 0.5);
    }
    std::size_t n = std::max<std::size_t>(4096, next_pow2(2.0 * t_guess / h));
    const std::size_t nmax = std::size_t{1} << opts_.max_log2;
    n = std::min(n, nmax);

    std::vector<cplx> P;
    double tail = 0.0, prev_tail = -1.0, total = 0.0;
    for (;;) {
        P = spectrum(n, tail);
        total = 0.0;
        for (const cplx& p : P) total += std::abs(p);
        total *= h;
        const bool converged = tail <= opts_.tol * total;
        // Stalled: the tail stopped shrinking after reaching the roundoff regime.
        const bool stalled = prev_tail >= 0.0 && tail > 0.5 * prev_tail && tail < 1e-8 * total;
        if (converged || stalled || n >= nmax) break;
        prev_tail = tail;
        n *= 2;
    }
    n_ = n;
    // Roundoff of the output transform adds a floor of a few ulps of the spectral mass.
    tail_ = tail + 4.0 * std::numeric_limits<double>::epsilon() * total;

    // S(v0 + m dv) = h sum_k P_k e^{-i t_k (v0 + m dv)}, on a grid twice as fine.
    const std::size_t nout = 2 * n;
    const double dv = 2.0 * kPi / (static_cast<double>(nout) * h);
    const double v0 = std::log(opts_.x_min / scale_) - 16.0 * dv;
    std::vector<cplx> Q(nout, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double kk = k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
        const double t = kk * h;
        const std::size_t idx = k < n / 2 ? k : k + n;
        Q[idx] = P[k] * std::exp(-kI * t * v0);
    }
    if (opts_.keep_spectrum) spectrum_ = P;
    P.clear();
    P.shrink_to_fit();
    fft_inplace(Q, -1);

    const double c0 = std::abs(prefactor_) / (4.0 * kPi);
    const std::size_t half = nout / 2;
    std::vector<double> mag(half);
    double peak = 0.0;
    for (std::size_t m = 0; m < half; ++m) {
        Q[m] *= h;
        const double v = v0 + static_cast<double>(m) * dv;
        mag[m] = c0 * std::exp(v * (1.0 - sigma)) * std::abs(Q[m]);
        if (v > std::log(opts_.x_min / scale_)) peak = std::max(peak, mag[m]);
    }
    std::size_t last = 0;
    for (std::size_t m = 0; m < half; ++m)
        if (mag[m] > opts_.drop_below * peak &&
            mag[m] > 2.0 * c0 * std::exp((v0 + static_cast<double>(m) * dv) * (1.0 - sigma)) * tail_)
            last = m;
    last = std::min(half - 1, last + 32);
    max_abs_ = peak;

    // Coarsen the stored grid while 8-point interpolation stays within 1e-12 of peak.
    std::size_t stride = 1;
    for (std::size_t cand = 2; cand <= 64; cand *= 2) {
        double err = 0.0;
        for (std::size_t m = 4 * cand; m + 5 * cand < last; m += std::max<std::size_t>(cand, last / 4000)) {
            const std::size_t base = (m / cand - 3) * cand;
            cplx y[8];
            for (int i = 0; i < 8; ++i) y[i] = Q[base + static_cast<std::size_t>(i) * cand];
            const std::size_t probe = base + 3 * cand + cand / 2;
            const cplx approx = lagrange(y, 8, 3.5);
            const double v = v0 + static_cast<double>(probe) * dv;
            err = std::max(err, c0 * std::exp(v * (1.0 - sigma)) * std::abs(approx - Q[probe]));
        }
        if (err > 1e-12 * peak) break;
        stride = cand;
    }
    s_.clear();
    for (std::size_t m = 0; m <= last + 8 * stride && m < half; m += stride) s_.push_back(Q[m]);
    u0_ = v0;
    v_lo_ = v0;
    dv_ = dv * static_cast<double>(stride);
    x_min_ = opts_.x_min;
    x_max_ = scale_ * std::exp(v0 + static_cast<double>(last) * dv);
    edge_error_ = std::max(opts_.drop_below * peak,
                           2.0 * c0 * std::exp((v0 + static_cast<double>(last) * dv) * (1.0 - sigma)) * tail_);
}

FValue FTransform::operator()(double x) const {
    const double ax = std::abs(x);
    if (x == 0.0 || ax < x_min_) throw DomainError("F-transform: |x| below the grid minimum");
    const double sgn = (x < 0 && fam_.eta.value() == 1) ? -1.0 : 1.0;
    if (ax > x_max_) return {0.0, edge_error_};
    const double v = std::log(ax / scale_);
    const double p = (v - v_lo_) / dv_;
    const auto i = static_cast<std::ptrdiff_t>(std::floor(p));
    std::ptrdiff_t i0 = std::max<std::ptrdiff_t>(0, i - 3);
    i0 = std::min<std::ptrdiff_t>(i0, static_cast<std::ptrdiff_t>(s_.size()) - 8);
    const cplx* y = s_.data() + i0;
    const cplx s8 = lagrange(y, 8, p - static_cast<double>(i0));
    const cplx s6 = lagrange(y + 1, 6, p - static_cast<double>(i0) - 1.0);
    const double w = std::exp(v * (1.0 - line_.sigma)) / (4.0 * kPi);
    FValue out;
    out.value = sgn * prefactor_ * w * s8;
    out.error = std::abs(prefactor_) * w * (std::abs(s8 - s6) + tail_);
    return out;
}

FValue FTransform::exact(double x) const {
    if (spectrum_.empty()) throw DomainError("F-transform: spectrum was not kept");
    const double ax = std::abs(x);
    const double sgn = (x < 0 && fam_.eta.value() == 1) ? -1.0 : 1.0;
    const double v = std::log(ax / scale_);
    const double h = line_.h;
    cplx sum = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
        const double kk = k < n_ / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n_);
        sum += spectrum_[k] * std::exp(-kI * (kk * h * v));
    }
    const double w = std::exp(v * (1.0 - line_.sigma)) / (4.0 * kPi);
    return {sgn * prefactor_ * w * h * sum, std::abs(prefactor_) * w * tail_};
}

// ---------------------------------------------------------------------------

namespace {

std::string transform_key(const EmbeddingParams& p, const TestFunctionFamily& f, const VerticalLineSpec& l,
                          FRoute r) {
    std::ostringstream os;
    os.precision(17);
    for (int j = 0; j < 3; ++j) os << p.lambda[j] << ' ' << p.delta[j].value() << ' ';
    os << f.Y << ' ' << f.omega.value() << ' ' << f.eta.value() << ' ' << f.delta3.value() << ' ' << f.lambda3
       << ' ' << static_cast<int>(f.profile) << ' ' << f.phi0.parity().value() << ' ' << f.kappa << ' ';
    os << l.sigma << ' ' << l.H << ' ' << l.h << ' ' << static_cast<int>(r);
    return os.str();
}

std::mutex& cache_mutex() {
    static std::mutex mu;
    return mu;
}

std::map<std::string, std::shared_ptr<const FTransform>>& transform_cache() {
    static std::map<std::string, std::shared_ptr<const FTransform>> cache;
    return cache;
}

} // namespace

std::shared_ptr<const FTransform> cached_transform(const EmbeddingParams& params, const TestFunctionFamily& fam,
                                                   const VerticalLineSpec& line, FRoute route) {
    const std::string key = transform_key(params, fam, line, route);
    {
        std::lock_guard<std::mutex> lock(cache_mutex());
        auto it = transform_cache().find(key);
        if (it != transform_cache().end()) return it->second;
    }
    auto built = std::make_shared<const FTransform>(params, fam, line, route);
    std::lock_guard<std::mutex> lock(cache_mutex());
    // Another thread may have inserted first; keep the earlier entry.
    auto [it, inserted] = transform_cache().emplace(key, built);
    return it->second;
}

void clear_transform_cache() {
    std::lock_guard<std::mutex> lock(cache_mutex());
    transform_cache().clear();
}

FValue voronoi_transform_F(const EmbeddingParams& params, const TestFunctionFamily& fam, double x,
                           const VerticalLineSpec& line, double warn_tol) {
    line.validate();
    if (x == 0.0) throw DomainError("voronoi_transform_F: x must be non-zero");
    const FValue v = (*cached_transform(params, fam, line))(x);
    if (v.error > warn_tol)
        std::cerr << "warning: F(" << x << ") error estimate " << v.error << " exceeds " << warn_tol << '\n';
    return v;
}

// ---------------------------------------------------------------------------

cplx direct_F_oracle(const EmbeddingParams& params, const TestFunctionFamily& fam, double x, double tol) {
    const double r1 = params.lambda[0].real(), r2 = params.lambda[1].real(), r3 = params.lambda[2].real();
    if (!(r1 > r2 && r2 > r3))
        throw ConvergenceError("direct_F_oracle: the repeated integral needs Re l1 > Re l2 > Re l3");
    if (fam.profile != Profile::gaussian) throw DomainError("direct_F_oracle: needs the gaussian profile");
    if (x == 0.0) throw DomainError("direct_F_oracle: x must be non-zero");
    constexpr double theta = kPi / 10.0;
    const int g = fam.phi_parity().value();
    const cplx l1 = params.lambda[0], l2 = params.lambda[1], l3 = params.lambda[2];
    const int d1 = params.delta[0].value(), d2 = params.delta[1].value(), d3 = params.delta[2].value();
    const double lx = std::log(std::abs(x));
    const double sx = x < 0 ? -1.0 : 1.0;

    // x_j = s_j rho_j e^{-i s_j theta}, rho_j = e^{u_j}. The factor e(-x_j) is
    // below e^{-200} once rho_j > 100, and the closed-form x3 integral
    // exp(-pi / A^2) is below e^{-200} once u1 + u2 < log|x| - 4.
    const double u_hi = std::log(100.0);
    const double u_cut = lx - 4.0;
    const double u_lo = u_cut - u_hi;
    auto trapezoid = [&](double hu) {
        const auto m = static_cast<std::size_t>(std::ceil((u_hi - u_lo) / hu)) + 1;
        std::vector<double> u(m);
        for (std::size_t i = 0; i < m; ++i) u[i] = u_lo + static_cast<double>(i) * hu;
        cplx total = 0.0;
        std::vector<cplx> w1(m), w2(m);
        for (int s1 : {1, -1}) {
            for (int s2 : {1, -1}) {
                const cplx rot1 = std::exp(-kI * (s1 * theta));
                const cplx rot2 = std::exp(-kI * (s2 * theta));
                const double sa = s1 * s2 * sx;
                // |x_j|^{-l_j} e(-x_j) sg(x_j)^{d_j} dx_j / du_j; the ray orientation
                // cancels the sign of dx_j on the negative axis.
                for (std::size_t i = 0; i < m; ++i) {
                    const double rho = std::exp(u[i]);
                    w1[i] = (d1 && s1 < 0 ? -1.0 : 1.0) * std::exp(-l1 * (u[i] - kI * (s1 * theta))) *
                            std::exp(-2.0 * kPi * kI * (s1 * rho) * rot1) * rot1 * rho;
                    w2[i] = (d2 && s2 < 0 ? -1.0 : 1.0) * std::exp(-l2 * (u[i] - kI * (s2 * theta))) *
                            std::exp(-2.0 * kPi * kI * (s2 * rho) * rot2) * rot2 * rho;
                }
                const double arg = -(s1 + s2) * theta;
                for (std::size_t i = 0; i < m; ++i) {
                    cplx row = 0.0;
                    for (std::size_t j = 0; j < m; ++j) {
                        const double la = u[i] + u[j] - lx;
                        if (la < u_cut - lx) continue;
                        const cplx logA(la, arg);
                        const cplx inv = std::exp(-logA);
                        // |a|^{l3 - 1} sg(a)^{d3} phi(-1/a) with phi(y) = y^g exp(-pi y^2).
                        cplx hv = std::exp((l3 - 1.0) * logA - kPi * inv * inv);
                        if (g) hv *= -sa * inv;
                        row += w2[j] * hv;
                    }
                    total += (d3 && sa < 0 ? -1.0 : 1.0) * w1[i] * row;
                }
            }
        }
        return total * hu * hu;
    };
    const cplx coarse = trapezoid(0.008);
    const cplx fine = trapezoid(0.004);
    if (std::abs(fine - coarse) > std::max(tol, 1e-6 * std::abs(fine)))
        throw ConvergenceError("direct_F_oracle: trapezoid refinement did not settle");
    return fam.kappa * fine;
}

// ---------------------------------------------------------------------------

std::string to_string(Regime r) {
    switch (r) {
    case Regime::small_y: return "Y<=1 superpolynomial decay";
    case Regime::small_x: return "Y>=1, |x|<=Y small-x bound";
    case Regime::power: return "Y<=|x|<=Y^3 power bound";
    case Regime::rapid: return "|x|>=Y^3 rapid decay";
    }
    return "unknown";
}

RegimeReport regime_report(const EmbeddingParams& params, const TestFunctionFamily& fam, double x,
                           const VerticalLineSpec& line, double decay_order) {
    RegimeReport rep;
    rep.x = x;
    rep.Y = fam.Y;
    const double ax = std::abs(x);
    const double Y = fam.Y;
    const double r3 = params.lambda[2].real();
    if (Y <= 1.0) {
        rep.regime = Regime::small_y;
        rep.x_exponent = -decay_order;
        rep.envelope = std::pow(ax, -decay_order);
    } else if (ax <= Y) {
        rep.regime = Regime::small_x;
        rep.x_exponent = 0.5;
        rep.envelope = std::sqrt(ax) * std::pow(Y, -0.5 - r3);
    } else if (ax <= Y * Y * Y) {
        rep.regime = Regime::power;
        rep.x_exponent = 0.75 + r3 / 2.0;
        rep.envelope = std::pow(Y, -r3) * std::pow(ax / Y, rep.x_exponent);
    } else {
        rep.regime = Regime::rapid;
        rep.x_exponent = -decay_order;
        rep.envelope = std::pow(Y, 1.5) * std::pow(ax / (Y * Y * Y), -decay_order);
    }
    rep.label = to_string(rep.regime);
    rep.measured = std::abs(voronoi_transform_F(params, fam, x, line).value);
    rep.ratio = rep.measured / rep.envelope;
    // Poles of G_{d+eta}(s - l) sit at s = l - p - 2m with p = (d + eta) mod 2.
    const int p1 = (params.delta[0] + fam.eta).value(), p2 = (params.delta[1] + fam.eta).value();
    const cplx diff = (params.lambda[0] - static_cast<double>(p1)) - (params.lambda[1] - static_cast<double>(p2));
    rep.pole_overlap = std::abs(diff.imag()) < 1e-12 && std::abs(diff.real() / 2.0 - std::round(diff.real() / 2.0)) < 1e-12;
    return rep;
}

namespace {

double envelope_max(const FTransform& F, double x0, double x1, double power, int samples) {
    double m = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double x = x0 * std::pow(x1 / x0, static_cast<double>(i) / samples);
        m = std::max(m, std::abs(F(x).value) * std::pow(x, -power));
    }
    return m;
}

double slope_of(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

} // namespace

std::vector<RegimeSlope> regime_slopes(const EmbeddingParams& params, const RegimeSlopeOptions& opts,
                                       const VerticalLineSpec& line) {
    if (opts.Y_grid.size() < 2) throw DomainError("regime_slopes: need at least two Y values");
    if (opts.Y_small > 1.0) throw DomainError("regime_slopes: Y_small must be <= 1");
    const double r3 = params.lambda[2].real();
    const int K = opts.samples;
    std::vector<RegimeSlope> out;

    // Envelopes over the lower half of each decade, clipped at x_max.
    {
        const auto fam = build_test_function(opts.Y_small, Parity(0), Parity(0), params);
        const auto F = cached_transform(params, fam, line);
        std::vector<double> env;
        for (int j = -2;; ++j) {
            const double a = std::pow(10.0, j);
            if (1.2 * a > F->x_max()) break;
            env.push_back(envelope_max(*F, a, std::min(a * std::sqrt(10.0), F->x_max()), 0.0, K / 4));
        }
        std::size_t peak = 0;
        for (std::size_t i = 0; i < env.size(); ++i)
            if (env[i] > env[peak]) peak = i;
        double steepest = 0.0, prev = 0.0;
        bool decreasing = true;
        for (std::size_t i = peak + 1; i < env.size(); ++i) {
            const double s = std::log10(env[i] / env[i - 1]);
            if (i > peak + 1 && s > prev) decreasing = false;
            steepest = std::min(steepest, s);
            prev = s;
        }
        RegimeSlope r{Regime::small_y, steepest, -opts.decay_order, true, false};
        r.pass = decreasing && steepest <= r.predicted + opts.tol;
        out.push_back(r);
    }

    std::vector<double> ly, ls, lp, lr;
    const double pw = 0.75 + r3 / 2.0;
    for (double Y : opts.Y_grid) {
        if (Y < 1.0) throw DomainError("regime_slopes: Y_grid values must be >= 1");
        const auto fam = build_test_function(Y, Parity(0), Parity(0), params);
        const auto F = cached_transform(params, fam, line);
        const double Y3 = Y * Y * Y;
        ly.push_back(std::log(Y));
        ls.push_back(std::log(envelope_max(*F, Y / 8.0, Y, 0.5, K)));
        lp.push_back(std::log(envelope_max(*F, Y, Y3, pw, K) * std::pow(Y, pw)));
        lr.push_back(std::log(envelope_max(*F, Y3, std::max(Y3, std::min(F->x_max(), 1e5 * Y3)), 0.0, K)));
    }
    RegimeSlope small{Regime::small_x, slope_of(ly, ls), -0.5 - r3, true, false};
    small.pass = small.measured <= small.predicted + opts.tol;
    RegimeSlope power{Regime::power, slope_of(ly, lp), -r3, false, false};
    power.pass = std::abs(power.measured - power.predicted) <= opts.tol;
    RegimeSlope rapid{Regime::rapid, slope_of(ly, lr), 1.5, false, false};
    rapid.pass = std::abs(rapid.measured - rapid.predicted) <= opts.tol;
    out.push_back(small);
    out.push_back(power);
    out.push_back(rapid);
    return out;
}

} // namespace gl3v
