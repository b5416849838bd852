#include "gl3v/voronoi.hpp"

#include "gl3v/errors.hpp"
#include "gl3v/twisted_sums.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <tuple>

namespace gl3v {

namespace {

i64 mod_pos(i64 x, i64 m) { return ((x % m) + m) % m; }

// phihat0(n / T), n = 0..n_hi, for one bump parity. Families differing only in
// (a, c, q) reuse the samples.
std::shared_ptr<const std::vector<cplx>> lhs_hat_samples(const Bump& bump, double T, std::int64_t n_hi) {
    using Key = std::tuple<int, double, std::int64_t>;
    static std::mutex mu;
    static std::map<Key, std::shared_ptr<const std::vector<cplx>>> cache;
    const Key key{bump.parity().value(), T, n_hi};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto v = std::make_shared<std::vector<cplx>>(static_cast<std::size_t>(n_hi) + 1);
    for (std::int64_t n = 1; n <= n_hi; ++n) (*v)[static_cast<std::size_t>(n)] = bump.hat(static_cast<double>(n) / T);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, std::move(v)).first->second;
}

double coefficient(const CoefficientTable& table, i64 n, i64 m) {
    if (m == 1) return table(n);
    if (n == 1) return table(m);
    return bi_index(table, n, m);
}

} // namespace

void VoronoiInstance::validate() const {
    if (table == nullptr) throw DomainError("voronoi instance: no coefficient table");
    if (table->descriptor().degree != 3) throw DomainError("voronoi instance: the table is not a GL(3) table");
    if (q < 1) throw DomainError("voronoi instance: q must be positive");
    if (c == 0) throw DomainError("voronoi instance: c must be non-zero");
    if (!(T > 0.0)) throw DomainError("voronoi instance: T must be positive");
    if (gcd(a, c) != 1) throw NonInvertibleError("voronoi instance: gcd(a, c) != 1");
    params.validate();
    line.validate();
}

i64 VoronoiInstance::abar() const {
    const i64 cc = c < 0 ? -c : c;
    return cc == 1 ? 0 : mod_inverse(mod_pos(a, cc), cc);
}

VoronoiInstance make_instance(const CoefficientTable& table, i64 q, i64 a, i64 c, double T, double Y,
                              Parity omega, Parity eta, VerticalLineSpec line) {
    if (!table.descriptor().embedding) throw DomainError("make_instance: the table has no embedding parameters");
    VoronoiInstance inst;
    inst.table = &table;
    inst.params = *table.descriptor().embedding;
    inst.q = q;
    inst.a = c < 0 ? -a : a;
    inst.c = c < 0 ? -c : c;
    inst.T = T;
    inst.fam = build_test_function(Y, omega, eta, inst.params);
    inst.line = line;
    inst.validate();
    return inst;
}

SideSum lhs_sum(const VoronoiInstance& inst) {
    inst.validate();
    const auto& fam = inst.fam;
    const double supp = fam.f_function().support;
    const auto n_hi = static_cast<std::int64_t>(std::ceil(supp * inst.T));
    if (n_hi > inst.table->n_max())
        throw TableTooShortError("lhs_sum: f(n/T) needs n <= " + std::to_string(n_hi) + ", table has " +
                                 std::to_string(inst.table->n_max()));
    const i64 c = inst.c < 0 ? -inst.c : inst.c;
    const i64 a = inst.c < 0 ? -inst.a : inst.a;
    const double par = fam.eta.sign();
    const auto hats = fam.profile == Profile::bump ? lhs_hat_samples(fam.phi0, inst.T, n_hi) : nullptr;

    SideSum out;
    double amax = 0.0;
    for (std::int64_t n = 1; n <= n_hi; ++n) {
        const double an = coefficient(*inst.table, inst.q, n);
        amax = std::max(amax, std::abs(an));
        if (an == 0.0) continue;
        const double x = static_cast<double>(n) / inst.T;
        const cplx fx = hats ? fam.f_positive(x, (*hats)[static_cast<std::size_t>(n)]) : fam.f(x);
        const i64 r = static_cast<i64>((static_cast<__int128>(n) * mod_pos(a, c)) % c);
        out.value += an * fx * (e_fraction(-r, c) + par * e_fraction(r, c));
    }
    out.n_cutoff = n_hi;
    // Tail: trapezoid of |f| over [supp, 4 supp] in x, times T and the largest coefficient.
    double acc = 0.0;
    constexpr int K = 48;
    for (int i = 0; i <= K; ++i) {
        const double x = supp * (1.0 + 3.0 * i / K);
        acc += (i == 0 || i == K ? 0.5 : 1.0) * std::abs(fam.f(x));
    }
    out.tail = 2.0 * amax * inst.T * acc * 3.0 * supp / K;
    return out;
}

RhsSum rhs_sum(const VoronoiInstance& inst, const TruncationOptions& opts) {
    inst.validate();
    const auto F = cached_transform(inst.params, inst.fam, inst.line);
    const i64 c = inst.c < 0 ? -inst.c : inst.c;
    const i64 qc = inst.q * c;
    const i64 abar = inst.abar();
    const double par = inst.fam.eta.sign();
    const double xmax = F->x_max();
    const double xmin = F->x_min();

    RhsSum out;
    for (i64 d : divisors(qc)) {
        DivisorTerm term;
        term.d = d;
        term.modulus = qc / d;
        const double scale = static_cast<double>(d) * static_cast<double>(d) * inst.T /
                             (static_cast<double>(c) * c * c * static_cast<double>(inst.q));
        term.X = 1.0 / scale;
        const double weight = static_cast<double>(c) / static_cast<double>(d);

        // S(q abar, n; m) + (-1)^eta S(q abar, -n; m) by residue of n.
        const i64 m = term.modulus;
        std::vector<double> K(static_cast<std::size_t>(m));
        double kmax = 0.0;
        for (i64 k = 0; k < m; ++k) {
            K[static_cast<std::size_t>(k)] = kloosterman(inst.q * abar, k, m) + par * kloosterman(inst.q * abar, -k, m);
            kmax = std::max(kmax, std::abs(K[static_cast<std::size_t>(k)]));
        }

        const auto n_support = static_cast<std::int64_t>(std::ceil(xmax / scale));
        std::int64_t n_end = n_support;
        if (inst.table->n_max() < n_end) n_end = inst.table->n_max();
        if (opts.n_limit > 0 && opts.n_limit < n_end) n_end = opts.n_limit;
        const auto n_begin = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(xmin / scale)));
        if (n_begin > 1 && std::abs(F->operator()(xmin).value) > 1e-6 * F->max_abs())
            throw BudgetError("rhs_sum: F is not small at the grid minimum");

        double amax = 0.0;
        // |F| beyond the noise floor decays at least like |x|^{-4}: sum over n > n_support
        // of |F(x_max)| (n_support / n)^4 / n is |F(x_max)| / 4.
        auto envelope_tail = [&](std::int64_t n0) {
            double s = 0.0;
            if (n0 < n_support) {
                const double u0 = std::log(static_cast<double>(n0) + 0.5);
                const double u1 = std::log(static_cast<double>(n_support));
                const int steps = std::max(8, static_cast<int>(32.0 * (u1 - u0)));
                const double du = (u1 - u0) / steps;
                for (int i = 0; i <= steps; ++i) {
                    const double x = std::exp(u0 + i * du) * scale;
                    s += (i == 0 || i == steps ? 0.5 : 1.0) * std::abs(F->operator()(x).value) * du;
                }
            }
            s += F->operator()(2.0 * xmax).error / 4.0;
            return weight * std::max(amax, 1.0) * kmax * s;
        };

        cplx sum = 0.0;
        double quad = 0.0;
        double biggest = 0.0;
        bool past_peak = false;
        int quiet = 0;
        std::int64_t n = n_begin;
        bool stopped_quiet = false;
        for (std::int64_t lo = 1; lo <= n_end; lo *= 2) {
            const std::int64_t hi = std::min(2 * lo - 1, n_end);
            cplx block = 0.0;
            for (; n <= hi; ++n) {
                const double kn = K[static_cast<std::size_t>(n % m)];
                if (kn == 0.0) continue;
                const double an = coefficient(*inst.table, n, d);
                amax = std::max(amax, std::abs(an));
                if (an == 0.0) continue;
                const FValue Fx = (*F)(static_cast<double>(n) * scale);
                const double w = weight * an * kn / static_cast<double>(n);
                block += w * Fx.value;
                quad += std::abs(w) * Fx.error;
            }
            sum += block;
            const double bsize = std::abs(block);
            if (bsize >= biggest) {
                biggest = bsize;
                past_peak = false;
                quiet = 0;
            } else {
                past_peak = true;
            }
            const double gauge = std::abs(sum) + opts.floor;
            if (past_peak && bsize < opts.quiet_fraction * opts.budget * gauge)
                ++quiet;
            else
                quiet = 0;
            if (quiet >= opts.quiet_blocks && hi < n_end &&
                envelope_tail(hi) < opts.quiet_fraction * opts.budget * gauge) {
                term.n_cutoff = hi;
                stopped_quiet = true;
                break;
            }
        }
        if (!stopped_quiet) term.n_cutoff = n_end;
        term.partial = sum;
        term.quad_error = quad;
        term.tail_estimate = envelope_tail(term.n_cutoff);
        term.table_limited = !stopped_quiet && n_end < n_support;
        out.value += sum;
        out.tail += term.tail_estimate;
        out.quad_error += quad;
        out.terms.push_back(term);
    }
    if (out.tail > opts.budget * (std::abs(out.value) + opts.floor)) {
        std::ostringstream os;
        os << "rhs_sum: certified tail " << out.tail << " exceeds the budget " << opts.budget << " of |rhs| "
           << std::abs(out.value);
        throw BudgetError(os.str());
    }
    return out;
}

IdentityReport identity_residual(const VoronoiInstance& inst, const TruncationOptions& opts) {
    IdentityReport rep;
    rep.q = inst.q;
    rep.a = inst.a;
    rep.c = inst.c;
    rep.T = inst.T;
    rep.Y = inst.fam.Y;
    rep.omega = inst.fam.omega.value();
    rep.eta = inst.fam.eta.value();

    const SideSum L = lhs_sum(inst);
    double amax = 0.0;
    for (std::int64_t n = 1; n <= L.n_cutoff; ++n) amax = std::max(amax, std::abs(coefficient(*inst.table, inst.q, n)));
    rep.floor = 1e-12 * inst.T * amax;

    TruncationOptions o = opts;
    o.floor = std::max(o.floor, std::abs(L.value) + rep.floor);
    const RhsSum R = rhs_sum(inst, o);

    rep.lhs = L.value;
    rep.rhs = R.value;
    rep.lhs_tail = L.tail;
    rep.lhs_cutoff = L.n_cutoff;
    rep.rhs_tail = R.tail;
    rep.rhs_quad_error = R.quad_error;
    rep.divisors = R.terms;
    const double denom = std::abs(L.value) + std::abs(R.value) + rep.floor;
    rep.residual = std::abs(L.value - R.value) / denom;
    rep.error_budget = (L.tail + R.tail + R.quad_error) / denom;
    return rep;
}

void IdentityReport::write_kv(std::ostream& os) const {
    os << std::setprecision(17);
    os << "q = " << q << '\n'
       << "a = " << a << '\n'
       << "c = " << c << '\n'
       << "T = " << T << '\n'
       << "Y = " << Y << '\n'
       << "omega = " << omega << '\n'
       << "eta = " << eta << '\n'
       << "lhs_re = " << lhs.real() << '\n'
       << "lhs_im = " << lhs.imag() << '\n'
       << "rhs_re = " << rhs.real() << '\n'
       << "rhs_im = " << rhs.imag() << '\n'
       << "floor = " << floor << '\n'
       << "residual = " << residual << '\n'
       << "lhs_tail = " << lhs_tail << '\n'
       << "lhs_cutoff = " << lhs_cutoff << '\n'
       << "rhs_tail = " << rhs_tail << '\n'
       << "rhs_quad_error = " << rhs_quad_error << '\n'
       << "error_budget = " << error_budget << '\n'
       << "divisors = " << divisors.size() << '\n';
}

void IdentityReport::write_divisor_csv(std::ostream& os) const {
    os << "# gl3v divisors v1\n" << "d,n_cutoff,partial_re,partial_im,tail_estimate\n" << std::setprecision(17);
    for (const auto& t : divisors)
        os << t.d << ',' << t.n_cutoff << ',' << t.partial.real() << ',' << t.partial.imag() << ','
           << t.tail_estimate << '\n';
}

ScalingFit rhs_scaling_experiment(const CoefficientTable& table, double alpha, const std::vector<double>& T_grid,
                                  const TruncationOptions& opts, VerticalLineSpec line) {
    if (T_grid.size() < 2) throw DomainError("rhs_scaling_experiment: need at least two T values");
    const auto [tlo, thi] = std::minmax_element(T_grid.begin(), T_grid.end());
    if (*thi < std::pow(10.0, 1.5) * *tlo * 0.999)
        throw DomainError("rhs_scaling_experiment: T grid must span at least 1.5 decades");
    ScalingFit fit;
    std::vector<double> lx, ly;
    for (double T : T_grid) {
        const ApproximantChoice ch = select_approximant(alpha, T);
        // Y below roundoff of T |alpha + a/c| is a rational alpha hit exactly.
        const double Y = ch.Y < 1e-9 ? 0.0 : ch.Y;
        const VoronoiInstance inst = make_instance(table, 1, ch.a, ch.c, T, Y, Parity(0), Parity(0), line);
        const IdentityReport rep = identity_residual(inst, opts);
        ScalingPoint p{T, ch.a, ch.c, Y, std::abs(rep.rhs), std::abs(rep.lhs), rep.residual};
        fit.points.push_back(p);
        lx.push_back(std::log(T));
        ly.push_back(std::log(p.rhs_abs));
    }
    std::tie(fit.slope, fit.intercept) = least_squares(lx, ly);
    return fit;
}

} // namespace gl3v
