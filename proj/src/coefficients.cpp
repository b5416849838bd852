#include "gl3v/coefficients.hpp"

#include "gl3v/errors.hpp"
#include "gl3v/rational.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <filesystem>
#include <cstdio>

namespace gl3v {

std::string to_string(FormKind k) {
    switch (k) {
    case FormKind::gl2_holomorphic: return "gl2_holomorphic";
    case FormKind::gl3_sym2: return "gl3_sym2";
    case FormKind::gl3_eisenstein_d3: return "gl3_eisenstein_d3";
    case FormKind::constant_one: return "constant_one";
    }
    return "unknown";
}

FormKind form_kind_from_string(const std::string& s) {
    if (s == "gl2" || s == "gl2_holomorphic") return FormKind::gl2_holomorphic;
    if (s == "sym2" || s == "gl3_sym2") return FormKind::gl3_sym2;
    if (s == "d3" || s == "gl3_eisenstein_d3") return FormKind::gl3_eisenstein_d3;
    if (s == "one" || s == "constant_one") return FormKind::constant_one;
    throw DomainError("unknown form kind: " + s);
}

FormDescriptor FormDescriptor::for_kind(FormKind k) {
    FormDescriptor d;
    d.kind = k;
    switch (k) {
    case FormKind::gl2_holomorphic: d.degree = 2; break;
    case FormKind::constant_one: d.degree = 1; break;
    case FormKind::gl3_sym2:
        d.degree = 3;
        // Symmetric square of a weight-12 form: discrete series D_23.
        d.embedding = EmbeddingParams::discrete_series(23);
        break;
    case FormKind::gl3_eisenstein_d3:
        d.degree = 3;
        d.embedding = EmbeddingParams{};
        break;
    }
    return d;
}

CoefficientTable::CoefficientTable(FormDescriptor desc, std::vector<double> values)
    : desc_(std::move(desc)), values_(std::move(values)) {
    if (values_.size() < 2) throw DomainError("coefficient table must cover n = 1");
    values_[0] = 0.0;
}

double CoefficientTable::operator()(std::int64_t n) const {
    if (n < 0) n = -n;
    if (n == 0 || n > n_max())
        throw TableTooShortError("coefficient index " + std::to_string(n) + " outside table (n_max " +
                                 std::to_string(n_max()) + ")");
    return values_[static_cast<std::size_t>(n)];
}

// ---------------------------------------------------------------------------
// Number-theoretic transform over several word-size primes; the eta product
// is raised to the 24th power modulo each and recombined by CRT.

namespace {

using u32 = std::uint32_t;
using u64 = std::uint64_t;

u64 powmod(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = r * b % m;
        b = b * b % m;
        e >>= 1;
    }
    return r;
}

u64 primitive_root(u64 p) {
    std::vector<u64> fac;
    u64 n = p - 1;
    for (u64 f = 2; f * f <= n; ++f) {
        if (n % f == 0) {
            fac.push_back(f);
            while (n % f == 0) n /= f;
        }
    }
    if (n > 1) fac.push_back(n);
    for (u64 g = 2;; ++g) {
        bool ok = true;
        for (u64 f : fac) {
            if (powmod(g, (p - 1) / f, p) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
}

// Montgomery arithmetic modulo an odd prime below 2^31.
class Montgomery {
public:
    explicit Montgomery(u32 p) : p_(p) {
        u32 inv = p;
        for (int i = 0; i < 5; ++i) inv *= 2u - p * inv;
        pinv_neg_ = ~inv + 1u;
        r2_ = static_cast<u32>(powmod(2, 64, p));
    }
    u32 reduce(u64 x) const {
        const u32 m = static_cast<u32>(x) * pinv_neg_;
        const u32 t = static_cast<u32>((x + u64(m) * p_) >> 32);
        return t >= p_ ? t - p_ : t;
    }
    u32 mul(u32 a, u32 b) const { return reduce(u64(a) * b); }
    u32 to(u32 a) const { return mul(a, r2_); }
    u32 from(u32 a) const { return reduce(a); }
    u32 prime() const { return p_; }

private:
    u32 p_;
    u32 pinv_neg_;
    u32 r2_;
};

class Ntt {
public:
    explicit Ntt(u32 p) : mont_(p), p_(p), g_(static_cast<u32>(primitive_root(p))) {}

    // Operates on values in Montgomery form.
    void transform(std::vector<u32>& a, bool inverse) const {
        const std::size_t n = a.size();
        for (std::size_t i = 1, j = 0; i < n; ++i) {
            std::size_t bit = n >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            if (i < j) std::swap(a[i], a[j]);
        }
        std::vector<u32> w;
        for (std::size_t len = 2; len <= n; len <<= 1) {
            u64 wl = powmod(g_, (p_ - 1) / len, p_);
            if (inverse) wl = powmod(wl, p_ - 2, p_);
            const std::size_t half = len / 2;
            w.resize(half);
            w[0] = mont_.to(1);
            const u32 wm = mont_.to(static_cast<u32>(wl));
            for (std::size_t k = 1; k < half; ++k) w[k] = mont_.mul(w[k - 1], wm);
            for (std::size_t i = 0; i < n; i += len) {
                u32* lo = a.data() + i;
                u32* hi = lo + half;
                for (std::size_t k = 0; k < half; ++k) {
                    const u32 u = lo[k];
                    const u32 v = mont_.mul(hi[k], w[k]);
                    lo[k] = u + v >= p_ ? u + v - p_ : u + v;
                    hi[k] = u >= v ? u - v : u + p_ - v;
                }
            }
        }
        if (inverse) {
            const u32 ninv = mont_.to(static_cast<u32>(powmod(n, p_ - 2, p_)));
            for (auto& x : a) x = mont_.mul(x, ninv);
        }
    }

    const Montgomery& mont() const { return mont_; }
    u32 prime() const { return p_; }

private:
    Montgomery mont_;
    u32 p_;
    u32 g_;
};

// Primes c 2^k + 1 with k >= 25, supporting transforms up to 2^25.
constexpr u32 kPrimes[] = {167772161u, 469762049u, 2013265921u, 1811939329u, 2113929217u};

// Coefficients 0..N-1 of prod (1 - q^n)^24 modulo p.
std::vector<u32> eta24_mod(std::size_t N, const Ntt& ntt) {
    const u32 p = ntt.prime();
    const Montgomery& M = ntt.mont();
    std::size_t size = 1;
    while (size < 2 * N) size <<= 1;

    // Pentagonal number theorem.
    std::vector<u32> e(size, 0);
    for (std::int64_t k = 0;; ++k) {
        bool any = false;
        for (std::int64_t kk : {k, -k}) {
            if (k == 0 && kk == 0 && any) continue;
            const std::int64_t pent = kk * (3 * kk - 1) / 2;
            if (pent < static_cast<std::int64_t>(N)) {
                any = true;
                const u32 v = ntt.mont().to((kk % 2 == 0) ? 1u : p - 1u);
                e[static_cast<std::size_t>(pent)] = v;
            }
            if (k == 0) break;
        }
        if (!any) break;
    }

    auto truncate = [&](std::vector<u32>& a) { std::fill(a.begin() + static_cast<long>(N), a.end(), 0u); };
    auto square = [&](std::vector<u32>& a) {
        ntt.transform(a, false);
        for (auto& x : a) x = M.mul(x, x);
        ntt.transform(a, true);
        truncate(a);
    };
    // e^24 = e^16 * e^8.
    square(e);  // e^2
    square(e);  // e^4
    square(e);  // e^8
    std::vector<u32> e8 = e;
    ntt.transform(e8, false);
    std::vector<u32> e16(size);
    for (std::size_t i = 0; i < size; ++i) e16[i] = M.mul(e8[i], e8[i]);
    ntt.transform(e16, true);
    truncate(e16);
    ntt.transform(e16, false);
    for (std::size_t i = 0; i < size; ++i) e16[i] = M.mul(e16[i], e8[i]);
    ntt.transform(e16, true);
    e16.resize(N);
    for (auto& x : e16) x = M.from(x);
    return e16;
}

void check_cap(std::int64_t N, std::int64_t cap) {
    if (N < 1) throw DomainError("coefficient count must be positive");
    if (N > cap) throw CapExceededError("requested " + std::to_string(N) + " coefficients, cap is " +
                                        std::to_string(cap));
}

} // namespace

std::vector<BigInt> ramanujan_tau(std::int64_t N, std::int64_t cap) {
    check_cap(N, cap);
    constexpr std::size_t kMods = std::size(kPrimes);
    const auto n = static_cast<std::size_t>(N);
    std::vector<std::vector<u32>> residues;
    for (u32 p : kPrimes) residues.push_back(eta24_mod(n, Ntt(p)));

    // Garner mixed-radix reconstruction, then symmetric lift.
    using boost::multiprecision::int512_t;
    std::array<std::array<u64, kMods>, kMods> inv{};
    for (std::size_t i = 0; i < kMods; ++i)
        for (std::size_t j = 0; j < i; ++j) inv[j][i] = powmod(kPrimes[j] % kPrimes[i], kPrimes[i] - 2, kPrimes[i]);
    int512_t modulus = 1;
    for (u32 p : kPrimes) modulus *= p;
    const int512_t half = modulus / 2;

    std::vector<BigInt> tau(n + 1);
    std::array<u64, kMods> digit{};
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < kMods; ++i) {
            u64 x = residues[i][k];
            for (std::size_t j = 0; j < i; ++j) {
                const u64 pi = kPrimes[i];
                x = (x + pi - digit[j] % pi) % pi * inv[j][i] % pi;
            }
            digit[i] = x;
        }
        int512_t value = 0, radix = 1;
        for (std::size_t i = 0; i < kMods; ++i) {
            value += radix * digit[i];
            radix *= kPrimes[i];
        }
        if (value > half) value -= modulus;
        tau[k + 1] = static_cast<BigInt>(value);
    }
    return tau;
}

std::vector<BigInt> ramanujan_tau_naive(std::int64_t N) {
    check_cap(N, 100000);
    const auto n = static_cast<std::size_t>(N);
    std::vector<BigInt> series(n, 0);  // prod (1-q^k)^24, coefficients 0..N-1
    series[0] = 1;
    for (std::size_t k = 1; k < n; ++k) {
        for (int rep = 0; rep < 24; ++rep) {
            for (std::size_t i = n - 1; i >= k; --i) series[i] -= series[i - k];
        }
    }
    std::vector<BigInt> tau(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) tau[i + 1] = series[i];
    return tau;
}

std::vector<double> gl2_normalized(std::int64_t N, std::int64_t cap) {
    const auto tau = ramanujan_tau(N, cap);
    std::vector<double> a(tau.size(), 0.0);
    for (std::size_t n = 1; n < tau.size(); ++n)
        a[n] = static_cast<double>(tau[n]) / std::pow(static_cast<double>(n), 5.5);
    return a;
}

namespace {

std::vector<std::int64_t> smallest_prime_factor(std::int64_t N) {
    std::vector<std::int64_t> spf(static_cast<std::size_t>(N) + 1, 0);
    for (std::int64_t i = 2; i <= N; ++i) {
        if (spf[i] != 0) continue;
        for (std::int64_t j = i; j <= N; j += i)
            if (spf[j] == 0) spf[j] = i;
    }
    return spf;
}

} // namespace

std::vector<double> sym2_coefficients(std::int64_t N, std::int64_t cap) {
    const auto tau = ramanujan_tau(N, cap);
    const auto spf = smallest_prime_factor(N);
    std::vector<double> a(static_cast<std::size_t>(N) + 1, 0.0);
    a[1] = 1.0;
    for (std::int64_t n = 2; n <= N; ++n) {
        const std::int64_t p = spf[n];
        std::int64_t m = n;
        int k = 0;
        while (m % p == 0) {
            m /= p;
            ++k;
        }
        if (m > 1) {
            a[n] = a[m] * a[n / m];
            continue;
        }
        // A = lambda(p)^2 - 1 = (tau(p)^2 - p^11) / p^11, formed exactly.
        using boost::multiprecision::int512_t;
        int512_t p11 = 1;
        for (int i = 0; i < 11; ++i) p11 *= p;
        const int512_t num = static_cast<int512_t>(tau[p]) * static_cast<int512_t>(tau[p]) - p11;
        const double A = static_cast<double>(num) / static_cast<double>(p11);
        // Euler factor 1 / (1 - A X + A X^2 - X^3) from Satake {alpha^2, 1, alpha^-2}.
        double c0 = 1.0, c1 = A, c2 = A * A - A;
        double ck = (k == 1) ? c1 : c2;
        for (int j = 3; j <= k; ++j) {
            ck = A * c2 - A * c1 + c0;
            c0 = c1;
            c1 = c2;
            c2 = ck;
        }
        a[n] = ck;
    }
    return a;
}

std::vector<std::int64_t> d3_coefficients(std::int64_t N, std::int64_t cap) {
    check_cap(N, cap);
    const auto n = static_cast<std::size_t>(N);
    std::vector<std::int64_t> d2(n + 1, 0), d3(n + 1, 0);
    for (std::size_t a = 1; a <= n; ++a)
        for (std::size_t m = a; m <= n; m += a) d2[m] += 1;
    for (std::size_t a = 1; a <= n; ++a)
        for (std::size_t m = a, b = 1; m <= n; m += a, ++b) d3[m] += d2[b];
    return d3;
}

CoefficientTable build_table(FormKind kind, std::int64_t N, std::int64_t cap) {
    auto desc = FormDescriptor::for_kind(kind);
    switch (kind) {
    case FormKind::gl2_holomorphic: return {desc, gl2_normalized(N, cap)};
    case FormKind::gl3_sym2: return {desc, sym2_coefficients(N, cap)};
    case FormKind::gl3_eisenstein_d3: {
        const auto d = d3_coefficients(N, cap);
        return {desc, std::vector<double>(d.begin(), d.end())};
    }
    case FormKind::constant_one:
        check_cap(N, cap);
        return {desc, std::vector<double>(static_cast<std::size_t>(N) + 1, 1.0)};
    }
    throw DomainError("unhandled form kind");
}

double bi_index(const CoefficientTable& table, std::int64_t n, std::int64_t m) {
    n = n < 0 ? -n : n;
    m = m < 0 ? -m : m;
    const std::int64_t g = gcd(n, m);
    double sum = 0.0;
    for (std::int64_t d : divisors(g)) {
        const int mu = mobius(d);
        if (mu == 0) continue;
        sum += mu * table(n / d) * table(m / d);
    }
    return sum;
}

namespace {

double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

double rankin_selberg_slope(const CoefficientTable& table, const std::vector<double>& T_grid) {
    if (T_grid.size() < 2) throw DomainError("rankin_selberg_slope: need at least two cutoffs");
    std::vector<double> sorted = T_grid;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> lx, ly;
    double acc = 0.0;
    std::int64_t n = 1;
    for (double T : sorted) {
        const auto cut = static_cast<std::int64_t>(std::floor(T));
        if (cut > table.n_max()) throw TableTooShortError("rankin_selberg_slope: table too short");
        for (; n <= cut; ++n) acc += table(n) * table(n);
        lx.push_back(std::log(T));
        ly.push_back(std::log(acc));
    }
    return ls_slope(lx, ly);
}

// ---------------------------------------------------------------------------
// Cache files.

namespace {

constexpr int kCacheVersion = 1;

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

void save_cache(const CoefficientTable& table, const std::string& path) {
    std::string body;
    body.reserve(static_cast<std::size_t>(table.n_max()) * 28);
    char buf[64];
    for (std::int64_t n = 1; n <= table.n_max(); ++n) {
        const int len = std::snprintf(buf, sizeof buf, "%lld %.17g\n", static_cast<long long>(n), table(n));
        body.append(buf, static_cast<std::size_t>(len));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CacheError("cannot open cache for writing: " + path);
    out << "# format=gl3v-coefficients\n"
        << "# version=" << kCacheVersion << "\n"
        << "# kind=" << to_string(table.descriptor().kind) << "\n"
        << "# degree=" << table.descriptor().degree << "\n"
        << "# n_max=" << table.n_max() << "\n"
        << "# checksum=" << fnv1a(body) << "\n"
        << body;
    if (!out) throw CacheError("failed writing cache: " + path);
}

CoefficientTable load_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CacheError("cannot open cache: " + path);
    std::string line, body;
    std::string kind;
    std::int64_t n_max = -1;
    std::uint64_t checksum = 0;
    bool have_checksum = false;
    int version = -1;
    std::vector<double> values{0.0};
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(2, eq - 2);
            std::string value = line.substr(eq + 1);
            if (key == "version") version = std::stoi(value);
            else if (key == "kind") kind = value;
            else if (key == "n_max") n_max = std::stoll(value);
            else if (key == "checksum") {
                checksum = std::stoull(value);
                have_checksum = true;
            }
            continue;
        }
        body += line;
        body += '\n';
        std::istringstream ls(line);
        long long n;
        double v;
        if (!(ls >> n >> v) || n != static_cast<long long>(values.size()))
            throw CacheError("malformed cache body line in " + path);
        values.push_back(v);
    }
    if (version != kCacheVersion)
        throw CacheError("cache version mismatch in " + path + " (found " + std::to_string(version) + ")");
    if (!have_checksum || fnv1a(body) != checksum)
        throw CacheError("cache checksum failure in " + path);
    if (n_max != static_cast<std::int64_t>(values.size()) - 1)
        throw CacheError("cache length mismatch in " + path);
    return {FormDescriptor::for_kind(form_kind_from_string(kind)), std::move(values)};
}

CoefficientTable load_or_build(FormKind kind, std::int64_t N, const std::string& path, std::int64_t cap) {
    if (!path.empty() && std::filesystem::exists(path)) {
        try {
            auto t = load_cache(path);
            if (t.descriptor().kind == kind && t.n_max() >= N) return t;
        } catch (const CacheError&) {
            // Stale or corrupt cache: rebuild below.
        }
    }
    auto t = build_table(kind, N, cap);
    if (!path.empty()) save_cache(t, path);
    return t;
}

} // namespace gl3v
