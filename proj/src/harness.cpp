#include "gl3v/harness.hpp"

#include "gl3v/errors.hpp"
#include "gl3v/ftransform.hpp"
#include "gl3v/mellin.hpp"
#include "gl3v/rational.hpp"
#include "gl3v/special_fn.hpp"
#include "gl3v/twisted_sums.hpp"
#include "gl3v/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace gl3v {

double moment_exponent(double beta, int m) {
    if (!(beta >= 0.5 && beta < 1.0)) throw DomainError("moment_exponent: beta must lie in [1/2, 1)");
    if (m < 2) throw DomainError("moment_exponent: m must be at least 2");
    return 1.0 + (2.0 * beta - 1.0) * m;
}

std::string cache_directory(const std::string& configured) {
    if (const char* env = std::getenv(kCacheEnvVar); env && *env) return env;
    if (!configured.empty()) return configured;
    return "cache";
}

FormKind parse_form(const std::string& s) {
    if (s == "gl2") return FormKind::gl2_holomorphic;
    if (s == "sym2") return FormKind::gl3_sym2;
    if (s == "d3") return FormKind::gl3_eisenstein_d3;
    if (s == "one") return FormKind::constant_one;
    return form_kind_from_string(s);
}

std::string form_name(FormKind k) {
    switch (k) {
    case FormKind::gl2_holomorphic: return "gl2";
    case FormKind::gl3_sym2: return "sym2";
    case FormKind::gl3_eisenstein_d3: return "d3";
    case FormKind::constant_one: return "one";
    }
    return "unknown";
}

std::shared_ptr<const CoefficientTable> cached_table(FormKind kind, std::int64_t N, const std::string& cache_dir) {
    static std::mutex mu;
    static std::map<std::pair<int, std::int64_t>, std::shared_ptr<const CoefficientTable>> memo;
    std::lock_guard<std::mutex> lock(mu);
    for (const auto& [key, table] : memo)
        if (key.first == static_cast<int>(kind) && key.second >= N) return table;
    const std::string dir = cache_directory(cache_dir);
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + form_name(kind) + "_" + std::to_string(N) + ".bin";
    auto table = std::make_shared<const CoefficientTable>(load_or_build(kind, N, path, std::max(N, kDefaultCoefficientCap)));
    memo[{static_cast<int>(kind), N}] = table;
    return table;
}

// ---------------------------------------------------------------------------
// Config parsing.

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ' ' || ch == '\t' || ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double to_double(const std::string& s, int line, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(line, "key '" + key + "': expected a number, got '" + s + "'");
}

std::int64_t to_int(const std::string& s, int line, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(line, "key '" + key + "': expected an integer, got '" + s + "'");
}

} // namespace

bool ConfigSection::has(const std::string& key) const {
    for (const auto& e : entries)
        if (e.first == key) return true;
    return false;
}

int ConfigSection::line_of(const std::string& key) const {
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i].first == key) return entry_lines[i];
    return line;
}

std::string ConfigSection::get(const std::string& key) const {
    for (const auto& e : entries)
        if (e.first == key) return e.second;
    throw ConfigError(line, "section [" + name + "]: missing key '" + key + "'");
}

std::string ConfigSection::get(const std::string& key, const std::string& fallback) const {
    return has(key) ? get(key) : fallback;
}

double ConfigSection::get_double(const std::string& key) const { return to_double(get(key), line_of(key), key); }

double ConfigSection::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::int64_t ConfigSection::get_int(const std::string& key) const { return to_int(get(key), line_of(key), key); }

std::int64_t ConfigSection::get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::vector<double> ConfigSection::get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& w : get_words(key)) out.push_back(to_double(w, line_of(key), key));
    return out;
}

std::vector<std::int64_t> ConfigSection::get_ints(const std::string& key) const {
    std::vector<std::int64_t> out;
    for (const auto& w : get_words(key)) out.push_back(to_int(w, line_of(key), key));
    return out;
}

std::vector<std::string> ConfigSection::get_words(const std::string& key) const {
    auto words = split_words(get(key));
    if (words.empty()) throw ConfigError(line_of(key), "key '" + key + "': empty list");
    return words;
}

ExperimentConfig parse_config(std::istream& is) {
    ExperimentConfig cfg;
    cfg.global.name = "global";
    cfg.global.line = 1;
    ConfigSection* cur = &cfg.global;
    std::set<std::string> names;
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(line, "unterminated section header");
            const std::string name = trim(s.substr(1, s.size() - 2));
            if (name.empty()) throw ConfigError(line, "empty section name");
            if (!names.insert(name).second) throw ConfigError(line, "duplicate section [" + name + "]");
            cfg.sections.push_back(ConfigSection{name, line, {}, {}});
            cur = &cfg.sections.back();
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigError(line, "empty key");
        if (key.find_first_of(" \t") != std::string::npos) throw ConfigError(line, "key contains whitespace");
        if (cur->has(key)) throw ConfigError(line, "duplicate key '" + key + "'");
        cur->entries.emplace_back(key, value);
        cur->entry_lines.push_back(line);
    }
    cfg.experiment = cfg.global.get("experiment", "experiment");
    cfg.seed = static_cast<std::uint64_t>(cfg.global.get_int("seed", 1));
    cfg.output_dir = cfg.global.get("output_dir", "");
    cfg.cache_dir = cfg.global.get("cache_dir", "");
    validate_config(cfg);
    return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError(0, "cannot open " + path);
    return parse_config(is);
}

// ---------------------------------------------------------------------------
// Checks.

namespace {

using Fields = std::vector<std::pair<std::string, std::string>>;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string shortnum(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
    return out;
}

struct Context {
    const ExperimentConfig& cfg;
    const ConfigSection& sec;
    CheckResult& res;

    std::ofstream open_csv(const std::string& stem) {
        if (cfg.output_dir.empty()) return {};
        std::filesystem::create_directories(cfg.output_dir);
        const std::string path = cfg.output_dir + "/" + sec.name + (stem.empty() ? "" : "_" + stem) + ".csv";
        res.files.push_back(path);
        std::ofstream os(path);
        if (!os) throw Error("cannot write " + path);
        return os;
    }
    void field(const std::string& k, const std::string& v) { res.fields.emplace_back(k, v); }
    void field(const std::string& k, double v) { res.fields.emplace_back(k, num(v)); }
    std::shared_ptr<const CoefficientTable> table(std::int64_t default_n) {
        const FormKind kind = parse_form(sec.get("form"));
        return cached_table(kind, sec.get_int("table_size", default_n), cfg.cache_dir);
    }
    VerticalLineSpec line() const {
        VerticalLineSpec l;
        l.sigma = sec.get_double("sigma", l.sigma);
        l.H = sec.get_double("H", l.H);
        l.h = sec.get_double("h", l.h);
        l.validate();
        return l;
    }
};

std::vector<double> dyadic_or_list(const ConfigSection& sec, const std::string& list_key) {
    if (sec.has(list_key)) return sec.get_doubles(list_key);
    const double lo = sec.get_double("T_from"), hi = sec.get_double("T_to");
    const int points = static_cast<int>(sec.get_int("points_per_decade", 8));
    if (!(lo > 0.0 && hi > lo)) throw ConfigError(sec.line_of("T_from"), "need 0 < T_from < T_to");
    std::vector<double> out;
    const int n = static_cast<int>(std::ceil(std::log10(hi / lo) * points));
    for (int i = 0; i <= n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / n));
    return out;
}

// G_eta(s) G_eta(1-s) = (-1)^eta at seeded points in -2 <= Re s <= 3, |Im s| <= 10.
void check_reciprocity(Context& ctx) {
    const int points = static_cast<int>(ctx.sec.get_int("points", 200));
    const double tol = ctx.sec.get_double("tol", 1e-10);
    std::mt19937_64 rng(ctx.cfg.seed);
    std::uniform_real_distribution<double> re(-2.0, 3.0), im(-10.0, 10.0);
    double worst = 0.0;
    int used = 0;
    for (int eta = 0; eta < 2; ++eta) {
        const Parity p(eta);
        int k = 0;
        while (k < points) {
            const cplx s(re(rng), im(rng));
            if (g_delta_near_pole(p, s, 1e-3) || g_delta_near_pole(p, 1.0 - s, 1e-3)) continue;
            const cplx v = g_delta(p, s) * g_delta(p, 1.0 - s);
            worst = std::max(worst, std::abs(v - p.sign()));
            ++k;
            ++used;
        }
    }
    ctx.field("points", static_cast<double>(used));
    ctx.field("max_residual", worst);
    ctx.res.pass = worst <= tol;
    ctx.res.detail = "reciprocity max " + shortnum(worst) + " on " + std::to_string(used) + " points";
}

void check_multiplication(Context& ctx) {
    const auto ns = ctx.sec.get_ints("n");
    const int points = static_cast<int>(ctx.sec.get_int("points", 50));
    const double tol = ctx.sec.get_double("tol", 1e-9);
    std::mt19937_64 rng(ctx.cfg.seed);
    std::uniform_real_distribution<double> re(0.1, 4.0), im(-20.0, 20.0);
    double worst = 0.0;
    std::vector<std::string> parts;
    for (auto n : ns) {
        double w = 0.0;
        for (int k = 0; k < points; ++k) w = std::max(w, gamma_multiplication_residual(static_cast<int>(n), cplx(re(rng), im(rng))));
        ctx.field("max_residual_n" + std::to_string(n), w);
        parts.push_back("n=" + std::to_string(n) + " " + shortnum(w));
        worst = std::max(worst, w);
    }
    ctx.res.pass = worst <= tol;
    ctx.res.detail = "multiplication " + join(parts, ", ");
}

void check_mellin_fourier(Context& ctx) {
    const double tol = ctx.sec.get_double("tol", 1e-8);
    double worst = 0.0;
    for (int p = 0; p < 2; ++p) {
        const auto g = gaussian_function(Parity(p));
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                const cplx s(0.2 + 0.15 * i, -2.0 + 1.0 * j);
                worst = std::max(worst, mellin_fourier_residual(g, s));
            }
    }
    ctx.field("max_residual", worst);
    ctx.res.pass = worst <= tol;
    ctx.res.detail = "mellin-fourier max " + shortnum(worst) + " on 2x25 points";
}

void check_parseval(Context& ctx) {
    const auto Ts = ctx.sec.get_ints("T");
    const double tol = ctx.sec.get_double("tol", 1e-9);
    std::int64_t tmax = 0;
    for (auto T : Ts) tmax = std::max(tmax, T);
    const auto table = ctx.table(tmax);
    double worst = 0.0;
    for (auto T : Ts) {
        double norm = 0.0;
        for (std::int64_t n = 1; n <= T; ++n) norm += (*table)(n) * (*table)(n);
        const double rel = parseval_residual(*table, T) / norm;
        ctx.field("relative_residual_T" + std::to_string(T), rel);
        worst = std::max(worst, rel);
    }
    ctx.res.pass = worst <= tol;
    ctx.res.detail = "parseval " + ctx.sec.get("form") + " max " + shortnum(worst);
}

EmbeddingParams synthetic_params() {
    EmbeddingParams p;
    p.lambda = {0.3, 0.0, -0.3};
    p.delta = {Parity(0), Parity(0), Parity(0)};
    return p;
}

void check_f_oracle(Context& ctx) {
    const auto xs = ctx.sec.get_doubles("x");
    const auto etas = ctx.sec.get_ints("eta");
    const double tol = ctx.sec.get_double("tol", 1e-6);
    const auto params = synthetic_params();
    const auto line = ctx.line();
    auto os = ctx.open_csv("");
    if (os) os << "# gl3v f-oracle v1\neta,x,contour_re,contour_im,oracle_re,oracle_im,relative_error\n";
    double worst = 0.0;
    for (auto eta : etas) {
        const auto fam = build_gaussian_family(Parity(static_cast<int>(eta)), params);
        const auto F = cached_transform(params, fam, line);
        for (double x : xs) {
            const cplx c = (*F)(x).value;
            const cplx o = direct_F_oracle(params, fam, x);
            const double rel = std::abs(c - o) / std::abs(o);
            worst = std::max(worst, rel);
            if (os)
                os << eta << ',' << num(x) << ',' << num(c.real()) << ',' << num(c.imag()) << ',' << num(o.real())
                   << ',' << num(o.imag()) << ',' << num(rel) << '\n';
        }
    }
    ctx.field("max_relative_error", worst);
    ctx.res.pass = worst <= tol;
    ctx.res.detail = "F vs oracle max rel " + shortnum(worst);
}

void check_regimes(Context& ctx) {
    const int k = static_cast<int>(ctx.sec.get_int("k", 3));
    RegimeSlopeOptions opts;
    if (ctx.sec.has("Y")) opts.Y_grid = ctx.sec.get_doubles("Y");
    opts.Y_small = ctx.sec.get_double("Y_small", opts.Y_small);
    opts.decay_order = ctx.sec.get_double("N", opts.decay_order);
    opts.tol = ctx.sec.get_double("tol", opts.tol);
    const auto params = EmbeddingParams::discrete_series(k);
    const auto slopes = regime_slopes(params, opts, ctx.line());
    auto os = ctx.open_csv("");
    if (os) os << "# gl3v regimes v1\nregime,measured,predicted,upper_bound,pass\n";
    bool pass = true;
    std::vector<std::string> parts;
    static const char* tags[] = {"small_y", "small_x", "power", "rapid"};
    for (const auto& r : slopes) {
        const std::string tag = tags[static_cast<int>(r.regime)];
        ctx.field(tag + "_measured", r.measured);
        ctx.field(tag + "_predicted", r.predicted);
        ctx.field(tag + "_pass", r.pass ? "true" : "false");
        if (os)
            os << tag << ',' << num(r.measured) << ',' << num(r.predicted) << ',' << (r.upper_bound ? 1 : 0) << ','
               << (r.pass ? 1 : 0) << '\n';
        parts.push_back(tag + " " + shortnum(r.measured) + (r.upper_bound ? " vs bound " : " vs ") +
                        shortnum(r.predicted));
        pass = pass && r.pass;
    }
    ctx.res.pass = pass;
    ctx.res.detail = "regimes k=" + std::to_string(k) + ": " + join(parts, ", ");
}

void check_voronoi(Context& ctx) {
    const auto table = ctx.table(1 << 22);
    const auto ac = ctx.sec.get_words("a_c");
    const auto qs = ctx.sec.get_ints("q");
    const auto Ts = ctx.sec.get_doubles("T");
    const auto etas = ctx.sec.has("eta") ? ctx.sec.get_ints("eta") : std::vector<std::int64_t>{0};
    const auto omegas = ctx.sec.has("omega") ? ctx.sec.get_ints("omega") : std::vector<std::int64_t>{0};
    const auto Ys = ctx.sec.has("Y") ? ctx.sec.get_doubles("Y") : std::vector<double>{0.0};
    const double tol = ctx.sec.get_double("residual_max", 1e-3);
    TruncationOptions opts;
    opts.budget = ctx.sec.get_double("budget", opts.budget);
    const auto line = ctx.line();

    auto os = ctx.open_csv("");
    if (os)
        os << "# gl3v voronoi v1\nq,a,c,T,Y,omega,eta,lhs_re,lhs_im,rhs_re,rhs_im,residual,error_budget,status\n";
    double worst = 0.0;
    int run = 0, skipped = 0;
    std::vector<std::string> excluded, failed;
    for (const auto& w : ac) {
        const auto slash = w.find('/');
        if (slash == std::string::npos) throw ConfigError(ctx.sec.line_of("a_c"), "a_c entries are a/c");
        const i64 a = to_int(w.substr(0, slash), ctx.sec.line_of("a_c"), "a_c");
        const i64 c = to_int(w.substr(slash + 1), ctx.sec.line_of("a_c"), "a_c");
        for (auto q : qs)
            for (double T : Ts)
                for (double Y : Ys)
                    for (auto om : omegas)
                        for (auto eta : etas) {
                            const std::string tag = "(a,c,q,T,Y,omega,eta)=(" + std::to_string(a) + "," +
                                                    std::to_string(c) + "," + std::to_string(q) + "," + shortnum(T) +
                                                    "," + shortnum(Y) + "," + std::to_string(om) + "," +
                                                    std::to_string(eta) + ")";
                            if (Y == 0.0 && om == 1) {
                                ++skipped;  // f vanishes identically
                                continue;
                            }
                            const auto inst = make_instance(*table, q, a, c, T, Y, Parity(static_cast<int>(om)),
                                                            Parity(static_cast<int>(eta)), line);
                            std::string status = "ok";
                            IdentityReport rep;
                            try {
                                rep = identity_residual(inst, opts);
                            } catch (const BudgetError& e) {
                                excluded.push_back(tag + ": " + e.what());
                                std::cerr << "voronoi: excluded " << tag << ": " << e.what() << '\n';
                                if (os)
                                    os << q << ',' << a << ',' << c << ',' << num(T) << ',' << num(Y) << ',' << om
                                       << ',' << eta << ",,,,,,,excluded\n";
                                continue;
                            }
                            ++run;
                            if (std::abs(rep.lhs) == 0.0 && std::abs(rep.rhs) == 0.0) status = "degenerate";
                            if (rep.residual > tol) {
                                status = "fail";
                                failed.push_back(tag + " residual " + shortnum(rep.residual));
                            }
                            worst = std::max(worst, rep.residual);
                            if (os)
                                os << q << ',' << a << ',' << c << ',' << num(T) << ',' << num(Y) << ',' << om << ','
                                   << eta << ',' << num(rep.lhs.real()) << ',' << num(rep.lhs.imag()) << ','
                                   << num(rep.rhs.real()) << ',' << num(rep.rhs.imag()) << ',' << num(rep.residual)
                                   << ',' << num(rep.error_budget) << ',' << status << '\n';
                            if (!ctx.cfg.output_dir.empty() && ctx.sec.get("divisor_csv", "false") == "true") {
                                auto ds = ctx.open_csv(std::to_string(run));
                                rep.write_divisor_csv(ds);
                            }
                        }
    }
    ctx.field("instances", static_cast<double>(run));
    ctx.field("skipped_degenerate_family", static_cast<double>(skipped));
    ctx.field("excluded", static_cast<double>(excluded.size()));
    for (std::size_t i = 0; i < excluded.size(); ++i) ctx.field("excluded_" + std::to_string(i + 1), excluded[i]);
    ctx.field("max_residual", worst);
    ctx.res.pass = failed.empty() && run > 0;
    ctx.res.detail = "voronoi " + std::to_string(run) + " instances, max residual " + shortnum(worst) +
                     (excluded.empty() ? "" : ", " + std::to_string(excluded.size()) + " excluded") +
                     (failed.empty() ? "" : ", failed: " + join(failed, "; "));
}

void check_exponent(Context& ctx) {
    const double lo = ctx.sec.get_double("T_from"), hi = ctx.sec.get_double("T_to");
    const auto table = ctx.table(static_cast<std::int64_t>(std::ceil(hi)));
    const auto alphas = parse_alphas(ctx.sec.get_words("alphas"), ctx.cfg.seed,
                                     static_cast<int>(ctx.sec.get_int("random_alphas", 10)));
    const bool refine = ctx.sec.get("refine", "true") == "true";
    const auto fit = exponent_fit(*table, lo, hi, alphas, refine);
    auto os = ctx.open_csv("");
    if (os) {
        std::vector<SumResult> rows;
        for (const auto& p : fit.envelope) rows.push_back({p.T, p.alpha, sharp_sum(*table, p.T, p.alpha), SumKind::sharp, 0.0});
        write_sums_csv(os, rows);
    }
    ctx.field("beta", fit.beta);
    ctx.field("intercept", fit.intercept);
    ctx.field("rms", fit.rms);
    ctx.field("alpha_count", static_cast<double>(alphas.size()));
    std::vector<std::string> as;
    for (double a : alphas) as.push_back(num(a));
    ctx.field("alphas", join(as, " "));
    const double bmin = ctx.sec.get_double("beta_min", -1e300), bmax = ctx.sec.get_double("beta_max", 1e300);
    ctx.res.pass = fit.beta >= bmin && fit.beta <= bmax;
    std::string range = ctx.sec.has("beta_min") ? "[" + shortnum(bmin) + ", " + shortnum(bmax) + "]" : "<= " + shortnum(bmax);
    ctx.res.detail = ctx.sec.get("form") + " beta " + shortnum(fit.beta) + " (want " + range + ")";
}

void check_scaling(Context& ctx) {
    const auto table = ctx.table(1 << 22);
    const auto alphas = parse_alphas(ctx.sec.get_words("alpha"), ctx.cfg.seed, 0);
    const auto Ts = ctx.sec.get_doubles("T");
    const double smax = ctx.sec.get_double("slope_max", 0.85);
    TruncationOptions opts;
    opts.budget = ctx.sec.get_double("budget", opts.budget);
    auto os = ctx.open_csv("");
    if (os) os << "# gl3v scaling v1\nalpha,T,a,c,Y,rhs_abs,lhs_abs,residual\n";
    bool pass = true;
    std::vector<std::string> parts;
    for (double alpha : alphas) {
        const auto fit = rhs_scaling_experiment(*table, alpha, Ts, opts, ctx.line());
        for (const auto& p : fit.points)
            if (os)
                os << num(alpha) << ',' << num(p.T) << ',' << p.a << ',' << p.c << ',' << num(p.Y) << ','
                   << num(p.rhs_abs) << ',' << num(p.lhs_abs) << ',' << num(p.residual) << '\n';
        ctx.field("slope_alpha_" + num(alpha), fit.slope);
        parts.push_back(shortnum(alpha) + ": " + shortnum(fit.slope));
        pass = pass && fit.slope <= smax;
    }
    ctx.res.pass = pass;
    ctx.res.detail = "rhs slopes " + join(parts, ", ") + " (want <= " + shortnum(smax) + ")";
}

int divisor_count(i64 c) { return static_cast<int>(divisors(c).size()); }

void check_weil(Context& ctx) {
    const i64 cmax = ctx.sec.get_int("c_max", 100);
    const int pairs = static_cast<int>(ctx.sec.get_int("pairs", 50));
    std::mt19937_64 rng(ctx.cfg.seed);
    std::uniform_int_distribution<i64> dist(-10000, 10000);
    double worst_ratio = 0.0, worst_naive = 0.0;
    int violations = 0;
    for (i64 c = 1; c <= cmax; ++c)
        for (int k = 0; k < pairs; ++k) {
            const i64 n = dist(rng), m = dist(rng);
            const double s = kloosterman(n, m, c);
            worst_naive = std::max(worst_naive, std::abs(s - kloosterman_naive(n, m, c)));
            const double bound = divisor_count(c) * std::sqrt(static_cast<double>(gcd(gcd(n, m), c))) *
                                 std::sqrt(static_cast<double>(c));
            worst_ratio = std::max(worst_ratio, std::abs(s) / bound);
            if (std::abs(s) > bound * (1.0 + 1e-12)) ++violations;
        }
    ctx.field("max_ratio_to_bound", worst_ratio);
    ctx.field("max_naive_difference", worst_naive);
    ctx.field("violations", static_cast<double>(violations));
    ctx.res.pass = violations == 0 && worst_naive <= 1e-9;
    ctx.res.detail = "weil max |S|/bound " + shortnum(worst_ratio) + ", enumeration diff " + shortnum(worst_naive);
}

// S(n, m; c1 c2) = S(n cbar2^2, m; c1) S(n cbar1^2, m; c2) for coprime c1, c2.
void check_multiplicativity(Context& ctx) {
    const i64 cmax = ctx.sec.get_int("c_max", 100);
    const int pairs = static_cast<int>(ctx.sec.get_int("pairs", 50));
    std::mt19937_64 rng(ctx.cfg.seed);
    std::uniform_int_distribution<i64> dist(-10000, 10000);
    double worst = 0.0;
    int factorizations = 0;
    for (i64 c = 2; c <= cmax; ++c) {
        std::vector<std::pair<i64, i64>> splits;
        for (i64 c1 : divisors(c))
            if (c1 > 1 && c1 < c && gcd(c1, c / c1) == 1 && c1 < c / c1) splits.emplace_back(c1, c / c1);
        for (int k = 0; k < pairs; ++k) {
            const i64 n = dist(rng), m = dist(rng);
            const double whole = kloosterman_naive(n, m, c);
            for (auto [c1, c2] : splits) {
                const i64 b2 = mod_inverse(c2 % c1, c1), b1 = mod_inverse(c1 % c2, c2);
                const i64 n1 = ((n % c1) * ((b2 * b2) % c1)) % c1, n2 = ((n % c2) * ((b1 * b1) % c2)) % c2;
                const double prod = kloosterman_naive(n1, m, c1) * kloosterman_naive(n2, m, c2);
                worst = std::max(worst, std::abs(whole - prod));
                ++factorizations;
            }
        }
    }
    ctx.field("comparisons", static_cast<double>(factorizations));
    ctx.field("max_difference", worst);
    ctx.res.pass = worst <= 1e-9 && factorizations > 0;
    ctx.res.detail = "multiplicativity " + std::to_string(factorizations) + " comparisons, max diff " + shortnum(worst);
}

// 1/(q_k (q_k + q_{k+1})) <= |alpha - p_k/q_k| <= 1/(q_k q_{k+1}).
void check_bracketing(Context& ctx) {
    const int count = static_cast<int>(ctx.sec.get_int("count", 100));
    const double qlimit = ctx.sec.get_double("q_limit", 1e5);
    std::mt19937_64 rng(ctx.cfg.seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    int checked = 0, violations = 0;
    for (int i = 0; i < count; ++i) {
        const double alpha = dist(rng);
        const auto cf = continued_fraction(alpha);
        for (std::size_t k = 0; k + 1 < cf.size(); ++k) {
            const double q0 = static_cast<double>(cf[k].q), q1 = static_cast<double>(cf[k + 1].q);
            if (q1 > qlimit) break;
            const double err = std::abs(alpha - static_cast<double>(cf[k].p) / q0);
            const double upper = 1.0 / (q0 * q1), lower = 1.0 / (q0 * (q0 + q1));
            const double slack = 1e-9 * upper;
            if (err > upper + slack || err < lower - slack) ++violations;
            if (std::abs(cf[k + 1].p * cf[k].q - cf[k].p * cf[k + 1].q) != 1) ++violations;
            ++checked;
        }
    }
    ctx.field("alphas", static_cast<double>(count));
    ctx.field("convergents_checked", static_cast<double>(checked));
    ctx.field("violations", static_cast<double>(violations));
    ctx.res.pass = violations == 0 && checked > 0;
    ctx.res.detail = "bracketing " + std::to_string(checked) + " convergents, " + std::to_string(violations) + " violations";
}

void check_rankin(Context& ctx) {
    const auto Ts = dyadic_or_list(ctx.sec, "T");
    const auto table = ctx.table(static_cast<std::int64_t>(std::ceil(*std::max_element(Ts.begin(), Ts.end()))));
    const double slope = rankin_selberg_slope(*table, Ts);
    const double lo = ctx.sec.get_double("slope_min", 0.9), hi = ctx.sec.get_double("slope_max", 1.1);
    ctx.field("slope", slope);
    ctx.res.pass = slope >= lo && slope <= hi;
    ctx.res.detail = "rankin-selberg " + ctx.sec.get("form") + " slope " + shortnum(slope);
}

void check_kernel(Context& ctx) {
    const auto Ns = ctx.sec.get_ints("N");
    const double rmax = ctx.sec.get_double("ratio_max", 20.0);
    const SharpeningKernel kern(ctx.sec.get_double("rho", 0.5));
    auto os = ctx.open_csv("");
    if (os) os << "# gl3v kernel v1\nN,l1_norm,ratio\n";
    double worst = 0.0;
    for (auto N : Ns) {
        const double l1 = kernel_l1_norm(kern.kernel(static_cast<int>(N)));
        const double ratio = l1 / std::log(static_cast<double>(N));
        worst = std::max(worst, ratio);
        if (os) os << N << ',' << num(l1) << ',' << num(ratio) << '\n';
        ctx.field("ratio_N" + std::to_string(N), ratio);
    }
    ctx.field("max_ratio", worst);
    ctx.res.pass = worst < rmax;
    ctx.res.detail = "kernel max ||D||_1/log N " + shortnum(worst);
}

void check_sharpen(Context& ctx) {
    const auto Ns = ctx.sec.get_ints("N");
    const auto alphas = parse_alphas(ctx.sec.get_words("alphas"), ctx.cfg.seed, 0);
    const double tol = ctx.sec.get_double("tol", 1e-8);
    const SharpeningKernel kern(ctx.sec.get_double("rho", 0.5));
    std::int64_t nmax = 0;
    for (auto N : Ns) nmax = std::max<std::int64_t>(nmax, static_cast<std::int64_t>(std::ceil(300.0 * N)));
    const auto table = ctx.table(nmax);
    double worst = 0.0;
    for (auto N : Ns)
        for (double alpha : alphas) {
            const cplx s = sharp_sum(*table, static_cast<double>(N), alpha);
            const cplx r = sharpen_by_convolution(*table, kern, static_cast<int>(N), alpha);
            worst = std::max(worst, std::abs(r - s) / std::abs(s));
        }
    ctx.field("max_relative_error", worst);
    ctx.res.pass = worst <= tol;
    ctx.res.detail = "sharpening max rel " + shortnum(worst);
}

void check_moment(Context& ctx) {
    const auto betas = ctx.sec.get_doubles("beta");
    const auto ms = ctx.sec.get_ints("m");
    const auto expected = ctx.sec.get_doubles("expected");
    if (betas.size() != ms.size() || betas.size() != expected.size())
        throw ConfigError(ctx.sec.line, "beta, m and expected must have equal lengths");
    bool pass = true;
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < betas.size(); ++i) {
        const double v = moment_exponent(betas[i], static_cast<int>(ms[i]));
        pass = pass && v == expected[i];
        parts.push_back("(" + shortnum(betas[i]) + "," + std::to_string(ms[i]) + ")->" + shortnum(v));
        ctx.field("exponent_" + std::to_string(i + 1), v);
    }
    bool rejects = false;
    try {
        moment_exponent(0.4, 3);
    } catch (const DomainError&) {
        rejects = true;
    }
    ctx.field("rejects_beta_below_half", rejects ? "true" : "false");
    ctx.res.pass = pass && rejects;
    ctx.res.detail = "moment " + join(parts, ", ") + (rejects ? ", beta=0.4 rejected" : ", beta=0.4 accepted");
}

struct CheckSpec {
    std::function<void(Context&)> run;
    std::set<std::string> keys;
};

const std::map<std::string, CheckSpec>& registry() {
    static const std::set<std::string> contour{"sigma", "H", "h"};
    auto with = [](std::set<std::string> a, const std::set<std::string>& b) {
        a.insert(b.begin(), b.end());
        return a;
    };
    static const std::map<std::string, CheckSpec> r{
        {"reciprocity", {check_reciprocity, {"points", "tol"}}},
        {"multiplication", {check_multiplication, {"n", "points", "tol"}}},
        {"mellin_fourier", {check_mellin_fourier, {"tol"}}},
        {"parseval", {check_parseval, {"form", "table_size", "T", "tol"}}},
        {"f_oracle", {check_f_oracle, with({"x", "eta", "tol"}, contour)}},
        {"regimes", {check_regimes, with({"k", "Y", "Y_small", "N", "tol"}, contour)}},
        {"voronoi",
         {check_voronoi, with({"form", "table_size", "a_c", "q", "T", "eta", "omega", "Y", "residual_max", "budget",
                               "divisor_csv"},
                              contour)}},
        {"exponent",
         {check_exponent, {"form", "table_size", "T_from", "T_to", "alphas", "random_alphas", "refine", "beta_min", "beta_max"}}},
        {"scaling", {check_scaling, with({"form", "table_size", "alpha", "T", "slope_max", "budget"}, contour)}},
        {"weil", {check_weil, {"c_max", "pairs"}}},
        {"multiplicativity", {check_multiplicativity, {"c_max", "pairs"}}},
        {"bracketing", {check_bracketing, {"count", "q_limit"}}},
        {"rankin", {check_rankin, {"form", "table_size", "T", "T_from", "T_to", "points_per_decade", "slope_min", "slope_max"}}},
        {"kernel", {check_kernel, {"N", "rho", "ratio_max"}}},
        {"sharpen", {check_sharpen, {"form", "table_size", "N", "alphas", "rho", "tol"}}},
        {"moment", {check_moment, {"beta", "m", "expected"}}},
    };
    return r;
}

} // namespace

std::vector<double> parse_alphas(const std::vector<std::string>& words, std::uint64_t seed, int randoms) {
    std::vector<double> out;
    for (const auto& w : words) {
        if (w == "adversarial") {
            const auto set = adversarial_alpha_set(seed, randoms);
            out.insert(out.end(), set.begin(), set.end());
        } else if (w == "golden") {
            out.push_back(std::numbers::phi);
        } else if (w == "sqrt2-1") {
            out.push_back(std::numbers::sqrt2 - 1.0);
        } else if (const auto slash = w.find('/'); slash != std::string::npos) {
            out.push_back(to_double(w.substr(0, slash), 0, "alpha") / to_double(w.substr(slash + 1), 0, "alpha"));
        } else {
            out.push_back(to_double(w, 0, "alpha"));
        }
    }
    return out;
}

void validate_config(const ExperimentConfig& cfg) {
    static const std::set<std::string> global_keys{"experiment", "seed", "output_dir", "cache_dir"};
    for (std::size_t i = 0; i < cfg.global.entries.size(); ++i)
        if (!global_keys.count(cfg.global.entries[i].first))
            throw ConfigError(cfg.global.entry_lines[i], "unknown global key '" + cfg.global.entries[i].first + "'");
    if (cfg.sections.empty()) throw ConfigError(cfg.global.line, "no [section] defined");
    for (const auto& sec : cfg.sections) {
        if (!sec.has("check")) throw ConfigError(sec.line, "section [" + sec.name + "] has no 'check' key");
        const auto it = registry().find(sec.get("check"));
        if (it == registry().end())
            throw ConfigError(sec.line_of("check"), "unknown check '" + sec.get("check") + "'");
        for (std::size_t i = 0; i < sec.entries.size(); ++i) {
            const auto& key = sec.entries[i].first;
            if (key != "check" && !it->second.keys.count(key))
                throw ConfigError(sec.entry_lines[i], "check '" + it->first + "' does not accept key '" + key + "'");
        }
        if (sec.has("form")) {
            try {
                parse_form(sec.get("form"));
            } catch (const Error&) {
                throw ConfigError(sec.line_of("form"), "unknown form '" + sec.get("form") + "'");
            }
        }
    }
}

CheckResult run_check(const ExperimentConfig& cfg, const ConfigSection& section) {
    CheckResult res;
    res.section = section.name;
    res.check = section.get("check");
    const auto it = registry().find(res.check);
    if (it == registry().end()) throw ConfigError(section.line_of("check"), "unknown check '" + res.check + "'");
    Context ctx{cfg, section, res};
    try {
        it->second.run(ctx);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw Error("section [" + section.name + "] (" + res.check + "): " + e.what());
    }
    return res;
}

ReportBundle run_experiment(const ExperimentConfig& cfg) {
    ReportBundle bundle;
    bundle.experiment = cfg.experiment;
    bundle.seed = cfg.seed;
    bundle.pass = true;
    for (const auto& sec : cfg.sections) {
        bundle.checks.push_back(run_check(cfg, sec));
        bundle.pass = bundle.pass && bundle.checks.back().pass;
    }
    if (!cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        std::ofstream os(cfg.output_dir + "/summary.txt");
        bundle.write_summary(os);
    }
    return bundle;
}

void ReportBundle::write_summary(std::ostream& os) const {
    os << "experiment = " << experiment << '\n';
    os << "seed = " << seed << '\n';
    os << "pass = " << (pass ? "true" : "false") << '\n';
    for (const auto& c : checks) {
        os << "\n[" << c.section << "]\n";
        os << "check = " << c.check << '\n';
        os << "pass = " << (c.pass ? "true" : "false") << '\n';
        for (const auto& [k, v] : c.fields) os << k << " = " << v << '\n';
        for (std::size_t i = 0; i < c.files.size(); ++i) os << "file_" << i + 1 << " = " << c.files[i] << '\n';
    }
}

std::string ReportBundle::detail() const {
    std::vector<std::string> parts;
    for (const auto& c : checks) parts.push_back(c.detail + (c.pass ? "" : " [FAIL]"));
    return join(parts, "; ");
}

} // namespace gl3v
