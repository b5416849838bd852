#include "gl3v/coefficients.hpp"
#include "gl3v/errors.hpp"
#include "gl3v/harness.hpp"
#include "gl3v/rational.hpp"
#include "gl3v/twisted_sums.hpp"
#include "gl3v/voronoi.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace gl3v;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitError = 3;

int report(const CheckResult& r) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.section << ": " << r.detail << '\n';
    return r.pass ? 0 : kExitFail;
}

int report(const ReportBundle& b) {
    for (const auto& c : b.checks) report(c);
    std::cout << (b.pass ? "PASS" : "FAIL") << ' ' << b.experiment << '\n';
    return b.pass ? 0 : kExitFail;
}

// One-section config built from command-line values.
ExperimentConfig single(const std::string& name, const std::string& body, const std::string& cache_dir,
                        const std::string& output_dir, std::uint64_t seed) {
    std::ostringstream os;
    os << "experiment = " << name << "\nseed = " << seed << '\n';
    if (!cache_dir.empty()) os << "cache_dir = " << cache_dir << '\n';
    if (!output_dir.empty()) os << "output_dir = " << output_dir << '\n';
    os << '[' << name << "]\n" << body;
    return parse_config_text(os.str());
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : " ") + s;
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"GL(3) Voronoi summation and twisted coefficient sums"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string cache_dir, output_dir;
    std::uint64_t seed = 1;
    app.add_option("--cache-dir", cache_dir, "Coefficient cache directory (GL3V_CACHE_DIR overrides)");
    app.add_option("--output-dir", output_dir, "Directory for CSV and summary files");
    app.add_option("--seed", seed, "Seed for random alpha and sample points");

    std::function<int()> action;

    // coeffs
    auto* coeffs = app.add_subcommand("coeffs", "Build or load a coefficient table and print a_1..a_k");
    std::string form = "gl2";
    std::int64_t N = 1000;
    int print = 10;
    std::string out_path;
    coeffs->add_option("--form", form, "gl2, sym2, d3 or one")->capture_default_str();
    coeffs->add_option("--N", N, "Table length")->capture_default_str();
    coeffs->add_option("--print", print, "Number of leading coefficients printed")->capture_default_str();
    coeffs->add_option("--out", out_path, "Write the table to this cache file");
    coeffs->callback([&] {
        action = [&] {
            const auto t = cached_table(parse_form(form), N, cache_dir);
            if (!out_path.empty()) save_cache(*t, out_path);
            for (std::int64_t n = 1; n <= std::min<std::int64_t>(print, t->n_max()); ++n)
                std::printf("%lld %.17g\n", static_cast<long long>(n), (*t)(n));
            return 0;
        };
    });

    // kloosterman
    auto* kl = app.add_subcommand("kloosterman", "Print the Kloosterman sum S(n, m; c)");
    i64 kn = 0, km = 0, kc = 1;
    kl->add_option("n", kn)->required();
    kl->add_option("m", km)->required();
    kl->add_option("c", kc)->required();
    kl->callback([&] {
        action = [&] {
            std::printf("%.15g\n", kloosterman(kn, km, kc) + 0.0);
            return 0;
        };
    });

    // sum
    auto* sum = app.add_subcommand("sum", "Print re, im, abs of S(T, alpha) = sum_{n<=T} a_n e(n alpha)");
    double T = 1000.0;
    std::string alpha = "golden";
    sum->add_option("--form", form, "gl2, sym2, d3 or one")->capture_default_str();
    sum->add_option("--T", T, "Cutoff")->capture_default_str();
    sum->add_option("--alpha", alpha, "alpha: decimal, p/q, golden or sqrt2-1")->capture_default_str();
    sum->callback([&] {
        action = [&] {
            const auto t = cached_table(parse_form(form), static_cast<std::int64_t>(T), cache_dir);
            const double a = parse_alphas({alpha}, seed, 0).at(0);
            const cplx s = sharp_sum(*t, T, a);
            std::printf("%.17g %.17g %.17g\n", s.real(), s.imag(), std::abs(s));
            return 0;
        };
    });

    // exponent-fit
    auto* ef = app.add_subcommand("exponent-fit", "Fit the cancellation exponent of max_alpha |S(T, alpha)|");
    double t_from = 256, t_to = 32768;
    std::vector<std::string> alphas{"adversarial"};
    int randoms = 10;
    double beta_min = -1e300, beta_max = 1e300;
    ef->add_option("--form", form, "gl2, sym2, d3 or one")->capture_default_str();
    ef->add_option("--T-from", t_from, "Smallest T")->capture_default_str();
    ef->add_option("--T-to", t_to, "Largest T")->capture_default_str();
    ef->add_option("--alphas", alphas, "alpha set; `adversarial` expands to the seeded set")->capture_default_str();
    ef->add_option("--random-alphas", randoms, "Random points in the adversarial set")->capture_default_str();
    ef->add_option("--beta-min", beta_min, "Pass threshold: beta >= beta-min");
    ef->add_option("--beta-max", beta_max, "Pass threshold: beta <= beta-max");
    ef->callback([&] {
        action = [&] {
            std::ostringstream body;
            body << "check = exponent\nform = " << form << "\nT_from = " << t_from << "\nT_to = " << t_to
                 << "\nalphas = " << join(alphas) << "\nrandom_alphas = " << randoms << '\n';
            if (beta_min > -1e300) body << "beta_min = " << beta_min << '\n';
            if (beta_max < 1e300) body << "beta_max = " << beta_max << '\n';
            const auto cfg = single("exponent_fit", body.str(), cache_dir, output_dir, seed);
            const auto r = run_check(cfg, cfg.sections.at(0));
            for (const auto& [k, v] : r.fields) std::cout << k << " = " << v << '\n';
            return report(r);
        };
    });

    // voronoi-check
    auto* vc = app.add_subcommand("voronoi-check", "Compare both sides of the Voronoi identity");
    i64 va = 1, vcc = 2, vq = 1;
    double vT = 10.0, vY = 0.0, residual_max = 1e-3, budget = 1e-4;
    int omega = 0, eta = 0;
    std::int64_t table_size = 1 << 22;
    bool matrix = false;
    std::string kv_path, csv_path;
    vc->add_option("--a", va)->capture_default_str();
    vc->add_option("--c", vcc)->capture_default_str();
    vc->add_option("--q", vq)->capture_default_str();
    vc->add_option("--T", vT)->capture_default_str();
    vc->add_option("--Y", vY)->capture_default_str();
    vc->add_option("--omega", omega)->capture_default_str();
    vc->add_option("--eta", eta)->capture_default_str();
    vc->add_option("--table-size", table_size, "sym2 table length")->capture_default_str();
    vc->add_option("--residual-max", residual_max, "Pass threshold on the relative residual")->capture_default_str();
    vc->add_option("--budget", budget, "Allowed truncation tail relative to |value|")->capture_default_str();
    vc->add_option("--kv", kv_path, "Write the key-value report here");
    vc->add_option("--csv", csv_path, "Write the per-divisor CSV here");
    vc->add_flag("--matrix", matrix, "Run the full instance matrix instead of one instance");
    vc->callback([&] {
        action = [&] {
            if (matrix) {
                std::ostringstream body;
                body << "check = voronoi\nform = sym2\ntable_size = " << table_size
                     << "\na_c = 1/2 1/3 2/3\nq = 1 2\nT = 10 20\neta = 0 1\nresidual_max = " << residual_max
                     << "\nbudget = " << budget << '\n';
                const auto cfg = single("voronoi_matrix", body.str(), cache_dir, output_dir, seed);
                return report(run_check(cfg, cfg.sections.at(0)));
            }
            const auto t = cached_table(FormKind::gl3_sym2, table_size, cache_dir);
            const auto inst = make_instance(*t, vq, va, vcc, vT, vY, Parity(omega), Parity(eta));
            TruncationOptions opts;
            opts.budget = budget;
            const auto rep = identity_residual(inst, opts);
            rep.write_kv(std::cout);
            if (!kv_path.empty()) {
                std::ofstream os(kv_path);
                rep.write_kv(os);
            }
            if (!csv_path.empty()) {
                std::ofstream os(csv_path);
                rep.write_divisor_csv(os);
            }
            return rep.residual <= residual_max ? 0 : kExitFail;
        };
    });

    // special-test
    auto* st = app.add_subcommand("special-test", "Run a special-function identity suite");
    std::string suite = "all";
    st->add_option("--suite", suite, "reciprocity, multiplication, mellin-fourier, parseval, f-oracle, regimes or all")
        ->capture_default_str();
    st->callback([&] {
        action = [&] {
            const std::vector<std::pair<std::string, std::string>> suites{
                {"reciprocity", "check = reciprocity\npoints = 200\ntol = 1e-10\n"},
                {"multiplication", "check = multiplication\nn = 2 3 4\ntol = 1e-9\n"},
                {"mellin-fourier", "check = mellin_fourier\ntol = 1e-8\n"},
                {"parseval", "check = parseval\nform = gl2\nT = 50 200 500\ntol = 1e-9\n"},
                {"f-oracle", "check = f_oracle\nx = 0.3 1 2 5 -1.5\neta = 0 1\ntol = 1e-6\n"},
                {"regimes", "check = regimes\nk = 3\ntol = 0.15\n"},
            };
            int rc = 0;
            bool found = false;
            for (const auto& [name, body] : suites) {
                if (suite != "all" && suite != name) continue;
                found = true;
                std::string sec = name;
                for (auto& ch : sec)
                    if (ch == '-') ch = '_';
                const auto cfg = single(sec, body, cache_dir, output_dir, seed);
                rc = std::max(rc, report(run_check(cfg, cfg.sections.at(0))));
            }
            if (!found) throw CLI::ValidationError("--suite", "unknown suite " + suite);
            return rc;
        };
    });

    // moment-exponent
    auto* me = app.add_subcommand("moment-exponent", "Print 1 + (2 beta - 1) m");
    double beta = 0.75;
    int m = 3;
    me->add_option("beta", beta)->required();
    me->add_option("m", m)->required();
    me->callback([&] {
        action = [&] {
            std::printf("%.15g\n", moment_exponent(beta, m));
            return 0;
        };
    });

    // run
    auto* run = app.add_subcommand("run", "Run an experiment config (one per acceptance criterion)");
    std::string config_path;
    run->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    run->callback([&] {
        action = [&] {
            auto cfg = parse_config_file(config_path);
            if (!output_dir.empty()) cfg.output_dir = output_dir;
            if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
            return report(run_experiment(cfg));
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    try {
        return action();
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
}
