#pragma once

#include "gl3v/coefficients.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace gl3v {

// 1 + (2 beta - 1) m. Throws DomainError unless 1/2 <= beta < 1 and m >= 2.
double moment_exponent(double beta, int m);

inline constexpr const char* kCacheEnvVar = "GL3V_CACHE_DIR";

// $GL3V_CACHE_DIR when set, else configured, else "cache".
std::string cache_directory(const std::string& configured = "");

// Coefficient table from <cache_dir>/<kind>_<N>.bin, built and written on a
// miss. Tables are also memoized in-process. The requested N is taken as
// the length cap, so explicit config sizes above the default cap are allowed.
std::shared_ptr<const CoefficientTable> cached_table(FormKind kind, std::int64_t N,
                                                     const std::string& cache_dir = "");

// Form names accepted in configs and on the command line: gl2, sym2, d3, one.
FormKind parse_form(const std::string& s);
std::string form_name(FormKind k);

// One [section] of a config, or the global block before the first section.
struct ConfigSection {
    std::string name;
    int line = 0;
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<int> entry_lines;

    bool has(const std::string& key) const;
    int line_of(const std::string& key) const;  // section line when absent
    // Throws ConfigError (with the entry's line) on a missing key or bad value.
    std::string get(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<std::int64_t> get_ints(const std::string& key) const;
    std::vector<std::string> get_words(const std::string& key) const;
};

// Line-oriented `key = value` text with [section] headers and # comments.
// The global block holds experiment, seed, output_dir and cache_dir; every
// section names one check through `check = ...`.
struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 1;
    std::string output_dir;  // empty: no files written
    std::string cache_dir;
    ConfigSection global;
    std::vector<ConfigSection> sections;
};

// Throws ConfigError with the offending line number.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Checks every section against the keys its check accepts.
void validate_config(const ExperimentConfig& cfg);

struct CheckResult {
    std::string section;
    std::string check;
    bool pass = false;
    std::string detail;  // one-line human summary
    std::vector<std::pair<std::string, std::string>> fields;
    std::vector<std::string> files;
};

struct ReportBundle {
    std::string experiment;
    std::uint64_t seed = 1;
    bool pass = false;
    std::vector<CheckResult> checks;

    // The summary in the config format: global keys, then one section per check.
    void write_summary(std::ostream& os) const;
    std::string detail() const;
};

// Runs every section in order; writes CSVs and summary.txt under output_dir.
// Deterministic given the config. Module errors propagate as Error with the
// failing section named.
ReportBundle run_experiment(const ExperimentConfig& cfg);

// Runs a single section; used by the CLI subcommands.
CheckResult run_check(const ExperimentConfig& cfg, const ConfigSection& section);

// Names like golden, sqrt2-1, p/q or decimals; `adversarial` expands to
// adversarial_alpha_set(seed, randoms).
std::vector<double> parse_alphas(const std::vector<std::string>& words, std::uint64_t seed, int randoms);

} // namespace gl3v
