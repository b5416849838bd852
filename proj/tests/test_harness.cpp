#include "gl3v/errors.hpp"
#include "gl3v/harness.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gl3v;

namespace {
std::string slurp(const std::string& path) {
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int error_line(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}
} // namespace

TEST_CASE("moment exponent") {
    CHECK(moment_exponent(0.5, 3) == 1.0);
    CHECK(moment_exponent(0.5, 7) == 1.0);
    CHECK(moment_exponent(0.75, 3) == 2.5);
    CHECK_THROWS_AS(moment_exponent(0.4, 3), DomainError);
    CHECK_THROWS_AS(moment_exponent(1.0, 3), DomainError);
    CHECK_THROWS_AS(moment_exponent(0.75, 1), DomainError);
}

TEST_CASE("config parsing") {
    const auto cfg = parse_config_text(
        "# comment\nexperiment = demo\nseed = 9\n\n[a]\ncheck = moment\nbeta = 0.5 0.75\nm = 3, 3\nexpected = 1 2.5\n");
    CHECK(cfg.experiment == "demo");
    CHECK(cfg.seed == 9);
    REQUIRE(cfg.sections.size() == 1);
    CHECK(cfg.sections[0].name == "a");
    CHECK(cfg.sections[0].line == 5);
    CHECK(cfg.sections[0].get_doubles("beta") == std::vector<double>{0.5, 0.75});
    CHECK(cfg.sections[0].get_ints("m") == std::vector<std::int64_t>{3, 3});
    CHECK(cfg.sections[0].line_of("m") == 8);
}

TEST_CASE("config errors carry line numbers") {
    CHECK(error_line("experiment = x\n[a]\ncheck = weil\nthis line is bad\n") == 4);
    CHECK(error_line("experiment = x\n[a\n") == 2);
    CHECK(error_line("experiment = x\n[a]\ncheck = weil\nc_max = 3\nc_max = 4\n") == 5);
    CHECK(error_line("experiment = x\n[a]\ncheck = weil\ncolour = red\n") == 4);
    CHECK(error_line("experiment = x\n[a]\ncheck = nothing\n") == 3);
    CHECK(error_line("experiment = x\nbogus = 1\n[a]\ncheck = weil\n") == 2);
    CHECK(error_line("experiment = x\n[a]\nc_max = 3\n") == 2);
    CHECK(error_line("experiment = x\n[a]\ncheck = parseval\nform = gl9\n") == 4);
    CHECK(error_line("experiment = x\n") == 1);
    const auto cfg = parse_config_text("experiment = x\n[a]\ncheck = weil\nc_max = ten\n");
    try {
        run_experiment(cfg);
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.line() == 4);
    }
}

TEST_CASE("alpha parsing") {
    const auto a = parse_alphas({"golden", "sqrt2-1", "1/3", "0.25"}, 1, 0);
    REQUIRE(a.size() == 4);
    CHECK(a[0] == doctest::Approx(1.6180339887498949));
    CHECK(a[1] == doctest::Approx(0.41421356237309515));
    CHECK(a[2] == doctest::Approx(1.0 / 3.0));
    CHECK(a[3] == 0.25);
    CHECK(parse_alphas({"adversarial"}, 1, 10).size() == 14);
}

TEST_CASE("cache directory override") {
    const char* prev = std::getenv(kCacheEnvVar);
    const std::string saved = prev ? prev : "";
    ::setenv(kCacheEnvVar, "/tmp/gl3v-override", 1);
    CHECK(cache_directory("elsewhere") == "/tmp/gl3v-override");
    ::unsetenv(kCacheEnvVar);
    CHECK(cache_directory("elsewhere") == "elsewhere");
    CHECK(cache_directory() == "cache");
    if (prev) ::setenv(kCacheEnvVar, saved.c_str(), 1);
}

TEST_CASE("experiments are deterministic and write a summary") {
    const auto root = std::filesystem::temp_directory_path() / "gl3v_harness_test";
    std::filesystem::remove_all(root);
    const std::string text =
        "experiment = small\nseed = 4\n"
        "[exp]\ncheck = exponent\nform = gl2\nT_from = 256\nT_to = 2048\nalphas = adversarial\nrandom_alphas = 3\n"
        "beta_min = 0.2\nbeta_max = 0.8\n"
        "[kern]\ncheck = kernel\nN = 64 128\n"
        "[ar]\ncheck = weil\nc_max = 20\npairs = 5\n"
        "[mom]\ncheck = moment\nbeta = 0.75\nm = 3\nexpected = 2.5\n";
    std::string first;
    for (const char* run : {"one", "two"}) {
        auto cfg = parse_config_text(text);
        cfg.output_dir = (root / run).string();
        const auto bundle = run_experiment(cfg);
        CHECK(bundle.pass);
        REQUIRE(bundle.checks.size() == 4);
        CHECK(bundle.checks[0].fields[0].first == "beta");
        const std::string summary = slurp(cfg.output_dir + "/summary.txt");
        CHECK(summary.find("seed = 4") != std::string::npos);
        CHECK(summary.find("pass = true") != std::string::npos);
        // The summary is itself a valid config-format file.
        std::istringstream is(summary);
        std::string line;
        int sections = 0;
        while (std::getline(is, line))
            if (!line.empty() && line[0] == '[') ++sections;
        CHECK(sections == 4);
        const std::string csv = slurp(cfg.output_dir + "/exp.csv") + slurp(cfg.output_dir + "/kern.csv");
        if (first.empty())
            first = csv;
        else
            CHECK(csv == first);
    }
    std::filesystem::remove_all(root);
}

TEST_CASE("failing thresholds are reported") {
    const auto cfg = parse_config_text("experiment = f\n[mom]\ncheck = moment\nbeta = 0.75\nm = 3\nexpected = 2.4\n");
    const auto bundle = run_experiment(cfg);
    CHECK_FALSE(bundle.pass);
    CHECK(bundle.detail().find("[FAIL]") != std::string::npos);
}
