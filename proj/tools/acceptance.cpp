#include "gl3v/harness.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <set>
#include <string>

#ifndef GL3V_CONFIG_DIR
#define GL3V_CONFIG_DIR "configs"
#endif

// Runs configs/criterion_<k>.cfg for each criterion and prints one line per criterion.
// Arguments restrict the run to the listed criteria.
int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    const char* out_env = std::getenv("GL3V_ACCEPTANCE_DIR");
    const std::string out_root = out_env && *out_env ? out_env : "acceptance";
    bool all = true;
    for (int k = 1; k <= 9; ++k) {
        if (!only.empty() && !only.count(k)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        std::string line;
        bool pass = false;
        try {
            auto cfg = gl3v::parse_config_file(std::string(GL3V_CONFIG_DIR) + "/criterion_" + std::to_string(k) + ".cfg");
            cfg.output_dir = out_root + "/criterion_" + std::to_string(k);
            const auto bundle = gl3v::run_experiment(cfg);
            pass = bundle.pass;
            line = bundle.detail();
        } catch (const std::exception& e) {
            line = std::string("error: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %d %s: %s (%.0f s)\n", k, pass ? "PASS" : "FAIL", line.c_str(), secs);
        std::fflush(stdout);
        all = all && pass;
    }
    return all ? 0 : 1;
}
