#include "gl3v/coefficients.hpp"
#include "gl3v/errors.hpp"
#include "gl3v/rational.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace gl3v;

TEST_CASE("Ramanujan tau") {
    const auto t = ramanujan_tau(1000);
    CHECK(t[1] == 1);
    CHECK(t[2] == -24);
    CHECK(t[3] == 252);
    CHECK(t[6] == -6048);
    // q-expansion of q prod (1 - q^n)^24 in exact integers
    CHECK(t[1000] == BigInt("-30328412970240000"));
    const auto naive = ramanujan_tau_naive(50);
    for (int n = 1; n <= 50; ++n) CHECK(t[n] == naive[n]);
    CHECK_THROWS_AS(ramanujan_tau(100, 50), CapExceededError);
}

TEST_CASE("normalized GL(2) coefficients") {
    const auto a = gl2_normalized(10000);
    CHECK(a[1] == 1.0);
    CHECK(std::abs(a[2] - (-24.0 / std::pow(2.0, 5.5))) < 1e-15);
    CHECK(std::abs(a[2] + 0.530330085889911) < 1e-14);
    double mx = 0.0;
    for (std::int64_t p = 2; p <= 10000; ++p) {
        bool prime = true;
        for (std::int64_t d = 2; d * d <= p; ++d)
            if (p % d == 0) prime = false;
        if (prime) mx = std::max(mx, std::abs(a[p]));
    }
    CHECK(mx <= 2.0);
}

TEST_CASE("symmetric-square coefficients") {
    const std::int64_t N = 1000;
    const auto s = sym2_coefficients(N);
    const auto l = gl2_normalized(N);
    CHECK(s[1] == 1.0);
    CHECK(std::abs(s[2] + 0.71875) < 1e-15);
    // lambda(n)^2 = sum over d m = n with m squarefree of a_{1,d}
    double worst = 0.0;
    for (std::int64_t n = 1; n <= N; ++n) {
        double acc = 0.0;
        for (i64 d : divisors(n))
            if (mobius(n / d) != 0) acc += s[d];
        worst = std::max(worst, std::abs(acc - l[n] * l[n]) / (1.0 + l[n] * l[n]));
    }
    CHECK(worst < 1e-12);
    for (std::int64_t n : {6, 10, 35, 77}) {
        for (i64 d : divisors(n)) {
            if (d == 1 || d == n || gcd(d, n / d) != 1) continue;
            CHECK(std::abs(s[n] - s[d] * s[n / d]) < 1e-12);
        }
    }
}

TEST_CASE("triple divisor function") {
    const auto d = d3_coefficients(100);
    CHECK(d[1] == 1);
    CHECK(d[2] == 3);
    CHECK(d[97] == 3);
    CHECK(d[4] == 6);
    CHECK(d[12] == 18);
}

TEST_CASE("coefficient table and bi-index") {
    const auto t = build_table(FormKind::gl3_sym2, 1000);
    CHECK(t.n_max() == 1000);
    CHECK(t(-2) == t(2));
    CHECK_THROWS_AS(t(1001), TableTooShortError);
    CHECK(bi_index(t, 7, 1) == t(7));
    CHECK(std::abs(bi_index(t, 3, 4) - t(3) * t(4)) < 1e-15);
    CHECK(std::abs(bi_index(t, 2, 2) - (t(2) * t(2) - 1.0)) < 1e-15);
    CHECK(std::abs(bi_index(t, 2, 2) + 0.4833984375) < 1e-15);
    CHECK(FormDescriptor::for_kind(FormKind::gl3_sym2).degree == 3);
    CHECK(form_kind_from_string(to_string(FormKind::gl2_holomorphic)) == FormKind::gl2_holomorphic);
}

TEST_CASE("Rankin-Selberg slopes") {
    const std::vector<double> grid{1e3, 3e3, 1e4, 3e4, 1e5};
    const auto gl2 = build_table(FormKind::gl2_holomorphic, 100000);
    const auto sym2 = build_table(FormKind::gl3_sym2, 100000);
    const auto d3 = build_table(FormKind::gl3_eisenstein_d3, 100000);
    const double s1 = rankin_selberg_slope(gl2, grid), s2 = rankin_selberg_slope(sym2, grid);
    CHECK(s1 >= 0.9);
    CHECK(s1 <= 1.1);
    CHECK(s2 >= 0.9);
    CHECK(s2 <= 1.1);
    const double s3 = rankin_selberg_slope(d3, grid);
    MESSAGE("d3 Rankin-Selberg slope " << s3);
    CHECK(s3 > 1.0);
}

TEST_CASE("cache round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "gl3v_test_cache";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "sym2.bin").string();
    const auto t = build_table(FormKind::gl3_sym2, 10000);
    save_cache(t, path);
    const auto u = load_cache(path);
    CHECK(u.n_max() == t.n_max());
    CHECK(u.values() == t.values());
    CHECK(bi_index(u, 12, 18) == bi_index(t, 12, 18));

    const auto sz = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, sz / 2);
    CHECK_THROWS_AS(load_cache(path), CacheError);

    // A truncated cache is rebuilt and rewritten.
    const auto v = load_or_build(FormKind::gl3_sym2, 10000, path);
    CHECK(v.values() == t.values());
    CHECK(load_cache(path).values() == t.values());
    std::filesystem::remove_all(dir);
}
