#pragma once

#include "gl3v/special_fn_types.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gl3v {

using BigInt = boost::multiprecision::checked_int256_t;

inline constexpr std::int64_t kDefaultCoefficientCap = 10'000'000;

enum class FormKind { gl2_holomorphic, gl3_sym2, gl3_eisenstein_d3, constant_one };

std::string to_string(FormKind k);
FormKind form_kind_from_string(const std::string& s);

struct FormDescriptor {
    FormKind kind = FormKind::gl3_sym2;
    int degree = 3;
    std::optional<EmbeddingParams> embedding;
    int conductor = 1;

    static FormDescriptor for_kind(FormKind k);
};

// First-row coefficients a_{1,n}, n = 1..n_max, for a self-dual form
// (a_{n,1} = a_{1,n}). Immutable after construction.
class CoefficientTable {
public:
    CoefficientTable(FormDescriptor desc, std::vector<double> values);

    const FormDescriptor& descriptor() const { return desc_; }
    std::int64_t n_max() const { return static_cast<std::int64_t>(values_.size()) - 1; }

    // a_{1,|n|}; throws TableTooShortError past n_max.
    double operator()(std::int64_t n) const;
    const std::vector<double>& values() const { return values_; }

private:
    FormDescriptor desc_;
    std::vector<double> values_;  // index 0 unused
};

// tau(1..N) from the weight-12 eta product, exact. Index 0 unused.
std::vector<BigInt> ramanujan_tau(std::int64_t N, std::int64_t cap = kDefaultCoefficientCap);

// Schoolbook q-expansion of q prod (1-q^n)^24; oracle for small N.
std::vector<BigInt> ramanujan_tau_naive(std::int64_t N);

std::vector<double> gl2_normalized(std::int64_t N, std::int64_t cap = kDefaultCoefficientCap);
std::vector<double> sym2_coefficients(std::int64_t N, std::int64_t cap = kDefaultCoefficientCap);
std::vector<std::int64_t> d3_coefficients(std::int64_t N, std::int64_t cap = kDefaultCoefficientCap);

CoefficientTable build_table(FormKind kind, std::int64_t N,
                             std::int64_t cap = kDefaultCoefficientCap);

// a_{n,m} = sum_{d | (n,m)} mu(d) a_{n/d,1} a_{1,m/d}; |n|, |m| are used.
double bi_index(const CoefficientTable& table, std::int64_t n, std::int64_t m);

// Least-squares slope of log sum_{n<=T} a_n^2 against log T.
double rankin_selberg_slope(const CoefficientTable& table, const std::vector<double>& T_grid);

void save_cache(const CoefficientTable& table, const std::string& path);
CoefficientTable load_cache(const std::string& path);

// Returns the cached table at path if it covers N, otherwise builds and
// (when path is non-empty) writes it.
CoefficientTable load_or_build(FormKind kind, std::int64_t N, const std::string& path,
                               std::int64_t cap = kDefaultCoefficientCap);

} // namespace gl3v
