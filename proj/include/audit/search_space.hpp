#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "audit/effect_data.hpp"

namespace audit {

struct SearchSpaceResult {
    std::string study_id;
    long long space1 = 1; // outcomes * predictors * models * lags
    long long space2 = 1; // 2^covariates
    long long space3 = 1; // space1 * space2
};

struct SearchSpaceSummary {
    long long minimum = 0;
    long long lower_quartile = 0;
    long long median = 0;
    long long upper_quartile = 0;
    long long maximum = 0;
    double mean = 0.0;
    long long mean_rounded = 0;
};

namespace detail {

inline long long checked_mul(long long a, long long b) {
    long long r;
    if (__builtin_mul_overflow(a, b, &r))
        throw std::overflow_error("search space product overflows 64-bit");
    return r;
}

} // namespace detail

inline SearchSpaceResult compute_spaces(const SearchSpaceRecord& rec) {
    if (rec.covariates > 62)
        throw std::overflow_error("covariates > 62 overflows 2^k");
    SearchSpaceResult r;
    r.study_id = rec.study_id;
    r.space1 = detail::checked_mul(
        detail::checked_mul(rec.outcomes, rec.predictors),
        detail::checked_mul(rec.models, rec.lags));
    r.space2 = 1LL << rec.covariates;
    r.space3 = detail::checked_mul(r.space1, r.space2);
    return r;
}

// Tukey inclusive hinges: quartiles are medians of the lower and upper
// halves, both halves containing the overall median when n is odd.
inline SearchSpaceSummary summarize_values(std::vector<long long> v) {
    if (v.empty()) throw std::invalid_argument("summarize_values: empty input");
    std::sort(v.begin(), v.end());
    size_t n = v.size();

    auto median_of = [](const long long* lo, size_t m) {
        return m % 2 ? static_cast<double>(lo[m / 2])
                     : (static_cast<double>(lo[m / 2 - 1]) + static_cast<double>(lo[m / 2])) / 2.0;
    };

    size_t half = n % 2 ? n / 2 + 1 : n / 2;
    SearchSpaceSummary s;
    s.minimum = v.front();
    s.maximum = v.back();
    s.median = static_cast<long long>(median_of(v.data(), n));
    s.lower_quartile = static_cast<long long>(median_of(v.data(), half));
    s.upper_quartile = static_cast<long long>(median_of(v.data() + (n - half), half));
    double sum = 0.0;
    for (long long x : v) sum += static_cast<double>(x);
    s.mean = sum / static_cast<double>(n);
    s.mean_rounded = static_cast<long long>(std::llround(s.mean));
    return s;
}

enum class SpaceField { Space1, Space2, Space3 };

inline SearchSpaceSummary summarize_spaces(const std::vector<SearchSpaceResult>& results,
                                           SpaceField field) {
    std::vector<long long> v;
    v.reserve(results.size());
    for (const auto& r : results)
        v.push_back(field == SpaceField::Space1   ? r.space1
                    : field == SpaceField::Space2 ? r.space2
                                                  : r.space3);
    return summarize_values(std::move(v));
}

inline double expected_false_positives(long long space3, double rate = 0.05) {
    if (space3 < 1) throw std::invalid_argument("space3 must be >= 1");
    if (!(rate > 0.0 && rate < 1.0)) throw std::invalid_argument("rate outside (0,1)");
    return static_cast<double>(space3) * rate;
}

// Correlated tests make the product only a lower bound, hence ">= floor".
inline std::string format_expected_fp(double value) {
    return ">= " + std::to_string(static_cast<long long>(std::floor(value)));
}

} // namespace audit
