#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "audit/effect_data.hpp"
#include "audit/normal.hpp"
#include "audit/pvalue.hpp"

namespace audit {

enum class SimScenario { AllNull, AllAlternative, PHackedMixture };

struct SimConfig {
    SimScenario scenario = SimScenario::AllNull;
    int n_studies = 40;
    int tests_per_study = 1;    // M, the null-test pool a hacked study selects from
    double hacked_fraction = 0.0;
    double true_log_rr = 0.0;   // delta; forced to 0 under AllNull
    double se_lo = 0.01;        // log-scale per-study SE range, spanning the
    double se_hi = 0.15;        // CI widths seen in the audited tables
    uint64_t seed = 0;

    void validate() const {
        if (n_studies < 5) throw std::invalid_argument("n_studies must be >= 5");
        if (tests_per_study < 1) throw std::invalid_argument("tests_per_study must be >= 1");
        if (!(hacked_fraction >= 0.0 && hacked_fraction <= 1.0))
            throw std::invalid_argument("hacked_fraction outside [0,1]");
        if (!(se_lo > 0.0 && se_lo <= se_hi))
            throw std::invalid_argument("se range invalid");
    }
};

namespace detail {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent stream per (seed, study index): study results do not depend on
// generation order, which keeps parallel fan-out byte-identical.
struct StudyRng {
    uint64_t state;
    StudyRng(uint64_t seed, uint64_t index) {
        uint64_t s = seed;
        uint64_t a = splitmix64(s);
        s = seed ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
        state = a ^ splitmix64(s);
    }
    double uniform() {
        // (0,1) strictly: 53-bit mantissa offset by half an ulp
        return (static_cast<double>(splitmix64(state) >> 11) + 0.5) * 0x1.0p-53;
    }
    double normal() { return std_normal_quantile(uniform()); }
};

} // namespace detail

inline PollutantDataset simulate_dataset(const SimConfig& cfg) {
    cfg.validate();
    double delta = cfg.scenario == SimScenario::AllNull ? 0.0 : cfg.true_log_rr;
    int n_hacked = 0;
    if (cfg.scenario == SimScenario::PHackedMixture)
        n_hacked = static_cast<int>(std::lround(cfg.hacked_fraction * cfg.n_studies));

    PollutantDataset ds;
    ds.label = cfg.scenario == SimScenario::AllNull            ? "sim-null"
               : cfg.scenario == SimScenario::AllAlternative   ? "sim-alt"
                                                               : "sim-phacked";
    ds.records.reserve(static_cast<size_t>(cfg.n_studies));
    for (int i = 0; i < cfg.n_studies; ++i) {
        detail::StudyRng rng(cfg.seed, static_cast<uint64_t>(i));
        double se = cfg.se_lo + (cfg.se_hi - cfg.se_lo) * rng.uniform();
        double est;
        if (i < n_hacked) {
            // min-p selection: M independent null tests, report the extreme one
            est = 0.0;
            for (int t = 0; t < cfg.tests_per_study; ++t) {
                double e = se * rng.normal();
                if (std::fabs(e) > std::fabs(est)) est = e;
            }
        } else {
            est = delta + se * rng.normal();
        }
        EffectRecord r;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "sim_%04d", i + 1);
        r.study_id = buf;
        r.first_author = "sim";
        r.pub_year = 2000;
        r.rr = std::exp(est);
        r.lcl = std::exp(est - 1.96 * se);
        r.ucl = std::exp(est + 1.96 * se);
        ds.records.push_back(std::move(r));
    }
    return ds;
}

struct FalsePositiveRate {
    double fraction = 0.0;
    double mc_standard_error = 0.0;
    long long n_significant = 0;
    long long n_total = 0;
};

inline FalsePositiveRate false_positive_rate(const SimConfig& cfg, int replicates) {
    if (cfg.scenario == SimScenario::AllAlternative)
        throw std::invalid_argument("false_positive_rate: null or p-hacked scenarios only");
    if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    FalsePositiveRate out;
    for (int rep = 0; rep < replicates; ++rep) {
        SimConfig c = cfg;
        c.seed = cfg.seed + static_cast<uint64_t>(rep);
        auto ds = simulate_dataset(c);
        for (const auto& r : ds.records) {
            auto p = p_from_ratio_ci(r.rr, r.lcl, r.ucl);
            if (p.clamped <= 0.05) ++out.n_significant;
            ++out.n_total;
        }
    }
    out.fraction = static_cast<double>(out.n_significant) / static_cast<double>(out.n_total);
    out.mc_standard_error =
        std::sqrt(out.fraction * (1.0 - out.fraction) / static_cast<double>(out.n_total));
    return out;
}

} // namespace audit
