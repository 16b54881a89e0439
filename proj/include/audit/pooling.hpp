#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "audit/effect_data.hpp"

namespace audit {

enum class PoolMethod { FixedEffect, DerSimonianLaird };

struct PoolResult {
    PoolMethod method = PoolMethod::FixedEffect;
    double pooled_log_rr = 0.0;
    double pooled_se = 0.0;
    double pooled_rr = 1.0;
    double ci_lcl = 1.0;
    double ci_ucl = 1.0;
    double q_statistic = 0.0;
    double tau_squared = 0.0;
    double i_squared_pct = 0.0;
    int n_studies = 0;
};

inline double i_squared(double q, int df) {
    if (df < 1) throw std::invalid_argument("i_squared: df must be >= 1");
    if (q < 0.0) throw std::invalid_argument("i_squared: q must be >= 0");
    if (q == 0.0) return 0.0;
    double v = (q - df) / q * 100.0;
    return v > 0.0 ? v : 0.0;
}

inline PoolResult pool(const PollutantDataset& ds, PoolMethod method) {
    size_t n = ds.records.size();
    if (n < 2) throw std::invalid_argument("pool: need at least 2 studies");

    std::vector<double> logs(n), vars(n);
    for (size_t i = 0; i < n; ++i) {
        const auto& r = ds.records[i];
        if (r.rr <= 0.0 || r.lcl <= 0.0 || r.ucl <= 0.0 || r.lcl >= r.ucl)
            throw std::invalid_argument("pool: degenerate record " + r.study_id);
        double se = (std::log(r.ucl) - std::log(r.lcl)) / (2.0 * 1.96);
        logs[i] = std::log(r.rr);
        vars[i] = se * se;
    }

    double sw = 0.0, swx = 0.0, sw2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double w = 1.0 / vars[i];
        sw += w;
        sw2 += w * w;
        swx += w * logs[i];
    }
    double mu_fe = swx / sw;
    double q = 0.0;
    for (size_t i = 0; i < n; ++i)
        q += (logs[i] - mu_fe) * (logs[i] - mu_fe) / vars[i];
    int df = static_cast<int>(n) - 1;

    PoolResult r;
    r.method = method;
    r.n_studies = static_cast<int>(n);
    r.q_statistic = q;
    r.i_squared_pct = i_squared(q, df);
    r.tau_squared = std::max(0.0, (q - df) / (sw - sw2 / sw));

    if (method == PoolMethod::FixedEffect) {
        r.pooled_log_rr = mu_fe;
        r.pooled_se = std::sqrt(1.0 / sw);
    } else {
        double t2 = r.tau_squared;
        double swd = 0.0, swdx = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double w = 1.0 / (vars[i] + t2);
            swd += w;
            swdx += w * logs[i];
        }
        r.pooled_log_rr = swdx / swd;
        r.pooled_se = std::sqrt(1.0 / swd);
    }
    r.pooled_rr = std::exp(r.pooled_log_rr);
    r.ci_lcl = std::exp(r.pooled_log_rr - 1.96 * r.pooled_se);
    r.ci_ucl = std::exp(r.pooled_log_rr + 1.96 * r.pooled_se);
    return r;
}

// Published pooled results to compare against. A soft check only: the source
// meta-analysis rescaled per-study effects to a common increment with details
// that are not recoverable, so exact agreement is not expected.
struct PoolReference {
    double rr, lcl, ucl, i2_pct;
};

inline const PoolReference* pool_reference(const std::string& label) {
    static const std::pair<const char*, PoolReference> refs[] = {
        {"CO", {1.045, 1.029, 1.061, 85.7}},  {"NO2", {1.018, 1.014, 1.022, 87.6}},
        {"O3", {1.009, 1.006, 1.011, 87.8}},  {"PM10", {1.010, 1.008, 1.013, 69.1}},
        {"PM2.5", {1.023, 1.015, 1.031, 82.8}}, {"SO2", {1.011, 1.007, 1.015, 77.1}},
    };
    for (const auto& [k, v] : refs)
        if (label == k) return &v;
    return nullptr;
}

} // namespace audit
