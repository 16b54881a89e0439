#pragma once

#include <cmath>
#include <stdexcept>

#include "audit/normal.hpp"

namespace audit {

// Two-sided p recovered from a ratio-scale CI. Values below 0.0001 are
// reported clamped, mirroring the "p < .0001" tabulation convention.
struct PValue {
    double raw = 1.0;
    double clamped = 1.0;
    bool was_clamped = false;
};

constexpr double kPClampFloor = 0.0001;

inline PValue make_pvalue(double raw) {
    PValue p;
    p.raw = raw;
    p.was_clamped = raw < kPClampFloor;
    p.clamped = p.was_clamped ? kPClampFloor : raw;
    return p;
}

// exp(-0.717 z - 0.416 z^2): the Altman-Bland approximation to the two-sided
// normal tail. This expression, not the exact tail, is the contract.
inline double altman_bland_p(double z) {
    if (!(z >= 0.0) || !std::isfinite(z))
        throw std::invalid_argument("altman_bland_p: z must be finite and >= 0");
    double p = std::exp(-0.717 * z - 0.416 * z * z);
    return p > 1.0 ? 1.0 : p;
}

inline double critical_z(double conf_level) {
    if (!(conf_level > 0.0 && conf_level < 1.0))
        throw std::invalid_argument("critical_z: conf_level outside (0,1)");
    // Exactly 1.96 at the 95% level: this is what reproduces the published
    // 4-figure p-values, so 1.959964 would be wrong here.
    if (conf_level == 0.95) return 1.96;
    return std_normal_quantile(0.5 + conf_level / 2.0);
}

inline PValue p_from_ratio_ci(double rr, double lcl, double ucl,
                              double conf_level = 0.95) {
    if (!std::isfinite(rr) || !std::isfinite(lcl) || !std::isfinite(ucl))
        throw std::invalid_argument("p_from_ratio_ci: non-finite input");
    if (rr <= 0.0 || lcl <= 0.0 || ucl <= 0.0)
        throw std::domain_error("p_from_ratio_ci: ratio inputs must be positive");
    if (lcl >= ucl)
        throw std::invalid_argument("p_from_ratio_ci: degenerate interval (lcl >= ucl)");

    double zc = critical_z(conf_level);
    double se = (std::log(ucl) - std::log(lcl)) / (2.0 * zc);
    double z = std::fabs(std::log(rr)) / se;
    return make_pvalue(altman_bland_p(z));
}

} // namespace audit
