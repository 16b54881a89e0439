#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace audit {

// (alpha, beta, P, u): error rates, prevalence of true relationships, and the
// proportion u of probed analyses reported as findings through bias.
struct PredictiveParams {
    double alpha = 0.05;
    double beta = 0.2;
    double prevalence = 0.1;
    double bias = 0.0;
    double c = 1.0; // number of relationships probed; PPV/NPV do not depend on it

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha outside (0,1)");
        if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta outside (0,1)");
        if (!(prevalence > 0.0 && prevalence < 1.0))
            throw std::invalid_argument("prevalence outside (0,1)");
        if (!(bias >= 0.0 && bias < 1.0)) throw std::invalid_argument("bias outside [0,1)");
        if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
    }
};

struct ContingencyCounts {
    double tp = 0.0;
    double fn = 0.0;
    double tn = 0.0;
    double fp = 0.0;
};

// Bias u moves a u-fraction of would-be negatives (both true and false)
// into the reported-positive cells.
inline ContingencyCounts contingency_with_bias(const PredictiveParams& p) {
    p.validate();
    double P = p.prevalence, u = p.bias, c = p.c;
    ContingencyCounts k;
    k.tp = c * (1.0 - p.beta) * P + u * c * p.beta * P;
    k.fn = c * p.beta * P * (1.0 - u);
    k.tn = c * (1.0 - p.alpha) * (1.0 - P) * (1.0 - u);
    k.fp = c * p.alpha * (1.0 - P) + u * c * (1.0 - p.alpha) * (1.0 - P);
    return k;
}

inline double ppv(const PredictiveParams& p) {
    auto k = contingency_with_bias(p);
    return k.tp / (k.tp + k.fp);
}

inline double npv(const PredictiveParams& p) {
    p.validate();
    if (p.bias >= 1.0)
        throw std::domain_error("npv: u = 1 gives 0/0");
    auto k = contingency_with_bias(p);
    return k.tn / (k.tn + k.fn);
}

struct PredictivePoint {
    double prevalence;
    double bias;
    double ppv;
    double npv;
};

inline std::vector<double> log_spaced_grid(double lo, double hi, int n_points) {
    if (!(lo > 0.0 && hi > lo) || n_points < 1)
        throw std::invalid_argument("log_spaced_grid: bad range");
    std::vector<double> g;
    g.reserve(static_cast<size_t>(n_points));
    if (n_points == 1) { g.push_back(lo); return g; }
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n_points; ++i)
        g.push_back(std::exp(llo + (lhi - llo) * i / (n_points - 1)));
    return g;
}

inline std::vector<PredictivePoint> predictive_curve(double alpha, double beta,
                                                     const std::vector<double>& bias_levels,
                                                     const std::vector<double>& prevalence_grid) {
    if (prevalence_grid.empty() || bias_levels.empty())
        throw std::invalid_argument("predictive_curve: empty grid");
    std::vector<PredictivePoint> out;
    out.reserve(prevalence_grid.size() * bias_levels.size());
    for (double P : prevalence_grid) {
        for (double u : bias_levels) {
            PredictiveParams p{alpha, beta, P, u, 1.0};
            out.push_back({P, u, ppv(p), npv(p)});
        }
    }
    return out;
}

} // namespace audit
