#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "audit/pvplot.hpp"
#include "audit/simulate.hpp"

using namespace audit;

TEST_CASE("byte-identical for fixed seed") {
    SimConfig cfg;
    cfg.scenario = SimScenario::PHackedMixture;
    cfg.n_studies = 60;
    cfg.tests_per_study = 50;
    cfg.hacked_fraction = 0.5;
    cfg.seed = 12345;
    auto a = serialize_effect_csv(simulate_dataset(cfg));
    auto b = serialize_effect_csv(simulate_dataset(cfg));
    CHECK(a == b);
    cfg.seed = 12346;
    CHECK(serialize_effect_csv(simulate_dataset(cfg)) != a);
}

TEST_CASE("per-study streams do not depend on neighbours") {
    // dropping the tail of the study list must not change the head records
    SimConfig small;
    small.n_studies = 10;
    small.seed = 99;
    SimConfig big = small;
    big.n_studies = 40;
    auto a = simulate_dataset(small);
    auto b = simulate_dataset(big);
    for (size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].rr == b.records[i].rr);
        CHECK(a.records[i].lcl == b.records[i].lcl);
        CHECK(a.records[i].ucl == b.records[i].ucl);
    }
}

TEST_CASE("emitted records are well-formed") {
    SimConfig cfg;
    cfg.scenario = SimScenario::AllAlternative;
    cfg.true_log_rr = 0.3;
    cfg.n_studies = 200;
    cfg.seed = 5;
    auto ds = simulate_dataset(cfg);
    REQUIRE(ds.records.size() == 200);
    for (const auto& r : ds.records) {
        CHECK(r.lcl < r.rr);
        CHECK(r.rr < r.ucl);
        CHECK(r.lcl > 0.0);
    }
}

TEST_CASE("null p-values are uniform") {
    SimConfig cfg;
    cfg.n_studies = 10000;
    cfg.seed = 2024;
    auto ks = ks_uniformity(build_series(simulate_dataset(cfg)));
    // 1% critical value 1.63/sqrt(n), plus slack for the p-approximation
    CHECK(ks.statistic <= 1.63 / 100.0 + 0.01);
}

TEST_CASE("null significant fraction near 5 percent") {
    SimConfig cfg;
    cfg.n_studies = 2000;
    cfg.seed = 7;
    auto r = false_positive_rate(cfg, 10);
    CHECK(r.n_total == 20000);
    CHECK(std::fabs(r.fraction - 0.05) <= 3.0 * r.mc_standard_error);
}

TEST_CASE("min-of-20 selection inflates the rate to about 64 percent") {
    SimConfig cfg;
    cfg.scenario = SimScenario::PHackedMixture;
    cfg.hacked_fraction = 1.0;
    cfg.tests_per_study = 20;
    cfg.n_studies = 2000;
    cfg.seed = 31;
    auto r = false_positive_rate(cfg, 10);
    double expected = 1.0 - std::pow(0.95, 20);
    CHECK(r.fraction >= 0.6);
    CHECK(std::fabs(r.fraction - expected) <= 3.0 * r.mc_standard_error);
}

TEST_CASE("hacked tiny-p fraction tracks the Beta(1,M) tail") {
    SimConfig cfg;
    cfg.scenario = SimScenario::PHackedMixture;
    cfg.hacked_fraction = 1.0;
    cfg.tests_per_study = 50;
    cfg.n_studies = 2000;
    cfg.seed = 77;
    long long tiny = 0, total = 0;
    for (int rep = 0; rep < 10; ++rep) {
        SimConfig c = cfg;
        c.seed = cfg.seed + rep;
        for (const auto& r : simulate_dataset(c).records) {
            if (p_from_ratio_ci(r.rr, r.lcl, r.ucl).clamped <= 0.001) ++tiny;
            ++total;
        }
    }
    double frac = static_cast<double>(tiny) / total;
    double expected = 1.0 - std::pow(0.999, 50);
    double se = std::sqrt(expected * (1.0 - expected) / total);
    // generous budget: the p-approximation shifts the .001 threshold slightly
    CHECK(std::fabs(frac - expected) <= 3.0 * se + 0.003);
}

TEST_CASE("selection from a single test is no selection") {
    SimConfig null_cfg;
    null_cfg.n_studies = 5000;
    null_cfg.seed = 400;
    SimConfig m1 = null_cfg;
    m1.scenario = SimScenario::PHackedMixture;
    m1.hacked_fraction = 1.0;
    m1.tests_per_study = 1;
    auto a = false_positive_rate(null_cfg, 4);
    auto b = false_positive_rate(m1, 4);
    CHECK(std::fabs(a.fraction - b.fraction) <=
          3.0 * std::sqrt(a.mc_standard_error * a.mc_standard_error +
                          b.mc_standard_error * b.mc_standard_error));
}

TEST_CASE("config validation") {
    SimConfig cfg;
    cfg.n_studies = 3;
    CHECK_THROWS_AS(simulate_dataset(cfg), std::invalid_argument);
    cfg.n_studies = 10;
    cfg.se_lo = 0.2;
    cfg.se_hi = 0.1;
    CHECK_THROWS_AS(simulate_dataset(cfg), std::invalid_argument);
    SimConfig alt;
    alt.scenario = SimScenario::AllAlternative;
    CHECK_THROWS_AS(false_positive_rate(alt, 2), std::invalid_argument);
}
