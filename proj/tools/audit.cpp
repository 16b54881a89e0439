#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "audit/effect_data.hpp"
#include "audit/pooling.hpp"
#include "audit/predictive.hpp"
#include "audit/pvalue.hpp"
#include "audit/pvplot.hpp"
#include "audit/report.hpp"
#include "audit/search_space.hpp"
#include "audit/simulate.hpp"

namespace {

audit::PollutantDataset load_effects(const std::string& path, const std::string& label) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    auto ds = audit::parse_effect_csv(in, label.empty() ? path : label);
    for (const auto& d : ds.diagnostics)
        std::cerr << "warning: " << ds.label << ": " << d << "\n";
    return ds;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

// key=value lines, one threshold per line
audit::ClassifierThresholds load_thresholds(const std::string& path) {
    audit::ClassifierThresholds t;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open thresholds file " + path);
    std::string line;
    while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos || line.empty() || line[0] == '#') continue;
        std::string key = line.substr(0, eq);
        double val = std::stod(line.substr(eq + 1));
        if (key == "mostly_sig") t.mostly_sig = val;
        else if (key == "uniform") t.uniform = val;
        else if (key == "blade_tiny") t.blade_tiny = val;
        else if (key == "blade_sig") t.blade_sig = val;
        else if (key == "shaft_null") t.shaft_null = val;
        else throw std::runtime_error("unknown threshold key '" + key + "'");
    }
    return t;
}

nlohmann::ordered_json pool_json(const audit::PoolResult& r, const std::string& label) {
    nlohmann::ordered_json j;
    j["method"] = r.method == audit::PoolMethod::FixedEffect ? "fixed" : "dl";
    j["n_studies"] = r.n_studies;
    j["pooled_rr"] = r.pooled_rr;
    j["ci95"] = {r.ci_lcl, r.ci_ucl};
    j["pooled_log_rr"] = r.pooled_log_rr;
    j["pooled_se"] = r.pooled_se;
    j["q_statistic"] = r.q_statistic;
    j["tau_squared"] = r.tau_squared;
    j["i_squared_pct"] = r.i_squared_pct;
    if (const auto* ref = audit::pool_reference(label)) {
        j["reference"] = {{"rr", ref->rr},
                          {"ci95", {ref->lcl, ref->ucl}},
                          {"i_squared_pct", ref->i2_pct}};
        j["reference_rr_gap"] = std::fabs(r.pooled_rr - ref->rr);
        j["reference_i_squared_gap"] = std::fabs(r.i_squared_pct - ref->i2_pct);
    }
    return j;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"meta-analysis reliability audit toolkit"};
    app.require_subcommand(1);

    std::string input, output, label, format = "svg", method = "dl", scenario = "null";
    std::string thresholds_path, data_dir, out_dir, bias_list = "0.2,0.8";
    std::string grid_spec = "1e-4:1e-1:200";
    double fp_rate = 0.05, alpha = 0.05, power = 0.8;
    double hacked_frac = 0.5, delta = 0.0, se_lo = 0.01, se_hi = 0.15;
    int n_studies = 40, tests = 50;
    uint64_t seed = 42;

    auto* convert = app.add_subcommand("convert", "CI -> p-value CSV");
    convert->add_option("--input", input)->required();
    convert->add_option("--label", label);
    convert->add_option("--output", output)->required();

    auto* plot = app.add_subcommand("plot", "rank-ordered p-value plot");
    plot->add_option("--input", input)->required();
    plot->add_option("--format", format)->check(CLI::IsMember({"svg", "csv"}));
    plot->add_option("--out", output)->required();
    plot->add_option("--label", label);

    auto* classify_cmd = app.add_subcommand("classify", "classify plot shape");
    classify_cmd->add_option("--input", input)->required();
    classify_cmd->add_option("--thresholds", thresholds_path);
    classify_cmd->add_option("--label", label);

    auto* counts_cmd = app.add_subcommand("counts", "significance counts");
    counts_cmd->add_option("--input", input)->required();
    counts_cmd->add_option("--label", label);

    auto* space = app.add_subcommand("space", "analysis search spaces");
    space->add_option("--input", input)->required();
    space->add_option("--fp-rate", fp_rate);

    auto* predict = app.add_subcommand("predict", "bias-adjusted PPV/NPV curve");
    predict->add_option("--alpha", alpha);
    predict->add_option("--power", power);
    predict->add_option("--bias", bias_list);
    predict->add_option("--grid", grid_spec);
    predict->add_option("--out", output)->required();

    auto* pool_cmd = app.add_subcommand("pool", "pooled effect with heterogeneity");
    pool_cmd->add_option("--input", input)->required();
    pool_cmd->add_option("--method", method)->check(CLI::IsMember({"dl", "fixed"}));
    pool_cmd->add_option("--label", label);

    auto* sim = app.add_subcommand("simulate", "synthetic meta-analysis dataset");
    sim->add_option("--scenario", scenario)->check(CLI::IsMember({"null", "alt", "phacked"}));
    sim->add_option("--n", n_studies);
    sim->add_option("--tests", tests);
    sim->add_option("--hacked-frac", hacked_frac);
    sim->add_option("--delta", delta);
    sim->add_option("--se-lo", se_lo);
    sim->add_option("--se-hi", se_hi);
    sim->add_option("--seed", seed);
    sim->add_option("--out", output)->required();

    auto* report_cmd = app.add_subcommand("report", "full audit over a fixture directory");
    report_cmd->add_option("--data", data_dir)->required();
    report_cmd->add_option("--out", out_dir)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (convert->parsed()) {
            auto ds = load_effects(input, label);
            std::ostringstream csv;
            csv << "study_id,first_author,pub_year,subgroup,p_raw,p_clamped,was_clamped\n";
            char buf[64];
            for (const auto& r : ds.records) {
                auto p = audit::p_from_ratio_ci(r.rr, r.lcl, r.ucl, r.conf_level);
                std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%d\n", p.raw, p.clamped,
                              p.was_clamped ? 1 : 0);
                csv << audit::detail::csv_escape(r.study_id) << ','
                    << audit::detail::csv_escape(r.first_author) << ',' << r.pub_year << ','
                    << audit::detail::csv_escape(r.subgroup) << ',' << buf;
            }
            write_text(output, csv.str());
        } else if (plot->parsed()) {
            auto series = audit::build_series(load_effects(input, label));
            write_text(output, format == "svg" ? audit::render_svg(series)
                                               : audit::render_csv(series));
        } else if (classify_cmd->parsed()) {
            auto series = audit::build_series(load_effects(input, label));
            audit::ClassifierThresholds t;
            if (!thresholds_path.empty()) t = load_thresholds(thresholds_path);
            auto c = audit::classify(series, t);
            nlohmann::ordered_json j;
            j["verdict"] = audit::to_string(c.verdict);
            j["frac_sig"] = c.frac_sig;
            j["frac_tiny"] = c.frac_tiny;
            j["frac_null"] = c.frac_null;
            j["ks_statistic"] = c.ks_statistic;
            j["ks_pvalue"] = c.ks_pvalue;
            std::cout << j.dump(2) << "\n";
        } else if (counts_cmd->parsed()) {
            auto ds = load_effects(input, label);
            auto c = audit::significance_counts(audit::build_series(ds));
            double pct = 100.0 * c.n_gt_05 / c.n;
            std::printf("%s\tn=%d\t>.05: %d (%.0f%%)\t<=.05: %d\t<=.001: %d\n",
                        ds.label.c_str(), c.n, c.n_gt_05, pct, c.n_le_05, c.n_le_001);
        } else if (space->parsed()) {
            std::ifstream in(input);
            if (!in) throw std::runtime_error("cannot open " + input);
            auto recs = audit::parse_searchspace_csv(in);
            std::vector<audit::SearchSpaceResult> results;
            std::cout << "study_id,space1,space2,space3,expected_fp\n";
            for (const auto& r : recs) {
                auto s = audit::compute_spaces(r);
                std::cout << audit::detail::csv_escape(s.study_id) << ',' << s.space1 << ','
                          << s.space2 << ',' << s.space3 << ','
                          << audit::format_expected_fp(
                                 audit::expected_false_positives(s.space3, fp_rate))
                          << "\n";
                results.push_back(s);
            }
            auto dump = [&](const char* name, audit::SpaceField f) {
                auto s = audit::summarize_spaces(results, f);
                std::printf("# %s: min %lld, q1 %lld, median %lld, q3 %lld, max %lld, mean %lld\n",
                            name, s.minimum, s.lower_quartile, s.median, s.upper_quartile,
                            s.maximum, s.mean_rounded);
            };
            dump("space1", audit::SpaceField::Space1);
            dump("space2", audit::SpaceField::Space2);
            dump("space3", audit::SpaceField::Space3);
        } else if (predict->parsed()) {
            auto bias = parse_list(bias_list);
            double lo = 1e-4, hi = 1e-1;
            int n_points = 200;
            {
                std::stringstream ss(grid_spec);
                std::string a, b, c;
                std::getline(ss, a, ':');
                std::getline(ss, b, ':');
                std::getline(ss, c, ':');
                if (!a.empty()) lo = std::stod(a);
                if (!b.empty()) hi = std::stod(b);
                if (!c.empty()) n_points = std::stoi(c);
            }
            auto curve = audit::predictive_curve(alpha, 1.0 - power, bias,
                                                 audit::log_spaced_grid(lo, hi, n_points));
            std::ostringstream csv;
            csv << "prevalence,bias,ppv,npv\n";
            char buf[128];
            for (const auto& pt : curve) {
                std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g\n", pt.prevalence,
                              pt.bias, pt.ppv, pt.npv);
                csv << buf;
            }
            write_text(output, csv.str());
        } else if (pool_cmd->parsed()) {
            auto ds = load_effects(input, label);
            auto r = audit::pool(ds, method == "fixed" ? audit::PoolMethod::FixedEffect
                                                       : audit::PoolMethod::DerSimonianLaird);
            std::cout << pool_json(r, ds.label).dump(2) << "\n";
        } else if (sim->parsed()) {
            audit::SimConfig cfg;
            cfg.scenario = scenario == "null"  ? audit::SimScenario::AllNull
                           : scenario == "alt" ? audit::SimScenario::AllAlternative
                                               : audit::SimScenario::PHackedMixture;
            cfg.n_studies = n_studies;
            cfg.tests_per_study = tests;
            cfg.hacked_fraction = cfg.scenario == audit::SimScenario::PHackedMixture
                                      ? hacked_frac : 0.0;
            cfg.true_log_rr = delta;
            cfg.se_lo = se_lo;
            cfg.se_hi = se_hi;
            cfg.seed = seed;
            write_text(output, audit::serialize_effect_csv(audit::simulate_dataset(cfg)));
        } else if (report_cmd->parsed()) {
            auto res = audit::run_report(data_dir, out_dir);
            for (const auto& e : res.errors) std::cerr << "error: " << e << "\n";
            std::cout << (std::filesystem::path(out_dir) / "report.json").string() << "\n";
            return res.errors.empty() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
