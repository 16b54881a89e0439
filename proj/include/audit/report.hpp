#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "audit/effect_data.hpp"
#include "audit/pooling.hpp"
#include "audit/predictive.hpp"
#include "audit/pvalue.hpp"
#include "audit/pvplot.hpp"
#include "audit/search_space.hpp"

namespace audit {

// Published summary-count row (n, >.05, <=.05, <=.001) for each pollutant.
// Recomputed counts are compared against these; any delta is a reported
// discrepancy, never a reason to adjust the data.
struct CountReference {
    int n, n_gt_05, n_le_05, n_le_001;
};

inline const CountReference* count_reference(const std::string& label) {
    static const std::pair<const char*, CountReference> refs[] = {
        {"CO", {42, 29, 13, 9}},   {"NO2", {66, 30, 36, 16}}, {"O3", {71, 40, 31, 11}},
        {"PM10", {51, 28, 23, 6}}, {"PM2.5", {37, 23, 14, 8}}, {"SO2", {65, 46, 19, 6}},
    };
    for (const auto& [k, v] : refs)
        if (label == k) return &v;
    return nullptr;
}

struct PollutantFixture {
    const char* label;
    const char* file;
    const char* reference_p; // printed p-value listing, if transcribed
};

inline const std::vector<PollutantFixture>& pollutant_fixtures() {
    static const std::vector<PollutantFixture> v = {
        {"CO", "zheng_co.csv", "reference/printed_p_co.csv"},
        {"NO2", "zheng_no2.csv", "reference/printed_p_no2.csv"},
        {"O3", "zheng_o3.csv", "reference/printed_p_o3.csv"},
        {"PM10", "zheng_pm10.csv", "reference/printed_p_pm10.csv"},
        {"PM2.5", "zheng_pm25.csv", "reference/printed_p_pm25.csv"},
        {"SO2", "zheng_so2.csv", "reference/printed_p_so2.csv"},
    };
    return v;
}

namespace detail {

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
}

// printed reference listings: study_id,p_printed
inline std::vector<std::pair<std::string, double>>
parse_printed_p(std::istream& in) {
    std::vector<std::pair<std::string, double>> out;
    std::string line;
    std::getline(in, line); // header
    size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_row(line);
        if (f.size() < 2) throw parse_error("printed-p row " + std::to_string(row));
        out.emplace_back(f[0], parse_double(f[1], "p_printed", row));
    }
    return out;
}

} // namespace detail

struct ReportResult {
    nlohmann::ordered_json json;
    std::vector<std::string> errors;
};

// Runs the full audit over the bundled fixture directory and writes
// report.json plus per-pollutant SVG plots and the predictive curve CSV.
// Deterministic: fixed iteration order, no timestamps, fixed float formatting.
inline ReportResult run_report(const std::filesystem::path& data_dir,
                               const std::filesystem::path& out_dir,
                               double p_match_tolerance = 2e-3) {
    namespace fs = std::filesystem;
    ReportResult result;
    auto& doc = result.json;
    fs::create_directories(out_dir);

    nlohmann::ordered_json pollutants = nlohmann::ordered_json::array();
    nlohmann::ordered_json discrepancies = nlohmann::ordered_json::array();

    for (const auto& fx : pollutant_fixtures()) {
        try {
            std::ifstream in(data_dir / fx.file);
            if (!in) throw std::runtime_error(std::string("missing fixture ") + fx.file);
            auto ds = parse_effect_csv(in, fx.label);
            auto series = build_series(ds);
            auto counts = significance_counts(series);
            auto cls = classify(series);
            auto pooled = pool(ds, PoolMethod::DerSimonianLaird);

            std::string safe_label = fx.label;
            for (auto& ch : safe_label)
                if (ch == '.') ch = '_';
            std::string plot_name = "plot_" + safe_label + ".svg";
            detail::write_file(out_dir / plot_name, render_svg(series));

            nlohmann::ordered_json entry;
            entry["label"] = fx.label;
            entry["n"] = counts.n;
            entry["counts"] = {{"n_gt_05", counts.n_gt_05},
                               {"n_le_05", counts.n_le_05},
                               {"n_le_001", counts.n_le_001}};
            entry["classification"] = {{"verdict", to_string(cls.verdict)},
                                       {"frac_sig", cls.frac_sig},
                                       {"frac_tiny", cls.frac_tiny},
                                       {"frac_null", cls.frac_null},
                                       {"ks_statistic", cls.ks_statistic},
                                       {"ks_pvalue", cls.ks_pvalue}};
            entry["plot"] = plot_name;
            entry["pool_dl"] = {{"rr", pooled.pooled_rr},
                                {"lcl", pooled.ci_lcl},
                                {"ucl", pooled.ci_ucl},
                                {"q", pooled.q_statistic},
                                {"tau_squared", pooled.tau_squared},
                                {"i_squared_pct", pooled.i_squared_pct}};
            if (const auto* ref = pool_reference(fx.label)) {
                entry["pool_dl"]["reference_rr"] = ref->rr;
                entry["pool_dl"]["reference_i_squared_pct"] = ref->i2_pct;
                entry["pool_dl"]["rr_gap"] = std::fabs(pooled.pooled_rr - ref->rr);
            }
            for (const auto& d : ds.diagnostics)
                discrepancies.push_back(std::string(fx.label) + ": " + d);

            if (const auto* ref = count_reference(fx.label)) {
                if (ref->n != counts.n)
                    discrepancies.push_back(std::string(fx.label) + ": record count " +
                                            std::to_string(counts.n) + " differs from published " +
                                            std::to_string(ref->n));
                auto delta = [&](const char* cell, int ours, int theirs) {
                    if (ours != theirs)
                        discrepancies.push_back(std::string(fx.label) + ": computed " + cell +
                                                " = " + std::to_string(ours) +
                                                " vs published " + std::to_string(theirs));
                };
                delta("n_gt_05", counts.n_gt_05, ref->n_gt_05);
                delta("n_le_05", counts.n_le_05, ref->n_le_05);
                delta("n_le_001", counts.n_le_001, ref->n_le_001);
            }

            // row-level comparison against the printed p-value listing
            std::ifstream pin(data_dir / fx.reference_p);
            if (pin) {
                auto printed = detail::parse_printed_p(pin);
                std::map<std::string, double> by_id(printed.begin(), printed.end());
                int checked = 0, matched = 0;
                for (const auto& r : ds.records) {
                    auto it = by_id.find(r.study_id);
                    if (it == by_id.end()) continue;
                    ++checked;
                    double ours = p_from_ratio_ci(r.rr, r.lcl, r.ucl, r.conf_level).clamped;
                    if (std::fabs(ours - it->second) <= p_match_tolerance) ++matched;
                    else
                        discrepancies.push_back(std::string(fx.label) + ": " + r.study_id +
                                                " computed p differs from printed value by more than " +
                                                std::to_string(p_match_tolerance));
                }
                entry["printed_p_checked"] = checked;
                entry["printed_p_matched"] = matched;
            }
            pollutants.push_back(std::move(entry));
        } catch (const std::exception& e) {
            result.errors.push_back(std::string(fx.label) + ": " + e.what());
        }
    }
    doc["pollutants"] = std::move(pollutants);

    try {
        std::ifstream in(data_dir / "table3_searchspace.csv");
        if (!in) throw std::runtime_error("missing table3_searchspace.csv");
        auto recs = parse_searchspace_csv(in);
        std::vector<SearchSpaceResult> spaces;
        for (const auto& r : recs) spaces.push_back(compute_spaces(r));
        nlohmann::ordered_json ss;
        auto put = [&](const char* name, SpaceField f) {
            auto s = summarize_spaces(spaces, f);
            ss[name] = {{"min", s.minimum},     {"q1", s.lower_quartile},
                        {"median", s.median},   {"q3", s.upper_quartile},
                        {"max", s.maximum},     {"mean", s.mean_rounded}};
        };
        put("space1", SpaceField::Space1);
        put("space2", SpaceField::Space2);
        put("space3", SpaceField::Space3);
        ss["n_studies"] = spaces.size();
        auto med = summarize_spaces(spaces, SpaceField::Space3).median;
        ss["expected_false_positives_at_median"] =
            format_expected_fp(expected_false_positives(med, 0.05));
        doc["search_space"] = std::move(ss);
    } catch (const std::exception& e) {
        result.errors.push_back(std::string("search-space: ") + e.what());
    }

    try {
        auto grid = log_spaced_grid(1e-4, 1e-1, 200);
        auto curve = predictive_curve(0.05, 0.2, {0.2, 0.8}, grid);
        std::ostringstream csv;
        csv << "prevalence,bias,ppv,npv\n";
        char buf[128];
        for (const auto& pt : curve) {
            std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g\n", pt.prevalence,
                          pt.bias, pt.ppv, pt.npv);
            csv << buf;
        }
        detail::write_file(out_dir / "predictive_curve.csv", csv.str());
        doc["predictive_curve"] = "predictive_curve.csv";
    } catch (const std::exception& e) {
        result.errors.push_back(std::string("predictive: ") + e.what());
    }

    doc["discrepancies"] = std::move(discrepancies);
    doc["errors"] = result.errors;
    detail::write_file(out_dir / "report.json", doc.dump(2) + "\n");
    return result;
}

} // namespace audit
