#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "audit/effect_data.hpp"
#include "audit/pvalue.hpp"

namespace audit {

struct SeriesEntry {
    int rank = 0;
    double p_raw = 1.0;
    double p_clamped = 1.0;
    std::string study_id;
};

struct PValueSeries {
    std::string source_label;
    std::vector<SeriesEntry> entries;
};

struct SignificanceCounts {
    int n = 0;
    int n_gt_05 = 0;
    int n_le_05 = 0;
    int n_le_001 = 0;
};

enum class PlotVerdict { Uniform45, MostlySignificant, BilinearMixture, Indeterminate };

inline const char* to_string(PlotVerdict v) {
    switch (v) {
        case PlotVerdict::Uniform45: return "Uniform45";
        case PlotVerdict::MostlySignificant: return "MostlySignificant";
        case PlotVerdict::BilinearMixture: return "BilinearMixture";
        default: return "Indeterminate";
    }
}

struct PlotClassification {
    PlotVerdict verdict = PlotVerdict::Indeterminate;
    double frac_sig = 0.0;
    double frac_tiny = 0.0;
    double frac_null = 0.0;
    double ks_statistic = 0.0;
    double ks_pvalue = 0.0;
};

// Quantitative stand-in for the visual plot-shape reading. A bilinear
// (hockey-stick) call needs both a blade of clearly significant results and a
// shaft of null-consistent ones; the blade condition accepts either a tiny-p
// spike or a substantial significant fraction, since min-p selection over a
// finite pool produces many p-values in (.001, .05].
struct ClassifierThresholds {
    double mostly_sig = 0.8;  // frac_sig >= this: MostlySignificant
    double uniform = 0.1;     // frac_sig <= this: Uniform45
    double blade_tiny = 0.05; // frac_tiny >= this counts as a blade
    double blade_sig = 0.2;   // ... or frac_sig >= this
    double shaft_null = 0.3;  // frac_null >= this: a real shaft
};

inline PValueSeries build_series(const PollutantDataset& ds) {
    if (ds.records.empty())
        throw std::invalid_argument("build_series: empty dataset");
    PValueSeries s;
    s.source_label = ds.label;
    for (const auto& r : ds.records) {
        PValue p;
        try {
            p = p_from_ratio_ci(r.rr, r.lcl, r.ucl, r.conf_level);
        } catch (const std::exception& e) {
            throw std::runtime_error("build_series: " + r.study_id + ": " + e.what());
        }
        SeriesEntry e;
        e.p_raw = p.raw;
        e.p_clamped = p.clamped;
        e.study_id = r.study_id;
        s.entries.push_back(std::move(e));
    }
    std::sort(s.entries.begin(), s.entries.end(), [](const SeriesEntry& a, const SeriesEntry& b) {
        if (a.p_raw != b.p_raw) return a.p_raw < b.p_raw;
        return a.study_id < b.study_id;
    });
    for (size_t i = 0; i < s.entries.size(); ++i)
        s.entries[i].rank = static_cast<int>(i) + 1;
    return s;
}

inline SignificanceCounts significance_counts(const PValueSeries& s) {
    if (s.entries.empty())
        throw std::invalid_argument("significance_counts: empty series");
    SignificanceCounts c;
    c.n = static_cast<int>(s.entries.size());
    for (const auto& e : s.entries) {
        if (e.p_clamped <= 0.05) ++c.n_le_05; else ++c.n_gt_05;
        if (e.p_clamped <= 0.001) ++c.n_le_001;
    }
    return c;
}

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// One-sample KS against Uniform(0,1) on the raw (untruncated) p-values.
// Asymptotic p from the Kolmogorov series with the Stephens small-sample
// correction to the argument.
inline KsResult ks_uniformity(const PValueSeries& s) {
    size_t n = s.entries.size();
    if (n < 5)
        throw std::invalid_argument("ks_uniformity: need at least 5 entries");
    std::vector<double> x;
    x.reserve(n);
    for (const auto& e : s.entries) x.push_back(e.p_raw);
    std::sort(x.begin(), x.end());

    double d = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double cdf = std::min(std::max(x[i], 0.0), 1.0);
        d = std::max(d, (i + 1.0) / n - cdf);
        d = std::max(d, cdf - static_cast<double>(i) / n);
    }
    double sn = std::sqrt(static_cast<double>(n));
    double lambda = (sn + 0.12 + 0.11 / sn) * d;
    double q = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
        q += (k % 2 ? term : -term);
        if (term < 1e-16) break;
    }
    KsResult r;
    r.statistic = d;
    r.p_value = std::min(std::max(q, 0.0), 1.0);
    return r;
}

inline PlotClassification classify(const PValueSeries& s,
                                   const ClassifierThresholds& t = {}) {
    auto c = significance_counts(s);
    if (c.n < 5)
        throw std::invalid_argument("classify: need at least 5 entries");
    PlotClassification out;
    out.frac_sig = static_cast<double>(c.n_le_05) / c.n;
    out.frac_tiny = static_cast<double>(c.n_le_001) / c.n;
    out.frac_null = 1.0 - out.frac_sig;
    auto ks = ks_uniformity(s);
    out.ks_statistic = ks.statistic;
    out.ks_pvalue = ks.p_value;

    if (out.frac_sig >= t.mostly_sig)
        out.verdict = PlotVerdict::MostlySignificant;
    else if (out.frac_sig <= t.uniform)
        out.verdict = PlotVerdict::Uniform45;
    else if ((out.frac_tiny >= t.blade_tiny || out.frac_sig >= t.blade_sig) &&
             out.frac_null >= t.shaft_null)
        out.verdict = PlotVerdict::BilinearMixture;
    else
        out.verdict = PlotVerdict::Indeterminate;
    return out;
}

struct PlotOptions {
    int width = 640;
    int height = 480;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string fmt_p(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace detail

// Rank on x, clamped p on y, with the .05 line and the 45-degree diagonal
// y = rank/n. Output is plain SVG with no external assets and no timestamps,
// so identical input always gives identical bytes.
inline std::string render_svg(const PValueSeries& s, const PlotOptions& opt = {}) {
    if (s.entries.empty())
        throw std::invalid_argument("render_svg: empty series");
    int n = static_cast<int>(s.entries.size());
    double ml = 50, mr = 15, mt = 30, mb = 40;
    double pw = opt.width - ml - mr, ph = opt.height - mt - mb;
    auto xpos = [&](double rank) { return ml + pw * (rank - 0.5) / n; };
    auto ypos = [&](double p) { return mt + ph * (1.0 - p); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width
        << "\" height=\"" << opt.height << "\" viewBox=\"0 0 " << opt.width << ' '
        << opt.height << "\">\n";
    svg << "<rect width=\"" << opt.width << "\" height=\"" << opt.height
        << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << detail::fmt(ml) << "\" y=\"20\" font-family=\"sans-serif\" "
           "font-size=\"14\">" << s.source_label << " (n=" << n << ")</text>\n";
    // axes
    svg << "<line x1=\"" << detail::fmt(ml) << "\" y1=\"" << detail::fmt(mt) << "\" x2=\""
        << detail::fmt(ml) << "\" y2=\"" << detail::fmt(mt + ph)
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << detail::fmt(ml) << "\" y1=\"" << detail::fmt(mt + ph)
        << "\" x2=\"" << detail::fmt(ml + pw) << "\" y2=\"" << detail::fmt(mt + ph)
        << "\" stroke=\"black\"/>\n";
    // reference: p = .05
    svg << "<line x1=\"" << detail::fmt(ml) << "\" y1=\"" << detail::fmt(ypos(0.05))
        << "\" x2=\"" << detail::fmt(ml + pw) << "\" y2=\"" << detail::fmt(ypos(0.05))
        << "\" stroke=\"red\" stroke-dasharray=\"4 3\"/>\n";
    // reference: 45-degree diagonal y = rank/n
    svg << "<line x1=\"" << detail::fmt(xpos(1)) << "\" y1=\"" << detail::fmt(ypos(1.0 / n))
        << "\" x2=\"" << detail::fmt(xpos(n)) << "\" y2=\"" << detail::fmt(ypos(1.0))
        << "\" stroke=\"gray\" stroke-dasharray=\"2 3\"/>\n";
    for (const auto& e : s.entries)
        svg << "<circle cx=\"" << detail::fmt(xpos(e.rank)) << "\" cy=\""
            << detail::fmt(ypos(e.p_clamped)) << "\" r=\"3\" fill=\"steelblue\"/>\n";
    svg << "<text x=\"" << detail::fmt(ml + pw / 2 - 15) << "\" y=\""
        << detail::fmt(mt + ph + 30) << "\" font-family=\"sans-serif\" font-size=\"12\">"
           "rank</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

inline std::string render_csv(const PValueSeries& s) {
    std::ostringstream out;
    out << "rank,p_raw,p_clamped,study_id\n";
    for (const auto& e : s.entries)
        out << e.rank << ',' << detail::fmt_p(e.p_raw) << ',' << detail::fmt_p(e.p_clamped)
            << ',' << detail::csv_escape(e.study_id) << '\n';
    return out.str();
}

} // namespace audit
