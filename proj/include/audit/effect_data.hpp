#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace audit {

struct EffectRecord {
    std::string study_id;
    std::string first_author;
    int pub_year = 0;
    std::string subgroup; // empty when the row is not a subgroup split
    double rr = 0.0;
    double lcl = 0.0;
    double ucl = 0.0;
    double conf_level = 0.95;
    bool inconsistent_interval = false; // rr outside [lcl, ucl]; kept, flagged
};

struct PollutantDataset {
    std::string label;
    std::vector<EffectRecord> records;
    std::vector<std::string> diagnostics; // non-fatal row warnings
};

struct SearchSpaceRecord {
    std::string study_id;
    long long outcomes = 1;
    long long predictors = 1;
    long long models = 1;
    long long lags = 1;
    long long covariates = 0;
};

struct PrevalenceRecord {
    std::string disease;
    double prevalence = 0.0;
    std::string note;
};

class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') { field += '"'; ++i; }
                else quoted = false;
            } else field += ch;
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field += ch;
        }
    }
    out.push_back(field);
    return out;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) { if (ch == '"') out += "\"\""; out += ch; }
    out += "\"";
    return out;
}

inline double parse_double(const std::string& s, const std::string& what, size_t row) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw parse_error("row " + std::to_string(row) + ": non-numeric " + what +
                          " value '" + s + "'");
    }
}

inline long long parse_int(const std::string& s, const std::string& what, size_t row) {
    try {
        size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw parse_error("row " + std::to_string(row) + ": non-numeric " + what +
                          " value '" + s + "'");
    }
}

inline std::map<std::string, size_t> header_index(const std::vector<std::string>& header,
                                                  const std::vector<std::string>& required) {
    std::map<std::string, size_t> idx;
    for (size_t i = 0; i < header.size(); ++i) idx[header[i]] = i;
    for (const auto& col : required)
        if (!idx.count(col))
            throw parse_error("missing column '" + col + "' in header");
    return idx;
}

} // namespace detail

inline PollutantDataset parse_effect_csv(std::istream& in, const std::string& label) {
    PollutantDataset ds;
    ds.label = label;
    std::string line;
    if (!std::getline(in, line))
        throw parse_error("empty input: no header row");
    auto idx = detail::header_index(
        detail::split_csv_row(line),
        {"study_id", "first_author", "pub_year", "subgroup", "rr", "lcl", "ucl"});
    bool has_conf = idx.count("conf_level") > 0;

    std::vector<std::string> seen;
    size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto f = detail::split_csv_row(line);
        if (f.size() < 7)
            throw parse_error("row " + std::to_string(row) + ": expected at least 7 fields, got " +
                              std::to_string(f.size()));
        EffectRecord r;
        r.study_id = f[idx["study_id"]];
        r.first_author = f[idx["first_author"]];
        r.pub_year = static_cast<int>(detail::parse_int(f[idx["pub_year"]], "pub_year", row));
        r.subgroup = f[idx["subgroup"]];
        r.rr = detail::parse_double(f[idx["rr"]], "rr", row);
        r.lcl = detail::parse_double(f[idx["lcl"]], "lcl", row);
        r.ucl = detail::parse_double(f[idx["ucl"]], "ucl", row);
        if (has_conf && idx["conf_level"] < f.size() && !f[idx["conf_level"]].empty())
            r.conf_level = detail::parse_double(f[idx["conf_level"]], "conf_level", row);

        if (r.rr <= 0.0 || r.lcl <= 0.0 || r.ucl <= 0.0)
            throw parse_error("row " + std::to_string(row) + ": non-positive ratio value");
        if (r.lcl >= r.ucl)
            throw parse_error("row " + std::to_string(row) + ": degenerate interval (lcl >= ucl)");
        // Published tables contain rows with rr outside its own CI; these are
        // findings to surface, not rows to drop.
        if (r.rr < r.lcl || r.rr > r.ucl) {
            r.inconsistent_interval = true;
            ds.diagnostics.push_back("row " + std::to_string(row) + " (" + r.study_id +
                                     "): rr outside [lcl, ucl]");
        }
        std::string key = r.study_id + "|" + r.subgroup;
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            ds.diagnostics.push_back("row " + std::to_string(row) +
                                     ": duplicate study_id+subgroup '" + key + "'");
        seen.push_back(key);
        ds.records.push_back(r);
    }
    if (ds.records.empty())
        throw parse_error("no data rows");
    return ds;
}

inline std::string serialize_effect_csv(const PollutantDataset& ds) {
    std::ostringstream out;
    out << "study_id,first_author,pub_year,subgroup,rr,lcl,ucl,conf_level\n";
    out.precision(17);
    for (const auto& r : ds.records) {
        out << detail::csv_escape(r.study_id) << ',' << detail::csv_escape(r.first_author)
            << ',' << r.pub_year << ',' << detail::csv_escape(r.subgroup) << ',' << r.rr
            << ',' << r.lcl << ',' << r.ucl << ',' << r.conf_level << '\n';
    }
    return out.str();
}

inline std::vector<SearchSpaceRecord> parse_searchspace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw parse_error("empty input: no header row");
    auto idx = detail::header_index(
        detail::split_csv_row(line),
        {"study_id", "outcomes", "predictors", "models", "lags", "covariates"});

    std::vector<SearchSpaceRecord> out;
    size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto f = detail::split_csv_row(line);
        if (f.size() < 6)
            throw parse_error("row " + std::to_string(row) + ": expected 6 fields");
        SearchSpaceRecord r;
        r.study_id = f[idx["study_id"]];
        r.outcomes = detail::parse_int(f[idx["outcomes"]], "outcomes", row);
        r.predictors = detail::parse_int(f[idx["predictors"]], "predictors", row);
        r.models = detail::parse_int(f[idx["models"]], "models", row);
        r.lags = detail::parse_int(f[idx["lags"]], "lags", row);
        r.covariates = detail::parse_int(f[idx["covariates"]], "covariates", row);
        if (r.outcomes < 1 || r.predictors < 1 || r.models < 1 || r.lags < 1)
            throw parse_error("row " + std::to_string(row) + ": counts must be >= 1");
        if (r.covariates < 0)
            throw parse_error("row " + std::to_string(row) + ": covariates must be >= 0");
        if (r.covariates > 62)
            throw parse_error("row " + std::to_string(row) + ": covariates > 62 overflows 2^k");
        out.push_back(r);
    }
    if (out.empty()) throw parse_error("no data rows");
    return out;
}

inline std::vector<PrevalenceRecord> parse_prevalence_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw parse_error("empty input: no header row");
    auto idx = detail::header_index(detail::split_csv_row(line),
                                    {"disease", "prevalence", "note"});
    std::vector<PrevalenceRecord> out;
    size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto f = detail::split_csv_row(line);
        PrevalenceRecord r;
        r.disease = f[idx["disease"]];
        r.prevalence = detail::parse_double(f[idx["prevalence"]], "prevalence", row);
        r.note = f[idx["note"]];
        if (!(r.prevalence > 0.0 && r.prevalence < 1.0))
            throw parse_error("row " + std::to_string(row) + ": prevalence outside (0,1)");
        out.push_back(r);
    }
    return out;
}

} // namespace audit
