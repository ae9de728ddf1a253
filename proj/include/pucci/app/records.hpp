#pragma once

// Run records and their CSV / JSON export.

#include "pucci/app/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace pucci::app {

struct RunRecord {
    json config;
    json results;  ///< bit-identical for identical configs
    std::string version = kToolVersion;
    double duration_s = 0.0;
    std::vector<std::string> warnings;
};

inline json to_json(const RunRecord& r) {
    json j;
    j["tool"] = kToolName;
    j["version"] = r.version;
    j["config"] = r.config;
    j["results"] = r.results;
    j["duration_s"] = r.duration_s;
    j["warnings"] = r.warnings;
    return j;
}

/// Doubles with 17 significant digits so values survive a text roundtrip.
inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (!j.is_array()) {
        out.emplace_back(prefix, j);
    }
}

inline std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
    if (v.is_number()) return format_real(v.get<double>());
    std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

/// Row order key: the first swept parameter present in the config.
inline double sort_key(const RunRecord& r) {
    for (const char* k : {"p", "amplitude", "R", "mu1", "at"})
        if (r.config.contains(k) && r.config.at(k).is_number()) return r.config.at(k).get<double>();
    return 0.0;
}

}  // namespace detail

/// CSV: one header row of flattened scalar fields (config.* then results.*)
/// and one row per record, sorted by the swept parameter. JSON: an array.
/// Arrays inside records are left out of CSV rows.
inline std::string render_table(std::vector<RunRecord> records, const std::string& format) {
    std::stable_sort(records.begin(), records.end(),
                     [](const RunRecord& a, const RunRecord& b) { return detail::sort_key(a) < detail::sort_key(b); });
    if (format == "json") {
        json arr = json::array();
        for (const auto& r : records) arr.push_back(to_json(r));
        return arr.dump(2) + "\n";
    }
    if (format != "csv") throw UsageError("format", "must be json or csv");
    std::vector<std::vector<std::pair<std::string, json>>> rows;
    for (const auto& r : records) {
        std::vector<std::pair<std::string, json>> row;
        detail::flatten(r.config, "config", row);
        detail::flatten(r.results, "results", row);
        rows.push_back(std::move(row));
    }
    std::string out;
    if (rows.empty()) return "config.command\n";
    for (std::size_t i = 0; i < rows[0].size(); ++i) out += (i ? "," : "") + rows[0][i].first;
    out += "\n";
    for (const auto& row : rows) {
        if (row.size() != rows[0].size())
            throw InvalidInput("CSV export needs records of one shape (column counts differ)");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i].first != rows[0][i].first)
                throw InvalidInput("CSV export needs records of one shape (column '" + row[i].first + "' vs '" +
                                   rows[0][i].first + "')");
            out += (i ? "," : "") + detail::csv_cell(row[i].second);
        }
        out += "\n";
    }
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write '" + path + "'");
    os << text;
    if (!os) throw Error("write to '" + path + "' failed");
}

inline void export_table(const std::vector<RunRecord>& records, const std::string& path, const std::string& format) {
    write_text(path, render_table(records, format));
}

/// Numeric CSV with fixed columns, LF line endings.
inline std::string numeric_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_real(row[i]);
        out += "\n";
    }
    return out;
}

}  // namespace pucci::app
