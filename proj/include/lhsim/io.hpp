#ifndef LHSIM_IO_HPP
#define LHSIM_IO_HPP

// Delimited-table I/O: comma-separated tables with a one-line unit header,
// floats at 9 significant digits, atomic per-table writes.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "series.hpp"

namespace lhsim {

inline std::string format_value(double v) {
    if (std::isnan(v)) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

/// Write a table atomically: the content lands in a temp file first and is
/// renamed into place.
inline void write_table(const std::filesystem::path& path, const std::string& header,
                        const std::vector<std::vector<double>>& columns) {
    if (!columns.empty())
        for (const auto& c : columns)
            if (c.size() != columns.front().size())
                throw std::invalid_argument("write_table: ragged columns");
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("write_table: cannot open " + tmp.string());
        out << header << "\n";
        std::size_t rows = columns.empty() ? 0 : columns.front().size();
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < columns.size(); ++c) {
                if (c) out << ",";
                out << format_value(columns[c][r]);
            }
            out << "\n";
        }
    }
    std::filesystem::rename(tmp, path);
}

struct Table {
    std::vector<std::string> column_names;
    std::vector<std::vector<double>> columns;
};

inline Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_table: cannot open " + path.string());
    Table t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line_no == 1) {
            t.column_names = cells;
            t.columns.resize(cells.size());
            continue;
        }
        if (cells.size() != t.column_names.size())
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": wrong number of fields");
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (cells[c] == "NA") {
                t.columns[c].push_back(std::nan(""));
                continue;
            }
            try {
                std::size_t pos = 0;
                double v = std::stod(cells[c], &pos);
                if (pos != cells[c].size()) throw std::invalid_argument("trailing");
                t.columns[c].push_back(v);
            } catch (const std::exception&) {
                throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                         ": malformed number '" + cells[c] + "'");
            }
        }
    }
    if (t.column_names.empty()) throw std::runtime_error(path.string() + ": empty file");
    return t;
}

/// One imported animal series; values below the assay floor are retained
/// but flagged.
struct ImportedSeries {
    IrregularSeries series;          // times in hours
    std::vector<bool> below_floor;
};

/// Read a raw LH series table (time_hours, value_ng_ml). Malformed rows are
/// reported with line numbers; non-monotone times are rejected.
inline ImportedSeries import_series(const std::filesystem::path& path,
                                    double assay_floor = 0.2) {
    Table t = read_table(path);
    if (t.columns.size() < 2)
        throw std::runtime_error(path.string() + ": expected time and value columns");
    ImportedSeries out;
    out.series.times = t.columns[0];
    out.series.values = t.columns[1];
    for (std::size_t i = 1; i < out.series.times.size(); ++i)
        if (!(out.series.times[i] > out.series.times[i - 1]))
            throw std::runtime_error(path.string() + ":" + std::to_string(i + 2) +
                                     ": non-increasing timestamp");
    out.series.validate();
    for (double v : out.series.values) out.below_floor.push_back(v < assay_floor);
    return out;
}

inline void export_series(const std::filesystem::path& path, const IrregularSeries& s) {
    write_table(path, "time_hours,value_ng_ml", {s.times, s.values});
}

inline void export_uniform_days(const std::filesystem::path& path, const UniformSeries& s,
                                const std::string& value_header) {
    std::vector<double> days(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) days[i] = s.time_at(i) / kHoursPerDay;
    write_table(path, "time_days," + value_header, {days, s.values});
}

/// Read a daily-grid table back into hours; tolerates tiny grid jitter from
/// the 9-digit formatting.
inline UniformSeries import_uniform_days(const std::filesystem::path& path) {
    Table t = read_table(path);
    if (t.columns.size() < 2 || t.columns[0].size() < 2)
        throw std::runtime_error(path.string() + ": expected >= 2 rows of (time, value)");
    const auto& days = t.columns[0];
    double dt_days = (days.back() - days.front()) / static_cast<double>(days.size() - 1);
    // 9-significant-digit formatting leaves ~1e-5 d of rounding noise at
    // timestamps in the thousands of days
    for (std::size_t i = 1; i < days.size(); ++i)
        if (std::abs(days[i] - days[i - 1] - dt_days) > 1e-4)
            throw std::runtime_error(path.string() + ": non-uniform time grid");
    double dt_hours = dt_days * kHoursPerDay;
    double whole = std::round(dt_hours);
    if (whole > 0.0 && std::abs(dt_hours - whole) < 1e-3) dt_hours = whole;
    return UniformSeries(days[0] * kHoursPerDay, dt_hours, t.columns[1]);
}

/// FNV-1a 64-bit hash; used to fingerprint configurations in run manifests.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace lhsim

#endif
