#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "robustmean/samples.hpp"

namespace robustmean {

// Strict, locale-free double parse of the whole (trimmed) string.
inline bool parse_double(std::string_view s, double& out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return fields;
}

}  // namespace detail

// CSV samples: comma separator, '.' decimal, one sample per row. A first
// row with any non-numeric field is treated as a header. Rows must agree
// on the column count; diagnostics carry the 1-based offending line.
inline SampleSet read_samples_csv(std::istream& in) {
    std::vector<Vec> rows;
    std::size_t expected = 0;
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view stripped = detail::trim(line);
        if (stripped.empty()) continue;
        const auto fields = detail::split_fields(stripped);
        Vec row(fields.size());
        bool numeric = true;
        std::size_t bad_field = 0;
        for (std::size_t i = 0; i < fields.size(); ++i)
            if (!parse_double(fields[i], row[i])) {
                numeric = false;
                bad_field = i;
                break;
            }
        if (first_content) {
            first_content = false;
            if (!numeric) continue;  // header row
            expected = fields.size();
            rows.push_back(std::move(row));
            continue;
        }
        if (expected == 0) expected = fields.size();
        if (!numeric)
            throw parse_error("csv: field " + std::to_string(bad_field + 1) +
                                  " is not a number",
                              line_no);
        if (fields.size() != expected)
            throw parse_error("csv: row has " + std::to_string(fields.size()) +
                                  " columns, expected " + std::to_string(expected),
                              line_no);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw parse_error("csv: no data rows", line_no);
    return SampleSet(std::move(rows));
}

// JSONL samples: one JSON array of numbers per line, all of equal length.
inline SampleSet read_samples_jsonl(std::istream& in) {
    std::vector<Vec> rows;
    std::size_t expected = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw parse_error(std::string("jsonl: ") + e.what(), line_no);
        }
        if (!j.is_array()) throw parse_error("jsonl: line is not an array", line_no);
        Vec row;
        row.reserve(j.size());
        for (const auto& v : j) {
            if (!v.is_number()) throw parse_error("jsonl: non-numeric entry", line_no);
            row.push_back(v.get<double>());
        }
        if (rows.empty())
            expected = row.size();
        else if (row.size() != expected)
            throw parse_error("jsonl: array has " + std::to_string(row.size()) +
                                  " entries, expected " + std::to_string(expected),
                              line_no);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw parse_error("jsonl: no data rows", line_no);
    return SampleSet(std::move(rows));
}

enum class SampleFormat { kAuto, kCsv, kJsonl };

// Auto detection looks at the first non-space byte: '[' means JSONL.
inline SampleSet read_samples_file(const std::string& path,
                                   SampleFormat format = SampleFormat::kAuto) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open input file '" + path + "'");
    if (format == SampleFormat::kAuto) {
        int c = in.peek();
        while (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
            in.get();
            c = in.peek();
        }
        format = c == '[' ? SampleFormat::kJsonl : SampleFormat::kCsv;
    }
    return format == SampleFormat::kJsonl ? read_samples_jsonl(in) : read_samples_csv(in);
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw parse_error("failed writing output file '" + path + "'");
}

}  // namespace robustmean
