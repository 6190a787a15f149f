#pragma once

// Minimal CSV helpers for the plain-decimal files this project reads.  No
// quoting: fields never contain commas.

#include "lmesim/errors.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace lmesim::csv {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline double to_double(std::string_view cell, const std::string& where) {
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
        throw DataError(where + ": '" + std::string(cell) + "' is not a finite number");
    return v;
}

inline long long to_int(std::string_view cell, const std::string& where) {
    long long v = 0;
    const auto* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (cell.empty() || ec != std::errc() || ptr != end)
        throw DataError(where + ": '" + std::string(cell) + "' is not an integer");
    return v;
}

// Shortest text that parses back to the same double.
inline std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// Next non-empty line that is not a `#` comment.  Returns false at EOF.
inline bool next_record(std::istream& in, std::string& line, long& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        return true;
    }
    return false;
}

}  // namespace lmesim::csv
