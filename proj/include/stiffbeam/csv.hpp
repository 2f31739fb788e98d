#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stiffbeam/errors.hpp"

namespace stiffbeam {

/// Decimal text with 12 significant digits; shared by every file writer so
/// outputs stay byte-stable.
inline std::string fmt12(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_double(const std::string& s, const std::string& file,
                           std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(file + ": line " + std::to_string(line_no) +
                         ": bad numeric field '" + s + "'");
    }
}

inline long parse_long(const std::string& s, const std::string& file,
                       std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(file + ": line " + std::to_string(line_no) +
                         ": bad integer field '" + s + "'");
    }
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

} // namespace stiffbeam
