#pragma once

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "ctqw/error.hpp"

// Small text helpers shared by the file formats. Doubles are written with
// 17 significant digits so that every value round-trips bit-exactly.
namespace ctqw::text {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(std::string_view s, std::string_view what) {
    std::string tmp(s);
    const char* begin = tmp.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (tmp.empty() || end != begin + tmp.size() || (errno == ERANGE && v != 0.0))
        fail(ErrorKind::Format, std::string(what) + ": cannot parse number '" + tmp + "'");
    return v;
}

inline long long parse_integer(std::string_view s, std::string_view what) {
    std::string tmp(s);
    const char* begin = tmp.c_str();
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(begin, &end, 10);
    if (tmp.empty() || end != begin + tmp.size() || errno == ERANGE)
        fail(ErrorKind::Format, std::string(what) + ": cannot parse integer '" + tmp + "'");
    return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::ifstream open_input(const std::string& path, std::string_view produced_by) {
    std::ifstream in(path);
    if (!in) {
        std::string msg = "cannot open '" + path + "'";
        if (!produced_by.empty()) msg += " (run `" + std::string(produced_by) + "` first)";
        fail(ErrorKind::MissingArtifact, msg);
    }
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorKind::MissingArtifact, "cannot write '" + path + "'");
    return out;
}

}  // namespace ctqw::text
