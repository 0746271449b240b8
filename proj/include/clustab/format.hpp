#pragma once

#include <charconv>
#include <cstdio>
#include <string>

#include "clustab/error.hpp"

namespace clustab {

// Shortest decimal string that round-trips the double exactly. Used for all
// CSV output so serialized panels reload bit-identically.
inline std::string format_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

// Fixed two-decimal formatting for SVG coordinates.
inline std::string format_px(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", x);
    return buf;
}

inline double parse_double(const std::string& s, const std::string& context) {
    double out = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw Error("data", "cannot parse number '" + s + "' (" + context + ")");
    }
    return out;
}

}  // namespace clustab
