#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace bellman {

// Shortest-round-trip-safe formatting; one code path so every CSV emitter
// produces byte-identical output for equal values.
inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace bellman
