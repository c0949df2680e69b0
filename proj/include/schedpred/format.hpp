#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace schedpred {

/// Decimal string with 12 significant digits ("nan" for NaN).
[[nodiscard]] inline std::string format_sig(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

}  // namespace schedpred
