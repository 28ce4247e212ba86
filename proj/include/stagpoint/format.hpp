#pragma once

#include <cstdio>
#include <string>

namespace stagpoint {

// Fixed float formatting for reports; output must be byte-stable across runs.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

inline std::string fmt_sci(double v, int digits = 3) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*e", digits, v);
    return buf;
}

}  // namespace stagpoint
