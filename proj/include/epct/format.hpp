#pragma once

#include <cstdio>
#include <string>

namespace epct {

/// Shortest round-trippable decimal form; used everywhere numbers reach CSV
/// or JSON so that repeated seeded runs stay byte-identical.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace epct
