#pragma once

#include <charconv>
#include <string>

namespace fleetcarbon::detail {

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

} // namespace fleetcarbon::detail
