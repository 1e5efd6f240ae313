#pragma once

#include <charconv>
#include <string>

namespace opstep::csv {

/// Locale-independent decimal formatting with 17 significant digits
/// (round-trip exact for IEEE doubles). '.' decimal point always.
inline std::string format(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v,
                             std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

} // namespace opstep::csv
