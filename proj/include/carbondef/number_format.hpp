#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <string>

namespace carbondef {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), end);
}

inline std::string format_number(std::int64_t v) { return std::to_string(v); }

}  // namespace carbondef
