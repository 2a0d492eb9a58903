#pragma once

#include <array>
#include <charconv>
#include <string>

namespace periph {

/// Shortest decimal that parses back to the same binary64 value.
inline std::string shortest_decimal(double value) {
  std::array<char, 64> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), result.ptr);
}

}  // namespace periph
