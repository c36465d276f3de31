#pragma once

#include <array>
#include <charconv>
#include <string>

namespace tailrobust {

// Shortest decimal string that parses back to exactly `value`.
inline std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  (void)ec;
  return std::string(buf.data(), ptr);
}

}  // namespace tailrobust
