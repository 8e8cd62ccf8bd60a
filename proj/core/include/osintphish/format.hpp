#pragma once

#include <charconv>
#include <string>
#include <string_view>

#include "osintphish/error.hpp"

namespace osintphish {

/// Shortest decimal text that parses back to exactly `value`.
inline std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

inline double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw DataError("invalid number '" + std::string(text) + "' for " + std::string(what));
  }
  return value;
}

inline long long parse_int(std::string_view text, std::string_view what) {
  long long value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw DataError("invalid integer '" + std::string(text) + "' for " + std::string(what));
  }
  return value;
}

}  // namespace osintphish
