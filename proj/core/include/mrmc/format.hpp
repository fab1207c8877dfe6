#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace mrmc {

/// Shortest decimal text that parses back to exactly the same double.
inline std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0 into 0
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return std::to_string(value);
  return {buf, end};
}

/// Time stamps are printed rounded to microseconds to keep tick times such
/// as 0.1 + 0.05 readable.
inline std::string format_time(double t) {
  return format_number(std::round(t * 1e6) / 1e6);
}

}  // namespace mrmc
