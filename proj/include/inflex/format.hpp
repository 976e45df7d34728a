#pragma once

#include <charconv>
#include <string>
#include <vector>

namespace inflex {

/// Shortest decimal text that reads back to the same double.
inline std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline std::string join_shortest(const std::vector<double>& values, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += shortest(values[i]);
  }
  return out;
}

}  // namespace inflex
