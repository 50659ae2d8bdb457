#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace rijepa {

// Reports print six significant digits.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline double round6(double v) { return std::stod(format_number(v)); }

inline std::vector<double> round6(const std::vector<double>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(round6(x));
  return out;
}

}  // namespace rijepa
