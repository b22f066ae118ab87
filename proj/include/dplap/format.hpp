#pragma once

#include <cstdio>
#include <string>

namespace dplap {

/// 17 significant digits: enough to round-trip any double.
inline std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace dplap
