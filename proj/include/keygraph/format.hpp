#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace keygraph {

// All floating-point output goes through this: 9 significant digits keeps
// golden files stable above the double noise floor. NaN prints as "n/a"
// (used for undefined standard errors at a single trial).
inline std::string format_value(double x) {
  if (std::isnan(x)) return "n/a";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

}  // namespace keygraph
