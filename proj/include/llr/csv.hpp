#pragma once

#include <cstdio>
#include <string>

namespace llr {

// Floats are printed with 17 significant digits so a parsed trace
// round-trips to the exact double that produced it.
inline std::string csv_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace llr
