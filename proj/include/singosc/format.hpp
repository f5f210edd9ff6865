#pragma once

#include <cstdio>
#include <string>

namespace singosc {

inline constexpr const char* kVersion = "0.1.0";

/// Fixed 12-significant-digit scientific rendering used by every CSV writer,
/// so identical runs diff cleanly.
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

}  // namespace singosc
