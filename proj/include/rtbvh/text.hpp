// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "rtbvh/geometry.hpp"

namespace rtbvh {

/// Shortest-exact decimal rendering used by every text format in the
/// library (17 significant digits round-trip an IEEE double).
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_vec(const Vec3& v, char sep = ' ') {
  return format_real(v.x) + sep + format_real(v.y) + sep + format_real(v.z);
}

}  // namespace rtbvh
