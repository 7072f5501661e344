// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace rtbvh {

/// Work counters and timings for one run. Each thread owns its own copy;
/// copies are merged with `+=`.
struct RunStats {
  std::uint64_t ray_aabb_tests = 0;
  std::uint64_t ray_triangle_tests = 0;
  std::uint64_t nodes_visited = 0;
  std::uint64_t rays_launched = 0;
  std::uint64_t legs_traced = 0;  // closest-hit queries issued by the tracer
  std::uint64_t paths_captured = 0;
  double build_time = 0.0;  // seconds
  double trace_time = 0.0;  // seconds

  RunStats& operator+=(const RunStats& o) {
    ray_aabb_tests += o.ray_aabb_tests;
    ray_triangle_tests += o.ray_triangle_tests;
    nodes_visited += o.nodes_visited;
    rays_launched += o.rays_launched;
    legs_traced += o.legs_traced;
    paths_captured += o.paths_captured;
    build_time += o.build_time;
    trace_time += o.trace_time;
    return *this;
  }

  /// Traversal work used to compare strategies independently of the clock.
  std::uint64_t traversal_work() const { return nodes_visited + ray_triangle_tests; }

  bool same_counters(const RunStats& o) const {
    return ray_aabb_tests == o.ray_aabb_tests && ray_triangle_tests == o.ray_triangle_tests &&
           nodes_visited == o.nodes_visited && rays_launched == o.rays_launched &&
           legs_traced == o.legs_traced && paths_captured == o.paths_captured;
  }
};

}  // namespace rtbvh
