// SPDX-License-Identifier: Apache-2.0
//
// Ray launching for shooting-and-bouncing rays: a geodesic sphere obtained by
// repeated 4-way subdivision of a regular icosahedron, one ray per vertex.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rtbvh/geometry.hpp"

namespace rtbvh {

inline constexpr int kMaxTessellationLevel = 8;

using Face = std::array<std::uint32_t, 3>;
using Edge = std::pair<std::uint32_t, std::uint32_t>;  // first < second

struct LaunchSet {
  std::vector<Vec3> directions;
  std::vector<Face> faces;
  std::vector<Edge> edges;
  double delta = 0.0;  // largest angle between adjacent directions, radians
  int level = 0;
};

inline std::vector<Edge> mesh_edges(std::span<const Face> faces) {
  std::vector<Edge> edges;
  edges.reserve(faces.size() * 3);
  for (const Face& f : faces) {
    for (int i = 0; i < 3; ++i) {
      const std::uint32_t a = f[i];
      const std::uint32_t b = f[(i + 1) % 3];
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

inline double adjacent_angle(std::span<const Vec3> directions, std::span<const Edge> edges) {
  double worst = 0.0;
  for (const auto& [a, b] : edges) {
    const double c = std::clamp(dot(directions[a], directions[b]), -1.0, 1.0);
    worst = std::max(worst, std::acos(c));
  }
  return worst;
}

/// The 12-vertex icosahedron from the cyclic permutations of (0, ±1, ±phi),
/// projected to the unit sphere, with its 20 outward-wound faces.
inline void icosahedron(std::vector<Vec3>& verts, std::vector<Face>& faces) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  verts.clear();
  for (double s1 : {-1.0, 1.0}) {
    for (double s2 : {-phi, phi}) {
      verts.push_back({0.0, s1, s2});
      verts.push_back({s1, s2, 0.0});
      verts.push_back({s2, 0.0, s1});
    }
  }
  // Unscaled edge length is 2; every face is a triple of mutually adjacent vertices.
  auto adjacent = [&](std::uint32_t a, std::uint32_t b) {
    return std::abs(distance(verts[a], verts[b]) - 2.0) < 1e-9;
  };
  faces.clear();
  const auto n = static_cast<std::uint32_t>(verts.size());
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = a + 1; b < n; ++b)
      for (std::uint32_t c = b + 1; c < n; ++c) {
        if (!adjacent(a, b) || !adjacent(b, c) || !adjacent(a, c)) continue;
        const Vec3 normal = cross(verts[b] - verts[a], verts[c] - verts[a]);
        if (dot(normal, verts[a]) > 0.0)
          faces.push_back({a, b, c});
        else
          faces.push_back({a, c, b});
      }
  for (Vec3& v : verts) v = normalize(v);
}

inline LaunchSet tessellate(int level) {
  if (level < 0 || level > kMaxTessellationLevel)
    throw std::out_of_range("tessellation level must lie in [0, " +
                            std::to_string(kMaxTessellationLevel) + "]");
  LaunchSet out;
  out.level = level;
  icosahedron(out.directions, out.faces);

  for (int step = 0; step < level; ++step) {
    std::map<Edge, std::uint32_t> midpoints;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const Edge key{std::min(a, b), std::max(a, b)};
      auto [it, inserted] = midpoints.try_emplace(key, 0u);
      if (inserted) {
        it->second = static_cast<std::uint32_t>(out.directions.size());
        out.directions.push_back(normalize(out.directions[a] + out.directions[b]));
      }
      return it->second;
    };
    std::vector<Face> next;
    next.reserve(out.faces.size() * 4);
    for (const Face& f : out.faces) {
      const std::uint32_t ab = midpoint(f[0], f[1]);
      const std::uint32_t bc = midpoint(f[1], f[2]);
      const std::uint32_t ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    out.faces = std::move(next);
  }

  out.edges = mesh_edges(out.faces);
  out.delta = adjacent_angle(out.directions, out.edges);
  return out;
}

inline std::size_t launch_count(int level) {
  return 10 * (std::size_t{1} << (2 * level)) + 2;
}

}  // namespace rtbvh
