// SPDX-License-Identifier: Apache-2.0
//
// Reference computations used by the tests. Each one is written from first
// principles and shares no code path with the routine it checks.

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "rtbvh/geometry.hpp"
#include "rtbvh/prng.hpp"

namespace rtbvh::oracle {

struct PlaneHit {
  double t;
  std::array<double, 3> bary;
};

/// Intersect the supporting plane first, then express the point in
/// barycentric coordinates via sub-triangle areas (signed against the
/// triangle normal).
inline std::optional<PlaneHit> plane_then_barycentric(const Vec3& o, const Vec3& d, const Vec3& a,
                                                      const Vec3& b, const Vec3& c) {
  const Vec3 n = cross(b - a, c - a);
  const double denom = n.x * d.x + n.y * d.y + n.z * d.z;
  if (denom == 0.0) return std::nullopt;
  const double t = ((a.x - o.x) * n.x + (a.y - o.y) * n.y + (a.z - o.z) * n.z) / denom;
  const Vec3 p{o.x + t * d.x, o.y + t * d.y, o.z + t * d.z};
  const double nn = n.x * n.x + n.y * n.y + n.z * n.z;
  auto signed_area = [&](const Vec3& p0, const Vec3& p1, const Vec3& p2) {
    const Vec3 m = cross(p1 - p0, p2 - p0);
    return (m.x * n.x + m.y * n.y + m.z * n.z) / nn;
  };
  return PlaneHit{t, {signed_area(p, b, c), signed_area(a, p, c), signed_area(a, b, p)}};
}

/// Bounding box by an explicit loop over raw coordinates.
inline Aabb fold_vertices(std::span<const Triangle> tris) {
  Aabb b{{1e300, 1e300, 1e300}, {-1e300, -1e300, -1e300}};
  for (const Triangle& t : tris) {
    for (const Vec3* v : {&t.v0, &t.v1, &t.v2}) {
      if (v->x < b.min.x) b.min.x = v->x;
      if (v->y < b.min.y) b.min.y = v->y;
      if (v->z < b.min.z) b.min.z = v->z;
      if (v->x > b.max.x) b.max.x = v->x;
      if (v->y > b.max.y) b.max.y = v->y;
      if (v->z > b.max.z) b.max.z = v->z;
    }
  }
  return b;
}

inline Vec3 corner_average(const Aabb& b) {
  Vec3 sum;
  for (int i = 0; i < 8; ++i)
    sum += Vec3{(i & 1) ? b.max.x : b.min.x, (i & 2) ? b.max.y : b.min.y, (i & 4) ? b.max.z : b.min.z};
  return sum / 8.0;
}

/// Specular paths between two infinite mirrors y = 0 and y = width.
/// `walls[i]` is 0 for the y = 0 mirror and 1 for y = width.
struct MirrorPath {
  std::vector<int> walls;
  std::vector<Vec3> vertices;  // tx, bounces..., rx
};

inline std::vector<MirrorPath> parallel_mirror_paths(const Vec3& tx, const Vec3& rx, double width,
                                                     int max_order) {
  std::vector<MirrorPath> out;
  out.push_back({{}, {tx, rx}});
  for (int order = 1; order <= max_order; ++order) {
    for (int first = 0; first < 2; ++first) {
      MirrorPath p;
      for (int i = 0; i < order; ++i) p.walls.push_back((first + i) % 2);
      // Image of tx: reflect the y coordinate across each wall in turn.
      std::vector<double> image_y{tx.y};
      for (int w : p.walls) {
        const double plane = w == 0 ? 0.0 : width;
        image_y.push_back(2.0 * plane - image_y.back());
      }
      // Unfold: straight line from the final image to rx, crossing the walls
      // in reverse order.
      std::vector<Vec3> bounces(order);
      Vec3 target = rx;
      for (int i = order - 1; i >= 0; --i) {
        const double plane = p.walls[i] == 0 ? 0.0 : width;
        const Vec3 from{tx.x, image_y[i + 1], tx.z};
        const double s = (plane - from.y) / (target.y - from.y);
        bounces[i] = {from.x + s * (target.x - from.x), plane, from.z + s * (target.z - from.z)};
        target = bounces[i];
      }
      p.vertices.push_back(tx);
      for (const Vec3& b : bounces) p.vertices.push_back(b);
      p.vertices.push_back(rx);
      out.push_back(p);
    }
  }
  return out;
}

inline Vec3 random_unit(Xoshiro256& rng) {
  for (;;) {
    const Vec3 v{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double l2 = dot(v, v);
    if (l2 > 1e-6 && l2 <= 1.0) return v / std::sqrt(l2);
  }
}

inline Vec3 random_point(Xoshiro256& rng, const Aabb& b) {
  return {rng.uniform(b.min.x, b.max.x), rng.uniform(b.min.y, b.max.y), rng.uniform(b.min.z, b.max.z)};
}

}  // namespace rtbvh::oracle
