// SPDX-License-Identifier: Apache-2.0
//
// Geometric kernels: vectors, rays, triangles, axis-aligned boxes and the
// intersection predicates the acceleration structure and tracer are built on.
// Every function here is pure.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>

namespace rtbvh {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  constexpr double& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  friend constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double length(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline double distance(const Vec3& a, const Vec3& b) { return length(a - b); }
inline Vec3 normalize(const Vec3& v) { return v / length(v); }

constexpr Vec3 min(const Vec3& a, const Vec3& b) {
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
constexpr Vec3 max(const Vec3& a, const Vec3& b) {
  return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// A half-line `origin + t * direction` restricted to t in (t_min, t_max].
///
/// `t_min` is zero for primary rays; reflected rays carry a small positive
/// bias so the surface they leave is not reported again.
struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length
  double t_max = kInfinity;
  double t_min = 0.0;

  Vec3 at(double t) const { return origin + direction * t; }
};

struct Triangle {
  Vec3 v0, v1, v2;
  std::uint32_t facet_id = 0;

  Vec3 edge1() const { return v1 - v0; }
  Vec3 edge2() const { return v2 - v0; }
  double area() const { return 0.5 * length(cross(edge1(), edge2())); }
  Vec3 unit_normal() const { return normalize(cross(edge1(), edge2())); }
};

/// Triangles with area below this are rejected when a scene is loaded.
inline constexpr double kDegenerateArea = 1e-12;

struct Aabb {
  Vec3 min{kInfinity, kInfinity, kInfinity};
  Vec3 max{-kInfinity, -kInfinity, -kInfinity};

  /// The identity element of `aabb_union`; contains nothing.
  static constexpr Aabb empty() { return {}; }

  bool is_empty() const { return min.x > max.x || min.y > max.y || min.z > max.z; }
  Vec3 extent() const { return max - min; }

  void expand(const Vec3& p) {
    min = rtbvh::min(min, p);
    max = rtbvh::max(max, p);
  }

  bool contains(const Vec3& p) const {
    return min.x <= p.x && p.x <= max.x && min.y <= p.y && p.y <= max.y && min.z <= p.z &&
           p.z <= max.z;
  }
  bool contains(const Aabb& b) const { return contains(b.min) && contains(b.max); }

  int longest_axis() const {
    const Vec3 d = extent();
    if (d.x >= d.y && d.x >= d.z) return 0;
    return d.y >= d.z ? 1 : 2;
  }

  friend bool operator==(const Aabb&, const Aabb&) = default;
};

inline Aabb aabb_of(const Triangle& t) {
  Aabb b;
  b.expand(t.v0);
  b.expand(t.v1);
  b.expand(t.v2);
  return b;
}

inline Aabb aabb_of_triangles(std::span<const Triangle> tris) {
  if (tris.empty()) throw std::invalid_argument("empty primitive set");
  Aabb b;
  for (const Triangle& t : tris) {
    b.expand(t.v0);
    b.expand(t.v1);
    b.expand(t.v2);
  }
  return b;
}

inline Aabb aabb_union(const Aabb& a, const Aabb& b) {
  return {rtbvh::min(a.min, b.min), rtbvh::max(a.max, b.max)};
}

/// Overlap of two boxes; empty when they are disjoint.
inline Aabb aabb_intersection(const Aabb& a, const Aabb& b) {
  return {rtbvh::max(a.min, b.min), rtbvh::min(a.max, b.max)};
}

inline double surface_area(const Aabb& b) {
  if (b.is_empty()) return 0.0;
  const Vec3 d = b.extent();
  return 2.0 * (d.x * d.y + d.y * d.z + d.z * d.x);
}

inline Vec3 centroid(const Aabb& b) { return (b.min + b.max) * 0.5; }

inline double diagonal(const Aabb& b) { return b.is_empty() ? 0.0 : length(b.extent()); }

struct Interval {
  double t_enter;
  double t_exit;
};

namespace detail {
// Rounding bound for the slab distances; widening t_exit by it makes the test
// conservative for points lying exactly on a face.
inline constexpr double kSlabWiden = 1.0 + 2.0 * (3.0 * std::numeric_limits<double>::epsilon() * 0.5) /
                                               (1.0 - 3.0 * std::numeric_limits<double>::epsilon() * 0.5);
}  // namespace detail

/// Slab test against `b`, clipped to [0, r.t_max].
///
/// Zero direction components give infinite reciprocal slopes; the resulting
/// ±inf slab bounds order correctly under min/max, except for the 0 * inf
/// case of an origin lying exactly on the slab plane, which is treated as
/// inside that slab.
inline std::optional<Interval> ray_aabb_intersect(const Ray& r, const Aabb& b) {
  double t0 = 0.0;
  double t1 = r.t_max;
  for (int axis = 0; axis < 3; ++axis) {
    const double inv = 1.0 / r.direction[axis];
    double t_near = (b.min[axis] - r.origin[axis]) * inv;
    double t_far = (b.max[axis] - r.origin[axis]) * inv;
    if (std::isnan(t_near)) t_near = -kInfinity;
    if (std::isnan(t_far)) t_far = kInfinity;
    if (t_near > t_far) std::swap(t_near, t_far);
    t_far *= detail::kSlabWiden;
    t0 = t_near > t0 ? t_near : t0;
    t1 = t_far < t1 ? t_far : t1;
    if (t0 > t1) return std::nullopt;
  }
  return Interval{t0, t1};
}

struct Hit {
  double t = kInfinity;
  Vec3 point;
  std::array<double, 3> barycentric{};  // weights of v0, v1, v2
  std::uint32_t facet_id = 0;
};

/// Closest-hit ordering shared by every query path: smaller t wins and equal
/// t is broken towards the lower facet id.
inline bool closer(const Hit& a, const Hit& b) {
  return a.t < b.t || (a.t == b.t && a.facet_id < b.facet_id);
}

/// Möller–Trumbore intersection. Edges and vertices count as inside; rays
/// parallel to the plane (relative to the edge lengths) miss.
inline std::optional<Hit> ray_triangle_intersect(const Ray& r, const Triangle& tri) {
  const Vec3 e1 = tri.edge1();
  const Vec3 e2 = tri.edge2();
  const Vec3 p = cross(r.direction, e2);
  const double det = dot(e1, p);
  if (std::abs(det) <= 1e-12 * length(e1) * length(e2)) return std::nullopt;
  const double inv_det = 1.0 / det;
  const Vec3 s = r.origin - tri.v0;
  const double u = dot(s, p) * inv_det;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = cross(s, e1);
  const double v = dot(r.direction, q) * inv_det;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = dot(e2, q) * inv_det;
  if (!(t > r.t_min) || t > r.t_max) return std::nullopt;
  Hit h;
  h.t = t;
  h.point = r.at(t);
  h.barycentric = {1.0 - u - v, u, v};
  h.facet_id = tri.facet_id;
  return h;
}

/// Mirror `direction` about the plane with unit normal `normal`.
inline Vec3 reflect(const Vec3& direction, const Vec3& normal) {
  return direction - normal * (2.0 * dot(direction, normal));
}

/// Reflections with |d·n| below this are tangent and get discarded.
inline constexpr double kGrazingCosine = 1e-12;

}  // namespace rtbvh
