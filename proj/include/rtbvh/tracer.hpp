// SPDX-License-Identifier: Apache-2.0
//
// Specular shooting-and-bouncing-ray tracer with receiving-sphere capture.
//
// Each launched ray is followed leg by leg. On every leg the receiver is
// tested against the unobstructed part of the leg (origin up to the closest
// hit), then the ray is mirrored at the hit facet. A capture is accepted when
// the receiver lies within r = l * delta / sqrt(3) of the leg, l being the
// unfolded path length at the point of closest approach.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "rtbvh/bvh.hpp"
#include "rtbvh/geometry.hpp"
#include "rtbvh/launch.hpp"
#include "rtbvh/scene.hpp"
#include "rtbvh/stats.hpp"
#include "rtbvh/text.hpp"

namespace rtbvh {

/// Distance a reflected ray must travel before a hit counts.
inline constexpr double kSelfHitBias = 1e-6;

template <class Q>
concept ClosestHitQuery = requires(const Q& q, const Ray& r, RunStats& s) {
  { q.closest(r, s) } -> std::same_as<std::optional<Hit>>;
};

class BruteForceQuery {
 public:
  explicit BruteForceQuery(std::span<const Triangle> facets) : facets_(facets) {}
  std::optional<Hit> closest(const Ray& r, RunStats& stats) const {
    return brute_force_closest(facets_, r, stats);
  }

 private:
  std::span<const Triangle> facets_;
};

class BvhQuery {
 public:
  BvhQuery(const BvhTree& tree, std::span<const Triangle> facets) : tree_(&tree), facets_(facets) {}
  std::optional<Hit> closest(const Ray& r, RunStats& stats) const {
    return traverse_closest(*tree_, facets_, r, stats);
  }

 private:
  const BvhTree* tree_;
  std::span<const Triangle> facets_;
};

struct TraceConfig {
  int max_reflections = 2;
  Vec3 tx;
  Vec3 rx;
  double delta = 0.0;  // radians
  double path_length_limit = kInfinity;
  // Replace each captured path by the exact specular path through the same
  // facets (image construction); captures with no such unobstructed path
  // are dropped.
  bool refine_paths = false;

  void validate() const {
    if (max_reflections < 0) throw std::invalid_argument("max_reflections must be >= 0");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
    if (!(path_length_limit > 0.0)) throw std::invalid_argument("path_length_limit must be > 0");
  }
};

struct PathRecord {
  std::vector<std::uint32_t> facet_sequence;  // empty for the direct path
  std::vector<Vec3> vertices;                 // tx, bounce points..., capture point
  double unfolded_length = 0.0;               // m
  double miss_distance = 0.0;                 // m

  std::size_t bounce_count() const { return facet_sequence.size(); }
};

inline double reception_radius(double l, double delta) {
  if (!(l > 0.0)) throw std::invalid_argument("reception_radius: path length must be > 0");
  if (!(delta > 0.0)) throw std::invalid_argument("reception_radius: delta must be > 0");
  return l * delta / std::sqrt(3.0);
}

struct Capture {
  Vec3 closest_point;
  double miss_distance = 0.0;
  double l_at_capture = 0.0;
};

/// Capture test along a leg starting at `origin` with unit `direction` and
/// length `leg_length` (may be infinite). The perpendicular foot of the
/// receiver must fall on the leg, past its origin; `length_before` is the
/// path length already travelled when the leg starts.
inline std::optional<Capture> leg_capture(const Vec3& origin, const Vec3& direction,
                                          double leg_length, const Vec3& rx, double delta,
                                          double length_before = 0.0) {
  const double s = dot(rx - origin, direction);
  if (!(s > 0.0) || s > leg_length) return std::nullopt;
  Capture c;
  c.closest_point = origin + direction * s;
  c.miss_distance = distance(rx, c.closest_point);
  c.l_at_capture = length_before + s;
  if (c.miss_distance > reception_radius(c.l_at_capture, delta)) return std::nullopt;
  return c;
}

inline std::optional<Capture> segment_capture(const Vec3& seg_start, const Vec3& seg_end,
                                              const Vec3& rx, double delta,
                                              double length_before = 0.0) {
  const double len = distance(seg_start, seg_end);
  if (!(len > 0.0)) throw std::invalid_argument("segment_capture: zero-length segment");
  return leg_capture(seg_start, (seg_end - seg_start) / len, len, rx, delta, length_before);
}

/// Follows one launched ray through up to `cfg.max_reflections` specular
/// bounces and returns every capture made along the way.
template <ClosestHitQuery Q>
std::vector<PathRecord> trace_one(const Ray& launched, const Scene& scene, const Q& query,
                                  const TraceConfig& cfg, RunStats& stats) {
  std::vector<PathRecord> out;
  std::vector<std::uint32_t> sequence;
  std::vector<Vec3> vertices{launched.origin};
  double travelled = 0.0;
  Ray ray = launched;

  for (;;) {
    const double remaining = cfg.path_length_limit - travelled;
    if (!(remaining > 0.0)) break;
    ray.t_max = remaining;
    ++stats.legs_traced;
    const std::optional<Hit> hit = query.closest(ray, stats);
    const double leg = hit ? hit->t : remaining;

    if (auto cap = leg_capture(ray.origin, ray.direction, leg, cfg.rx, cfg.delta, travelled)) {
      PathRecord rec;
      rec.facet_sequence = sequence;
      rec.vertices = vertices;
      rec.vertices.push_back(cap->closest_point);
      rec.unfolded_length = travelled + distance(ray.origin, cap->closest_point);
      rec.miss_distance = cap->miss_distance;
      out.push_back(std::move(rec));
    }

    if (!hit || sequence.size() >= static_cast<std::size_t>(cfg.max_reflections)) break;
    const Vec3& normal = scene.normals[hit->facet_id];
    if (std::abs(dot(ray.direction, normal)) < kGrazingCosine) break;

    travelled += distance(ray.origin, hit->point);
    sequence.push_back(hit->facet_id);
    vertices.push_back(hit->point);
    ray = Ray{hit->point, normalize(reflect(ray.direction, normal)), kInfinity, kSelfHitBias};
  }
  return out;
}

namespace detail {

inline Vec3 mirror_point(const Vec3& p, const Vec3& plane_point, const Vec3& normal) {
  return p - normal * (2.0 * dot(p - plane_point, normal));
}

/// Barycentric containment with a small relative slack for points on edges.
inline bool inside_triangle(const Triangle& t, const Vec3& p) {
  const Vec3 e1 = t.edge1();
  const Vec3 e2 = t.edge2();
  const Vec3 w = p - t.v0;
  const double d11 = dot(e1, e1), d12 = dot(e1, e2), d22 = dot(e2, e2);
  const double w1 = dot(w, e1), w2 = dot(w, e2);
  const double den = d11 * d22 - d12 * d12;
  const double u = (d22 * w1 - d12 * w2) / den;
  const double v = (d11 * w2 - d12 * w1) / den;
  constexpr double slack = 1e-9;
  return u >= -slack && v >= -slack && u + v <= 1.0 + slack;
}

}  // namespace detail

/// Exact specular path from tx to rx through `facets`, by successive mirror
/// images of tx. Returns the vertex list (tx, bounce points, rx) when every
/// bounce point lies on its facet and no leg is obstructed.
template <ClosestHitQuery Q>
std::optional<std::vector<Vec3>> image_path(std::span<const std::uint32_t> facets, const Scene& scene,
                                            const Q& query, const Vec3& tx, const Vec3& rx,
                                            RunStats& stats) {
  const std::size_t k = facets.size();
  std::vector<Vec3> images{tx};
  for (std::uint32_t f : facets)
    images.push_back(detail::mirror_point(images.back(), scene.facets[f].v0, scene.normals[f]));

  std::vector<Vec3> verts(k + 2);
  verts.front() = tx;
  verts.back() = rx;
  Vec3 target = rx;
  for (std::size_t i = k; i >= 1; --i) {
    const std::uint32_t f = facets[i - 1];
    const Vec3& n = scene.normals[f];
    const Vec3 from = images[i];
    const double denom = dot(target - from, n);
    if (std::abs(denom) < 1e-15) return std::nullopt;
    const double s = dot(scene.facets[f].v0 - from, n) / denom;
    if (!(s > 0.0 && s < 1.0)) return std::nullopt;
    const Vec3 p = from + (target - from) * s;
    if (!detail::inside_triangle(scene.facets[f], p)) return std::nullopt;
    verts[i] = p;
    target = p;
  }

  for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
    const Vec3 d = verts[i + 1] - verts[i];
    const double len = length(d);
    if (!(len > kSelfHitBias)) return std::nullopt;
    Ray r{verts[i], d / len, len, i == 0 ? 0.0 : kSelfHitBias};
    if (auto h = query.closest(r, stats)) {
      const bool is_target = i < k && h->facet_id == facets[i];
      if (!is_target && h->t < len - kSelfHitBias) return std::nullopt;
    }
  }
  return verts;
}

/// Runs `trace_one` for every launch direction from `cfg.tx`, keeps the
/// capture with the smallest miss distance per facet sequence and returns
/// the survivors ordered by (bounce count, unfolded length, sequence).
template <ClosestHitQuery Q>
std::vector<PathRecord> trace_all(const LaunchSet& launch, const Scene& scene, const Q& query,
                                  const TraceConfig& cfg, RunStats& stats) {
  cfg.validate();
  std::map<std::vector<std::uint32_t>, PathRecord> best;
  for (const Vec3& dir : launch.directions) {
    ++stats.rays_launched;
    for (PathRecord& rec : trace_one(Ray{cfg.tx, dir}, scene, query, cfg, stats)) {
      auto it = best.find(rec.facet_sequence);
      if (it == best.end())
        best.emplace(rec.facet_sequence, std::move(rec));
      else if (rec.miss_distance < it->second.miss_distance)
        it->second = std::move(rec);
    }
  }

  std::vector<PathRecord> out;
  out.reserve(best.size());
  for (auto& [key, rec] : best) {
    if (cfg.refine_paths) {
      auto exact = image_path(rec.facet_sequence, scene, query, cfg.tx, cfg.rx, stats);
      if (!exact) continue;  // captured by the sphere only; no specular path exists
      rec.vertices = std::move(*exact);
      rec.unfolded_length = 0.0;
      for (std::size_t i = 0; i + 1 < rec.vertices.size(); ++i)
        rec.unfolded_length += distance(rec.vertices[i], rec.vertices[i + 1]);
      rec.miss_distance = 0.0;
    }
    out.push_back(std::move(rec));
  }
  std::sort(out.begin(), out.end(), [](const PathRecord& a, const PathRecord& b) {
    if (a.bounce_count() != b.bounce_count()) return a.bounce_count() < b.bounce_count();
    if (a.unfolded_length != b.unfolded_length) return a.unfolded_length < b.unfolded_length;
    return a.facet_sequence < b.facet_sequence;
  });
  stats.paths_captured += out.size();
  return out;
}

/// `path <bounce_count> <unfolded_length> <miss_distance> : <facet ids> : <vertices>`
/// with each vertex written as `x,y,z`.
inline void dump_paths(std::span<const PathRecord> paths, std::ostream& os) {
  for (const PathRecord& p : paths) {
    os << "path " << p.bounce_count() << ' ' << format_real(p.unfolded_length) << ' '
       << format_real(p.miss_distance) << " :";
    for (std::uint32_t f : p.facet_sequence) os << ' ' << f;
    os << " :";
    for (const Vec3& v : p.vertices) os << ' ' << format_vec(v, ',');
    os << '\n';
  }
}

}  // namespace rtbvh
