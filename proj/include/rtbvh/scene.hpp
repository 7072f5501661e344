// SPDX-License-Identifier: Apache-2.0
//
// Scene ingestion: triangle meshes from a minimal Wavefront OBJ subset,
// deterministic synthetic scenes, and facet normals. Units are meters.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rtbvh/geometry.hpp"
#include "rtbvh/prng.hpp"
#include "rtbvh/text.hpp"

namespace rtbvh {

class SceneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Facets are stored in id order: `facets[i].facet_id == i`.
struct Scene {
  std::string name;
  std::vector<Triangle> facets;
  std::vector<Vec3> normals;  // unit, (v1 - v0) x (v2 - v0)
  Aabb bounds;
  std::size_t dropped_degenerate = 0;

  std::span<const Triangle> triangles() const { return facets; }
};

/// Validates `tris`, drops degenerate ones and numbers the survivors in
/// order.
inline Scene make_scene(std::vector<Triangle> tris, std::string name) {
  Scene s;
  s.name = std::move(name);
  s.facets.reserve(tris.size());
  for (Triangle& t : tris) {
    if (!is_finite(t.v0) || !is_finite(t.v1) || !is_finite(t.v2))
      throw SceneError("non-finite vertex coordinate");
    if (!(t.area() >= kDegenerateArea)) {
      ++s.dropped_degenerate;
      continue;
    }
    t.facet_id = static_cast<std::uint32_t>(s.facets.size());
    s.facets.push_back(t);
    s.normals.push_back(t.unit_normal());
  }
  if (s.facets.empty()) throw SceneError("scene has no non-degenerate facets");
  s.bounds = aabb_of_triangles(s.facets);
  return s;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  std::string tmp(s);
  char* end = nullptr;
  out = std::strtod(tmp.c_str(), &end);
  return !tmp.empty() && end == tmp.c_str() + tmp.size() && std::isfinite(out);
}

inline bool parse_long(std::string_view s, long long& out) {
  std::string tmp(s);
  char* end = nullptr;
  out = std::strtoll(tmp.c_str(), &end, 10);
  return !tmp.empty() && end == tmp.c_str() + tmp.size();
}

}  // namespace detail

/// Reads `v x y z` and `f i j k ...` lines. Faces with more than three
/// vertices are fan-triangulated around their first vertex. Face references
/// may carry `/vt/vn` suffixes, which are ignored, and negative indices count
/// back from the most recent vertex. Every other statement is skipped.
inline Scene load_mesh(std::istream& in, std::string name = "mesh") {
  std::vector<Vec3> verts;
  std::vector<Triangle> tris;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> SceneError {
    return SceneError("line " + std::to_string(line_no) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    const auto tokens = detail::split_ws(detail::trim(body));
    if (tokens.empty()) continue;

    if (tokens[0] == "v") {
      if (tokens.size() < 4 || tokens.size() > 5) throw fail("vertex needs 3 coordinates");
      Vec3 p;
      for (int a = 0; a < 3; ++a)
        if (!detail::parse_double(tokens[1 + a], p[a])) throw fail("malformed vertex coordinate");
      verts.push_back(p);
    } else if (tokens[0] == "f") {
      if (tokens.size() < 4) throw fail("face needs at least 3 vertices");
      std::vector<std::size_t> idx;
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        std::string_view ref = tokens[i].substr(0, tokens[i].find('/'));
        long long k = 0;
        if (!detail::parse_long(ref, k) || k == 0) throw fail("malformed face index");
        const long long resolved = k > 0 ? k - 1 : static_cast<long long>(verts.size()) + k;
        if (resolved < 0 || resolved >= static_cast<long long>(verts.size()))
          throw fail("face index " + std::string(ref) + " out of range");
        idx.push_back(static_cast<std::size_t>(resolved));
      }
      for (std::size_t i = 1; i + 1 < idx.size(); ++i)
        tris.push_back({verts[idx[0]], verts[idx[i]], verts[idx[i + 1]], 0});
    }
  }
  if (tris.empty()) throw SceneError("no facets in mesh");
  return make_scene(std::move(tris), std::move(name));
}

inline Scene load_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneError("cannot open " + path);
  try {
    return load_mesh(in, path);
  } catch (const SceneError& e) {
    throw SceneError(path + ": " + e.what());
  }
}

/// Writes the scene back in the same OBJ subset, three unshared vertices per
/// facet, so that reloading reproduces the facet list exactly.
inline void write_mesh(const Scene& scene, std::ostream& os) {
  os << "# " << scene.name << ", " << scene.facets.size() << " facets\n";
  for (const Triangle& t : scene.facets)
    for (const Vec3* v : {&t.v0, &t.v1, &t.v2}) os << "v " << format_vec(*v) << '\n';
  for (std::size_t i = 0; i < scene.facets.size(); ++i)
    os << "f " << 3 * i + 1 << ' ' << 3 * i + 2 << ' ' << 3 * i + 3 << '\n';
}

// ---------------------------------------------------------------------------
// Synthetic scenes

enum class SceneKind { RandomBoxes, TwoClusters, Corridor, SkewedCity };

inline const char* to_string(SceneKind k) {
  switch (k) {
    case SceneKind::RandomBoxes: return "random-boxes";
    case SceneKind::TwoClusters: return "two-clusters";
    case SceneKind::Corridor: return "corridor";
    case SceneKind::SkewedCity: return "skewed-city";
  }
  return "?";
}

inline SceneKind parse_scene_kind(std::string_view s) {
  if (s == "random-boxes" || s == "RandomBoxes") return SceneKind::RandomBoxes;
  if (s == "two-clusters" || s == "TwoClusters") return SceneKind::TwoClusters;
  if (s == "corridor" || s == "Corridor") return SceneKind::Corridor;
  if (s == "skewed-city" || s == "SkewedCity") return SceneKind::SkewedCity;
  throw SceneError("unknown scene kind '" + std::string(s) + "'");
}

inline std::size_t min_facet_budget(SceneKind k) { return k == SceneKind::TwoClusters ? 8 : 12; }

namespace detail {

/// Closed box as 12 triangles, or 10 when the floor face is omitted.
inline void add_box(std::vector<Triangle>& out, const Vec3& lo, const Vec3& hi, bool with_floor) {
  const Vec3 c[8] = {{lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z},
                     {lo.x, hi.y, lo.z}, {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z},
                     {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z}};
  auto quad = [&](int a, int b, int d, int e) {
    out.push_back({c[a], c[b], c[d], 0});
    out.push_back({c[a], c[d], c[e], 0});
  };
  quad(0, 1, 5, 4);  // y = lo
  quad(1, 2, 6, 5);  // x = hi
  quad(2, 3, 7, 6);  // y = hi
  quad(3, 0, 4, 7);  // x = lo
  quad(4, 5, 6, 7);  // roof
  if (with_floor) quad(0, 3, 2, 1);
}

/// Axis-aligned rectangle in the plane `axis = offset`, split into an
/// nu x nv grid of quads (two triangles each).
inline void add_wall(std::vector<Triangle>& out, int axis, double offset, double u0, double u1,
                     double v0, double v1, std::size_t nu, std::size_t nv) {
  const int ua = (axis + 1) % 3;
  const int va = (axis + 2) % 3;
  auto point = [&](double u, double v) {
    Vec3 p;
    p[axis] = offset;
    p[ua] = u;
    p[va] = v;
    return p;
  };
  for (std::size_t j = 0; j < nv; ++j) {
    for (std::size_t i = 0; i < nu; ++i) {
      const double ua0 = u0 + (u1 - u0) * static_cast<double>(i) / static_cast<double>(nu);
      const double ua1 = u0 + (u1 - u0) * static_cast<double>(i + 1) / static_cast<double>(nu);
      const double va0 = v0 + (v1 - v0) * static_cast<double>(j) / static_cast<double>(nv);
      const double va1 = v0 + (v1 - v0) * static_cast<double>(j + 1) / static_cast<double>(nv);
      out.push_back({point(ua0, va0), point(ua1, va0), point(ua1, va1), 0});
      out.push_back({point(ua0, va0), point(ua1, va1), point(ua0, va1), 0});
    }
  }
}

}  // namespace detail

/// Corridor geometry: walls at y = 0 and y = kCorridorWidth spanning
/// x in [0, kCorridorLength], z in [0, kCorridorHeight].
inline constexpr double kCorridorLength = 40.0;
inline constexpr double kCorridorWidth = 4.0;
inline constexpr double kCorridorHeight = 3.0;

/// Extent of the SkewedCity footprint; buildings crowd the (0, 0) corner.
inline constexpr double kCityExtent = 200.0;

/// Deterministic stand-in scenes. The facet count never exceeds
/// `facet_budget`.
///
///   RandomBoxes  closed boxes scattered over a 100 m x 100 m lot.
///   TwoClusters  two tight groups of small triangles around x = 0 and x = 100.
///   Corridor     two parallel walls, the budget split evenly between them.
///   SkewedCity   roofed buildings whose distance from the (0, 0) corner is
///                quadratically skewed towards it.
inline Scene synth_scene(SceneKind kind, std::uint64_t seed, std::size_t facet_budget) {
  if (facet_budget < min_facet_budget(kind))
    throw SceneError(std::string("facet budget too small for ") + to_string(kind) + " (minimum " +
                     std::to_string(min_facet_budget(kind)) + ")");
  Xoshiro256 rng(seed);
  std::vector<Triangle> tris;
  tris.reserve(facet_budget);

  switch (kind) {
    case SceneKind::RandomBoxes: {
      const std::size_t boxes = facet_budget / 12;
      for (std::size_t i = 0; i < boxes; ++i) {
        const double x = rng.uniform(0.0, 100.0);
        const double y = rng.uniform(0.0, 100.0);
        const double sx = rng.uniform(1.0, 10.0);
        const double sy = rng.uniform(1.0, 10.0);
        const double h = rng.uniform(1.0, 20.0);
        detail::add_box(tris, {x, y, 0.0}, {x + sx, y + sy, h}, true);
      }
      break;
    }
    case SceneKind::TwoClusters: {
      const std::size_t per_cluster = facet_budget / 2;
      for (double cx : {0.0, 100.0}) {
        for (std::size_t i = 0; i < per_cluster; ++i) {
          Triangle t{};
          do {
            const Vec3 c{cx + rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
            auto jitter = [&] {
              return c + Vec3{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
            };
            t = {jitter(), jitter(), jitter(), 0};
          } while (t.area() < 1e-3);
          tris.push_back(t);
        }
      }
      break;
    }
    case SceneKind::Corridor: {
      const std::size_t quads = facet_budget / 4;  // per wall
      const auto rows = static_cast<std::size_t>(std::max(
          1.0, std::round(std::sqrt(static_cast<double>(quads) * kCorridorHeight / kCorridorLength))));
      const std::size_t cols = std::max<std::size_t>(1, quads / rows);
      for (double y : {0.0, kCorridorWidth})
        detail::add_wall(tris, 1, y, 0.0, kCorridorHeight, 0.0, kCorridorLength, rows, cols);
      break;
    }
    case SceneKind::SkewedCity: {
      const std::size_t buildings = facet_budget / 10;
      for (std::size_t i = 0; i < buildings; ++i) {
        const double u = rng.uniform();
        const double r = 10.0 + (kCityExtent - 10.0) * u * u;
        const double theta = rng.uniform(0.0, std::numbers::pi / 2.0);
        const double cx = std::min(r * std::cos(theta), kCityExtent - 4.0);
        const double cy = std::min(r * std::sin(theta), kCityExtent - 4.0);
        const double hx = rng.uniform(1.0, 4.0);
        const double hy = rng.uniform(1.0, 4.0);
        const double h = rng.uniform(3.0, 25.0);
        detail::add_box(tris, {cx - hx, cy - hy, 0.0}, {cx + hx, cy + hy, h}, false);
      }
      break;
    }
  }
  return make_scene(std::move(tris), std::string("synth:") + to_string(kind) + ":" +
                                         std::to_string(seed) + ":" + std::to_string(facet_budget));
}

/// Transmitter position that suits each synthetic layout (outside all
/// geometry; at the dense corner for SkewedCity).
inline Vec3 synth_default_tx(SceneKind kind) {
  switch (kind) {
    case SceneKind::RandomBoxes: return {50.0, 50.0, 25.0};
    case SceneKind::TwoClusters: return {0.0, 0.0, 6.0};
    case SceneKind::Corridor: return {2.0, 2.0, 1.5};
    case SceneKind::SkewedCity: return {2.0, 2.0, 1.5};
  }
  return {};
}

inline Vec3 synth_default_rx(SceneKind kind) {
  switch (kind) {
    case SceneKind::RandomBoxes: return {20.0, 80.0, 22.0};
    case SceneKind::TwoClusters: return {50.0, 0.0, 6.0};
    case SceneKind::Corridor: return {30.0, 2.5, 1.2};
    case SceneKind::SkewedCity: return {5.0, 2.0, 1.5};
  }
  return {};
}

}  // namespace rtbvh
