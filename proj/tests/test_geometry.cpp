// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rtbvh/geometry.hpp"

using namespace rtbvh;

namespace {

const Aabb kUnit{{0, 0, 0}, {1, 1, 1}};

Triangle random_triangle(Xoshiro256& rng, double spread = 10.0) {
  const Vec3 c{rng.uniform(-spread, spread), rng.uniform(-spread, spread), rng.uniform(-spread, spread)};
  auto v = [&] { return c + Vec3{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)}; };
  return {v(), v(), v(), 0};
}

Aabb random_box(Xoshiro256& rng) {
  const Vec3 a{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
  const Vec3 b{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
  return {min(a, b), max(a, b)};
}

}  // namespace

TEST(AabbOfTriangles, SingleTriangle) {
  const std::vector<Triangle> t{{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, 0}};
  const Aabb b = aabb_of_triangles(t);
  EXPECT_EQ(b.min, (Vec3{0, 0, 0}));
  EXPECT_EQ(b.max, (Vec3{1, 1, 0}));
}

TEST(AabbOfTriangles, TwoTranslatedTriangles) {
  const Triangle a{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, 0};
  const Triangle b{{5, 0, 0}, {6, 0, 0}, {5, 1, 0}, 1};
  const Aabb box = aabb_of_triangles(std::vector<Triangle>{a, b});
  EXPECT_EQ(box.min.x, 0.0);
  EXPECT_EQ(box.max.x, 6.0);
}

TEST(AabbOfTriangles, MatchesRawVertexFold) {
  Xoshiro256 rng(7);
  std::vector<Triangle> tris;
  for (int i = 0; i < 100; ++i) tris.push_back(random_triangle(rng));
  const Aabb b = aabb_of_triangles(tris);
  const Aabb ref = oracle::fold_vertices(tris);
  EXPECT_EQ(b, ref);
  for (const Triangle& t : tris)
    for (const Vec3* v : {&t.v0, &t.v1, &t.v2}) EXPECT_TRUE(b.contains(*v));
}

TEST(AabbOfTriangles, EmptyInputIsAnError) {
  EXPECT_THROW(
      {
        try {
          aabb_of_triangles({});
        } catch (const std::invalid_argument& e) {
          EXPECT_STREQ(e.what(), "empty primitive set");
          throw;
        }
      },
      std::invalid_argument);
}

TEST(AabbUnion, IdentityAndDisjoint) {
  EXPECT_EQ(aabb_union(kUnit, kUnit), kUnit);
  const Aabb far{{2, 2, 2}, {3, 3, 3}};
  const Aabb u = aabb_union(kUnit, far);
  EXPECT_EQ(u.min, (Vec3{0, 0, 0}));
  EXPECT_EQ(u.max, (Vec3{3, 3, 3}));
  EXPECT_EQ(aabb_union(Aabb::empty(), far), far);
}

TEST(AabbUnion, CommutativeAssociativeAndGrowsArea) {
  Xoshiro256 rng(11);
  for (int i = 0; i < 500; ++i) {
    const Aabb a = random_box(rng), b = random_box(rng), c = random_box(rng);
    EXPECT_EQ(aabb_union(a, b), aabb_union(b, a));
    EXPECT_EQ(aabb_union(aabb_union(a, b), c), aabb_union(a, aabb_union(b, c)));
    EXPECT_GE(surface_area(aabb_union(a, b)), std::max(surface_area(a), surface_area(b)));
  }
}

TEST(SurfaceArea, Values) {
  EXPECT_DOUBLE_EQ(surface_area(kUnit), 6.0);
  EXPECT_DOUBLE_EQ(surface_area({{0, 0, 0}, {2, 3, 0}}), 12.0);
  EXPECT_DOUBLE_EQ(surface_area({{0, 0, 0}, {1, 2, 3}}), 22.0);
  EXPECT_EQ(surface_area({{0, 0, 0}, {5, 0, 0}}), 0.0);
  EXPECT_EQ(surface_area(Aabb::empty()), 0.0);
}

TEST(Centroid, MidpointAndCornerAverage) {
  EXPECT_EQ(centroid(kUnit), (Vec3{0.5, 0.5, 0.5}));
  const Vec3 p{3, -2, 7};
  EXPECT_EQ(centroid(Aabb{p, p}), p);
  Xoshiro256 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Aabb b = random_box(rng);
    const Vec3 c = centroid(b);
    const Vec3 ref = oracle::corner_average(b);
    EXPECT_NEAR(c.x, ref.x, 1e-12);
    EXPECT_NEAR(c.y, ref.y, 1e-12);
    EXPECT_NEAR(c.z, ref.z, 1e-12);
  }
}

TEST(RayAabb, EntryAndExit) {
  const auto hit = ray_aabb_intersect(Ray{{-2, .5, .5}, {1, 0, 0}}, kUnit);
  ASSERT_TRUE(hit);
  EXPECT_DOUBLE_EQ(hit->t_enter, 2.0);
  EXPECT_DOUBLE_EQ(hit->t_exit, 3.0);
}

TEST(RayAabb, OriginInsideEntersAtZero) {
  const auto hit = ray_aabb_intersect(Ray{{.5, .5, .5}, {0, 0, 1}}, kUnit);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->t_enter, 0.0);
  EXPECT_DOUBLE_EQ(hit->t_exit, 0.5);
}

TEST(RayAabb, Misses) {
  EXPECT_FALSE(ray_aabb_intersect(Ray{{-2, 5, .5}, {1, 0, 0}}, kUnit));
  // Box behind the origin.
  EXPECT_FALSE(ray_aabb_intersect(Ray{{2, .5, .5}, {1, 0, 0}}, kUnit));
  // Clipped by t_max.
  EXPECT_FALSE(ray_aabb_intersect(Ray{{-2, .5, .5}, {1, 0, 0}, 1.5}, kUnit));
}

TEST(RayAabb, OriginOnSlabPlaneWithZeroComponent) {
  // y component is zero and the origin lies exactly on the y = 0 face.
  const auto hit = ray_aabb_intersect(Ray{{-1, 0, .5}, {1, 0, 0}}, kUnit);
  ASSERT_TRUE(hit);
  EXPECT_DOUBLE_EQ(hit->t_enter, 1.0);
}

TEST(RayAabb, FlatBox) {
  const Aabb flat{{0, 0, 1}, {1, 1, 1}};
  const auto hit = ray_aabb_intersect(Ray{{.5, .5, 0}, {0, 0, 1}}, flat);
  ASSERT_TRUE(hit);
  EXPECT_DOUBLE_EQ(hit->t_enter, 1.0);
}

TEST(RayTriangle, HitsAtExpectedPoint) {
  const Triangle tri{{-1, -1, 0}, {1, -1, 0}, {0, 1, 0}, 42};
  const auto h = ray_triangle_intersect(Ray{{0, 0, -1}, {0, 0, 1}}, tri);
  ASSERT_TRUE(h);
  EXPECT_DOUBLE_EQ(h->t, 1.0);
  EXPECT_NEAR(h->point.x, 0.0, 1e-15);
  EXPECT_NEAR(h->point.y, 0.0, 1e-15);
  EXPECT_NEAR(h->point.z, 0.0, 1e-15);
  EXPECT_EQ(h->facet_id, 42u);
  EXPECT_NEAR(h->barycentric[0] + h->barycentric[1] + h->barycentric[2], 1.0, 1e-9);
}

TEST(RayTriangle, ClippedByTMax) {
  const Triangle tri{{-1, -1, 5}, {1, -1, 5}, {0, 1, 5}, 0};
  EXPECT_FALSE(ray_triangle_intersect(Ray{{0, 0, -1}, {0, 0, 1}, 2.0}, tri));
}

TEST(RayTriangle, ParallelAndBehindMiss) {
  const Triangle tri{{-1, -1, 0}, {1, -1, 0}, {0, 1, 0}, 0};
  EXPECT_FALSE(ray_triangle_intersect(Ray{{0, 0, 1}, {1, 0, 0}}, tri));
  EXPECT_FALSE(ray_triangle_intersect(Ray{{0, 0, 1}, {0, 0, 1}}, tri));
}

TEST(RayTriangle, EdgeCountsAsHit) {
  const Triangle tri{{0, 0, 0}, {2, 0, 0}, {0, 2, 0}, 0};
  EXPECT_TRUE(ray_triangle_intersect(Ray{{1, 0, -1}, {0, 0, 1}}, tri));
  EXPECT_TRUE(ray_triangle_intersect(Ray{{0, 0, -1}, {0, 0, 1}}, tri));
}

TEST(RayTriangle, AgreesWithPlaneClipOracle) {
  Xoshiro256 rng(2024);
  int hits = 0;
  int compared = 0;
  for (int i = 0; i < 10000; ++i) {
    const Triangle tri = random_triangle(rng, 3.0);
    if (tri.area() < 1e-3) continue;
    const Vec3 o{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
    // Aim near the triangle so roughly half of the rays hit.
    const Vec3 target = (tri.v0 + tri.v1 + tri.v2) / 3.0 +
                        Vec3{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Vec3 d = normalize(target - o);
    const Ray r{o, d};
    const auto got = ray_triangle_intersect(r, tri);
    const auto ref = oracle::plane_then_barycentric(o, d, tri.v0, tri.v1, tri.v2);

    if (ref) {
      // Skip rays that graze an edge or the plane within rounding distance.
      const double margin = std::min({ref->bary[0], ref->bary[1], ref->bary[2]});
      if (std::abs(margin) < 1e-9) continue;
    }
    const bool ref_hit = ref && ref->t > 0.0 && ref->bary[0] > 0 && ref->bary[1] > 0 && ref->bary[2] > 0;
    ++compared;
    ASSERT_EQ(got.has_value(), ref_hit) << "pair " << i;
    if (got) {
      ++hits;
      EXPECT_NEAR(got->t, ref->t, 1e-7 * std::abs(ref->t));
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(got->barycentric[k], ref->bary[k], 1e-7);
      const Vec3 recon = tri.v0 * got->barycentric[0] + tri.v1 * got->barycentric[1] +
                         tri.v2 * got->barycentric[2];
      EXPECT_LT(distance(recon, got->point), 1e-7);
    }
  }
  EXPECT_GT(compared, 9000);
  EXPECT_GT(hits, 500);
}

TEST(RayTriangle, BoxTestIsConservative) {
  Xoshiro256 rng(99);
  for (int i = 0; i < 5000; ++i) {
    const Triangle tri = random_triangle(rng, 3.0);
    if (tri.area() < 1e-3) continue;
    const Vec3 o{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const Ray r{o, normalize((tri.v0 + tri.v1 + tri.v2) / 3.0 - o +
                             Vec3{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)})};
    const auto h = ray_triangle_intersect(r, tri);
    if (!h) continue;
    const auto box = ray_aabb_intersect(r, aabb_of(tri));
    ASSERT_TRUE(box) << "pair " << i;
    EXPECT_LE(box->t_enter, h->t * (1 + 1e-12));
    EXPECT_GE(box->t_exit, h->t * (1 - 1e-12));
  }
}

TEST(Reflect, NormalIncidenceAndMirror) {
  EXPECT_EQ(reflect({0, 0, -1}, {0, 0, 1}), (Vec3{0, 0, 1}));
  const double s = 1.0 / std::sqrt(2.0);
  const Vec3 out = reflect({s, 0, -s}, {0, 0, 1});
  EXPECT_DOUBLE_EQ(out.x, s);
  EXPECT_DOUBLE_EQ(out.y, 0.0);
  EXPECT_DOUBLE_EQ(out.z, s);
}

TEST(Reflect, PreservesLengthAndAngleAndIsInvolution) {
  Xoshiro256 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 d = oracle::random_unit(rng);
    const Vec3 n = oracle::random_unit(rng);
    const Vec3 out = reflect(d, n);
    EXPECT_NEAR(length(out), 1.0, 1e-9);
    EXPECT_NEAR(dot(out, n), -dot(d, n), 1e-9);
    const Vec3 back = reflect(out, n);
    EXPECT_NEAR(distance(back, d), 0.0, 1e-9);
  }
}
