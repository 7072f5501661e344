// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "oracles.hpp"
#include "rtbvh/launch.hpp"

using namespace rtbvh;

TEST(Launch, CountsPerLevel) {
  const std::size_t expected[] = {12, 42, 162, 642, 2562, 10242};
  for (int level = 0; level <= 5; ++level) {
    const LaunchSet s = tessellate(level);
    EXPECT_EQ(s.directions.size(), expected[level]);
    EXPECT_EQ(launch_count(level), expected[level]);
    EXPECT_EQ(s.faces.size(), 20u << (2 * level));
    EXPECT_EQ(s.edges.size(), 30u << (2 * level));
    EXPECT_EQ(s.level, level);
  }
}

TEST(Launch, ClosedSurfaceEulerCharacteristic) {
  for (int level = 0; level <= 4; ++level) {
    const LaunchSet s = tessellate(level);
    const auto chi = static_cast<long>(s.directions.size()) - static_cast<long>(s.edges.size()) +
                     static_cast<long>(s.faces.size());
    EXPECT_EQ(chi, 2);
  }
}

TEST(Launch, DirectionsAreUnitAndDistinct) {
  const LaunchSet s = tessellate(3);
  std::set<std::tuple<long long, long long, long long>> seen;
  for (const Vec3& d : s.directions) {
    EXPECT_NEAR(length(d), 1.0, 1e-12);
    seen.insert({std::llround(d.x * 1e9), std::llround(d.y * 1e9), std::llround(d.z * 1e9)});
  }
  EXPECT_EQ(seen.size(), s.directions.size());
}

TEST(Launch, IcosahedronAngle) {
  const LaunchSet s = tessellate(0);
  EXPECT_NEAR(s.delta, std::acos(1.0 / std::sqrt(5.0)), 1e-12);
  EXPECT_NEAR(s.delta, 1.1071487177940904, 1e-12);
  for (const auto& [a, b] : s.edges) EXPECT_NEAR(dot(s.directions[a], s.directions[b]), 1.0 / std::sqrt(5.0), 1e-12);
}

TEST(Launch, FacesWoundOutward) {
  for (int level : {0, 2}) {
    const LaunchSet s = tessellate(level);
    for (const Face& f : s.faces) {
      const Vec3 n = cross(s.directions[f[1]] - s.directions[f[0]], s.directions[f[2]] - s.directions[f[0]]);
      EXPECT_GT(dot(n, s.directions[f[0]]), 0.0);
    }
  }
}

TEST(Launch, AngleShrinksWithLevel) {
  double previous = tessellate(0).delta;
  for (int level = 1; level <= 6; ++level) {
    const double d = tessellate(level).delta;
    EXPECT_LT(d, previous);
    previous = d;
  }
  const double level3 = tessellate(3).delta;
  const double scaled = std::acos(1.0 / std::sqrt(5.0)) / 8.0;
  EXPECT_NEAR(level3, scaled, 0.25 * scaled);
}

TEST(Launch, AntipodalSymmetry) {
  const LaunchSet s = tessellate(2);
  for (const Vec3& d : s.directions) {
    const Vec3 opposite = -d;
    const bool found = std::any_of(s.directions.begin(), s.directions.end(),
                                   [&](const Vec3& e) { return distance(e, opposite) < 1e-12; });
    EXPECT_TRUE(found);
  }
}

TEST(Launch, EveryDirectionIsWithinDeltaOfALaunchRay) {
  const LaunchSet s = tessellate(2);
  Xoshiro256 rng(5);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 u = oracle::random_unit(rng);
    double best = -1.0;
    for (const Vec3& d : s.directions) best = std::max(best, dot(u, d));
    EXPECT_LE(std::acos(std::min(best, 1.0)), s.delta);
  }
}

TEST(Launch, LevelOutOfRange) {
  EXPECT_THROW(tessellate(-1), std::out_of_range);
  EXPECT_THROW(tessellate(kMaxTessellationLevel + 1), std::out_of_range);
}

TEST(Launch, Deterministic) {
  const LaunchSet a = tessellate(3), b = tessellate(3);
  ASSERT_EQ(a.directions.size(), b.directions.size());
  for (std::size_t i = 0; i < a.directions.size(); ++i) EXPECT_EQ(a.directions[i], b.directions[i]);
}
