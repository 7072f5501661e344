// SPDX-License-Identifier: Apache-2.0
//
// Benchmark harness: run a full launch/trace/dedup pass under one
// acceleration strategy, compare strategies against a baseline, and sweep the
// number of launched rays.
//
// Counters are the primary metric; they are deterministic for fixed inputs.
// Timings are the median of `repeats` runs on a monotonic clock, with tree
// construction reported apart from tracing because the hybrid tree depends
// on the transmitter position and must be rebuilt for every source.
//
// CSV columns (one row per level x strategy), in order:
//   level, ray_count, strategy, build_time_s, trace_time_s, ray_aabb_tests,
//   ray_triangle_tests, nodes_visited, legs_traced, rays_launched,
//   paths_captured, node_count, leaf_count, max_depth, sibling_overlap_area,
//   speedup_percent, counter_improvement_percent, paths_only_baseline,
//   paths_only_strategy, paths_common
// Timing-derived columns are build_time_s, trace_time_s and speedup_percent.

#pragma once

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rtbvh/bvh.hpp"
#include "rtbvh/config.hpp"
#include "rtbvh/launch.hpp"
#include "rtbvh/scene.hpp"
#include "rtbvh/tracer.hpp"

namespace rtbvh {

struct RunOptions {
  int repeats = 1;
  bool refine_paths = false;
};

struct RunResult {
  Accelerator accelerator = Accelerator::Brute;
  std::vector<PathRecord> paths;
  RunStats stats;
  std::optional<TreeMetrics> tree;
};

inline Strategy strategy_of(Accelerator a) {
  switch (a) {
    case Accelerator::Median: return Strategy::Median;
    case Accelerator::Sah: return Strategy::Sah;
    case Accelerator::Hybrid: return Strategy::Hybrid;
    case Accelerator::Brute: break;
  }
  throw std::invalid_argument("brute force has no tree strategy");
}

inline TraceConfig trace_config(const RunConfig& rc, const LaunchSet& launch, bool refine) {
  TraceConfig tc;
  tc.max_reflections = rc.max_reflections;
  tc.tx = rc.tx;
  tc.rx = rc.rx;
  tc.delta = launch.delta;
  tc.path_length_limit = rc.path_length_limit;
  tc.refine_paths = refine;
  return tc;
}

namespace detail {

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

inline RunResult run(const Scene& scene, const RunConfig& config, Accelerator accel,
                     const RunOptions& opts = {}) {
  config.validate();
  if (opts.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  const LaunchSet launch = tessellate(config.tessellation_level);
  const TraceConfig tc = trace_config(config, launch, opts.refine_paths);

  RunResult result;
  result.accelerator = accel;
  std::vector<double> build_times;
  std::vector<double> trace_times;
  for (int rep = 0; rep < opts.repeats; ++rep) {
    RunStats stats;
    std::vector<PathRecord> paths;
    if (accel == Accelerator::Brute) {
      build_times.push_back(0.0);
      const auto t0 = std::chrono::steady_clock::now();
      paths = trace_all(launch, scene, BruteForceQuery(scene.facets), tc, stats);
      trace_times.push_back(detail::seconds_since(t0));
    } else {
      const auto t0 = std::chrono::steady_clock::now();
      const BvhTree tree = build(scene.facets, build_config(config, strategy_of(accel)));
      build_times.push_back(detail::seconds_since(t0));
      const auto t1 = std::chrono::steady_clock::now();
      paths = trace_all(launch, scene, BvhQuery(tree, scene.facets), tc, stats);
      trace_times.push_back(detail::seconds_since(t1));
      if (rep == 0) result.tree = tree_metrics(tree);
    }
    if (rep == 0) {
      result.paths = std::move(paths);
      result.stats = stats;
    }
  }
  result.stats.build_time = detail::median_of(build_times);
  result.stats.trace_time = detail::median_of(trace_times);
  return result;
}

struct PathDiff {
  std::vector<std::vector<std::uint32_t>> only_a;
  std::vector<std::vector<std::uint32_t>> only_b;
  std::size_t common = 0;
  double max_vertex_deviation = 0.0;  // over common sequences, m

  bool empty() const { return only_a.empty() && only_b.empty(); }
};

/// Diff keyed on facet sequences; common paths also report how far their
/// vertices drift apart.
inline PathDiff diff_paths(std::span<const PathRecord> a, std::span<const PathRecord> b) {
  std::map<std::vector<std::uint32_t>, const PathRecord*> in_b;
  for (const PathRecord& p : b) in_b.emplace(p.facet_sequence, &p);
  PathDiff d;
  std::set<std::vector<std::uint32_t>> matched;
  for (const PathRecord& p : a) {
    auto it = in_b.find(p.facet_sequence);
    if (it == in_b.end()) {
      d.only_a.push_back(p.facet_sequence);
      continue;
    }
    matched.insert(p.facet_sequence);
    ++d.common;
    const PathRecord& q = *it->second;
    if (p.vertices.size() != q.vertices.size()) {
      d.max_vertex_deviation = kInfinity;
      continue;
    }
    for (std::size_t i = 0; i < p.vertices.size(); ++i)
      d.max_vertex_deviation = std::max(d.max_vertex_deviation, distance(p.vertices[i], q.vertices[i]));
  }
  for (const PathRecord& p : b)
    if (!matched.count(p.facet_sequence)) d.only_b.push_back(p.facet_sequence);
  return d;
}

struct StrategyReport {
  RunResult result;
  double speedup_percent = 0.0;              // trace time vs baseline
  double counter_improvement_percent = 0.0;  // nodes visited + triangle tests vs baseline
  PathDiff diff;                             // baseline (a) vs this strategy (b)
};

struct ComparisonReport {
  int level = 0;
  std::size_t ray_count = 0;
  Accelerator baseline = Accelerator::Brute;
  std::vector<StrategyReport> entries;  // entries[0] is the baseline

  const StrategyReport& entry(Accelerator a) const {
    for (const auto& e : entries)
      if (e.result.accelerator == a) return e;
    throw std::out_of_range(std::string("strategy not in report: ") + to_string(a));
  }

  bool transparent(double vertex_tolerance = 1e-6) const {
    return std::all_of(entries.begin(), entries.end(), [&](const StrategyReport& e) {
      return e.diff.empty() && e.diff.max_vertex_deviation <= vertex_tolerance;
    });
  }
};

inline double percent_improvement(double baseline, double candidate) {
  return baseline > 0.0 ? 100.0 * (baseline - candidate) / baseline : 0.0;
}

/// Runs each strategy in order on the same inputs; the first one is the
/// baseline for speedups and path diffs.
inline ComparisonReport compare(const Scene& scene, const RunConfig& config,
                                std::span<const Accelerator> strategies, const RunOptions& opts = {3, false}) {
  if (strategies.size() < 2) throw std::invalid_argument("compare needs at least two strategies");
  ComparisonReport report;
  report.level = config.tessellation_level;
  report.ray_count = launch_count(config.tessellation_level);
  report.baseline = strategies.front();
  for (Accelerator a : strategies) {
    StrategyReport e;
    e.result = run(scene, config, a, opts);
    report.entries.push_back(std::move(e));
  }
  const RunResult& base = report.entries.front().result;
  for (StrategyReport& e : report.entries) {
    e.speedup_percent = percent_improvement(base.stats.trace_time, e.result.stats.trace_time);
    e.counter_improvement_percent =
        percent_improvement(static_cast<double>(base.stats.traversal_work()),
                            static_cast<double>(e.result.stats.traversal_work()));
    e.diff = diff_paths(base.paths, e.result.paths);
  }
  return report;
}

/// One comparison per tessellation level in [level_lo, level_hi], in
/// increasing ray count.
inline std::vector<ComparisonReport> sweep_rays(const Scene& scene, const RunConfig& config,
                                                int level_lo, int level_hi,
                                                std::span<const Accelerator> strategies,
                                                const RunOptions& opts = {3, false}) {
  if (level_lo < 0 || level_hi > kMaxTessellationLevel || level_lo > level_hi)
    throw std::invalid_argument("invalid tessellation level range");
  std::vector<ComparisonReport> rows;
  for (int level = level_lo; level <= level_hi; ++level) {
    RunConfig c = config;
    c.tessellation_level = level;
    rows.push_back(compare(scene, c, strategies, opts));
  }
  return rows;
}

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "level", "ray_count", "strategy", "build_time_s", "trace_time_s", "ray_aabb_tests",
      "ray_triangle_tests", "nodes_visited", "legs_traced", "rays_launched", "paths_captured",
      "node_count", "leaf_count", "max_depth", "sibling_overlap_area", "speedup_percent",
      "counter_improvement_percent", "paths_only_baseline", "paths_only_strategy", "paths_common"};
  return cols;
}

inline bool is_timing_column(const std::string& name) {
  return name == "build_time_s" || name == "trace_time_s" || name == "speedup_percent";
}

inline void write_csv(std::span<const ComparisonReport> reports, std::ostream& os) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const ComparisonReport& r : reports) {
    for (const StrategyReport& e : r.entries) {
      const RunStats& s = e.result.stats;
      const TreeMetrics m = e.result.tree.value_or(TreeMetrics{});
      os << r.level << ',' << r.ray_count << ',' << to_string(e.result.accelerator) << ','
         << format_real(s.build_time) << ',' << format_real(s.trace_time) << ','
         << s.ray_aabb_tests << ',' << s.ray_triangle_tests << ',' << s.nodes_visited << ','
         << s.legs_traced << ',' << s.rays_launched << ',' << s.paths_captured << ','
         << m.node_count << ',' << m.leaf_count << ',' << m.max_depth << ','
         << format_real(m.sibling_overlap_area) << ',' << format_real(e.speedup_percent) << ','
         << format_real(e.counter_improvement_percent) << ',' << e.diff.only_a.size() << ','
         << e.diff.only_b.size() << ',' << e.diff.common << '\n';
    }
  }
}

inline nlohmann::json to_json(const RunStats& s) {
  return {{"ray_aabb_tests", s.ray_aabb_tests}, {"ray_triangle_tests", s.ray_triangle_tests},
          {"nodes_visited", s.nodes_visited},   {"legs_traced", s.legs_traced},
          {"rays_launched", s.rays_launched},   {"paths_captured", s.paths_captured},
          {"build_time_s", s.build_time},       {"trace_time_s", s.trace_time}};
}

inline nlohmann::json to_json(const TreeMetrics& m) {
  return {{"node_count", m.node_count},
          {"leaf_count", m.leaf_count},
          {"forced_leaf_count", m.forced_leaf_count},
          {"max_depth", m.max_depth},
          {"mean_leaf_size", m.mean_leaf_size},
          {"sibling_overlap_area", m.sibling_overlap_area}};
}

inline nlohmann::json to_json(const ComparisonReport& r) {
  nlohmann::json j;
  j["level"] = r.level;
  j["ray_count"] = r.ray_count;
  j["baseline"] = to_string(r.baseline);
  j["transparent"] = r.transparent();
  for (const StrategyReport& e : r.entries) {
    nlohmann::json s;
    s["strategy"] = to_string(e.result.accelerator);
    s["stats"] = to_json(e.result.stats);
    if (e.result.tree) s["tree"] = to_json(*e.result.tree);
    s["speedup_percent"] = e.speedup_percent;
    s["counter_improvement_percent"] = e.counter_improvement_percent;
    s["path_diff"] = {{"only_baseline", e.diff.only_a},
                      {"only_strategy", e.diff.only_b},
                      {"common", e.diff.common},
                      {"max_vertex_deviation", e.diff.max_vertex_deviation}};
    s["path_count"] = e.result.paths.size();
    j["strategies"].push_back(std::move(s));
  }
  return j;
}

}  // namespace rtbvh
