// SPDX-License-Identifier: Apache-2.0
//
// Binary bounding volume hierarchy over triangle indices.
//
// The tree is built top-down. A node becomes a leaf once it holds fewer
// facets than `BuildConfig::leaf_threshold`; otherwise it is split in two by
// one of three strategies:
//
//   Median  - median facet centroid along the longest centroid axis.
//   Sah     - cheapest binned candidate under the surface area heuristic
//               S(A)/S(C) k_A t_i + S(B)/S(C) k_B t_i + t_trav.
//   Hybrid  - cheapest binned candidate under the SAH blended with the
//             squared distance from the ray source to the child boxes,
//               alpha (SAH terms) + (1 - alpha) d^2 + t_trav,
//             where d^2 is the facet-count weighted mean of the squared
//             distances from the source to the two child box midpoints.
//
// Nodes are stored in a flat vector; prim_order is a permutation of facet
// indices and every leaf owns one contiguous range of it.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtbvh/geometry.hpp"
#include "rtbvh/stats.hpp"
#include "rtbvh/text.hpp"

namespace rtbvh {

enum class Strategy { Median, Sah, Hybrid };

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Median: return "median";
    case Strategy::Sah: return "sah";
    case Strategy::Hybrid: return "hybrid";
  }
  return "?";
}

struct BuildConfig {
  Strategy strategy = Strategy::Hybrid;
  double alpha = 0.5;
  double t_i = 1.0;
  double t_trav = 0.125;
  int leaf_threshold = 8;
  Vec3 source;  // only read by Strategy::Hybrid
  int bins = 16;
  bool normalize_distance = false;

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    if (!(t_i >= 0.0)) throw std::invalid_argument("t_i must be >= 0");
    if (!(t_trav >= 0.0)) throw std::invalid_argument("t_trav must be >= 0");
    if (leaf_threshold < 1) throw std::invalid_argument("leaf_threshold must be >= 1");
    if (bins < 2) throw std::invalid_argument("bins must be >= 2");
    if (!is_finite(source)) throw std::invalid_argument("source must be finite");
  }
};

struct SplitCandidate {
  int axis = 0;
  double boundary = 0.0;  // facets with centroid below go left
  std::size_t k_a = 0;
  std::size_t k_b = 0;
  Aabb box_a;
  Aabb box_b;
  double cost = 0.0;
  int bin = 0;  // last bin on the left side
};

/// Surface area heuristic for one split of parent box C into A and B.
inline double sah_cost(const Aabb& box_a, const Aabb& box_b, const Aabb& box_c, std::size_t k_a,
                       std::size_t k_b, double t_i, double t_trav) {
  const double s_c = surface_area(box_c);
  if (!(s_c > 0.0)) throw std::domain_error("degenerate parent box");
  const double terms = surface_area(box_a) / s_c * static_cast<double>(k_a) * t_i +
                       surface_area(box_b) / s_c * static_cast<double>(k_b) * t_i;
  return terms + t_trav;
}

/// Squared source distance term of the hybrid cost. `scene_diagonal` is
/// only used when `cfg.normalize_distance` is set.
inline double weighted_distance_sq(const Aabb& box_a, const Aabb& box_b, std::size_t k_a,
                                   std::size_t k_b, const BuildConfig& cfg,
                                   double scene_diagonal = 1.0) {
  const std::size_t k = k_a + k_b;
  if (k == 0) return 0.0;
  const Vec3 da = centroid(box_a) - cfg.source;
  const Vec3 db = centroid(box_b) - cfg.source;
  double d2 = (static_cast<double>(k_a) * dot(da, da) + static_cast<double>(k_b) * dot(db, db)) /
              static_cast<double>(k);
  if (cfg.normalize_distance && scene_diagonal > 0.0) d2 /= scene_diagonal * scene_diagonal;
  return d2;
}

inline double hybrid_cost(const Aabb& box_a, const Aabb& box_b, const Aabb& box_c,
                          std::size_t k_a, std::size_t k_b, const BuildConfig& cfg,
                          double scene_diagonal = 1.0) {
  const double s_c = surface_area(box_c);
  if (!(s_c > 0.0)) throw std::domain_error("degenerate parent box");
  // Same evaluation order as sah_cost so that alpha == 1 reproduces it bit for bit.
  const double terms = surface_area(box_a) / s_c * static_cast<double>(k_a) * cfg.t_i +
                       surface_area(box_b) / s_c * static_cast<double>(k_b) * cfg.t_i;
  const double d2 = weighted_distance_sq(box_a, box_b, k_a, k_b, cfg, scene_diagonal);
  return cfg.alpha * terms + (1.0 - cfg.alpha) * d2 + cfg.t_trav;
}

/// Cost of a split under the configured strategy (Median is scored by SAH).
inline double split_cost(const Aabb& box_a, const Aabb& box_b, const Aabb& box_c, std::size_t k_a,
                         std::size_t k_b, const BuildConfig& cfg, double scene_diagonal = 1.0) {
  if (cfg.strategy == Strategy::Hybrid)
    return hybrid_cost(box_a, box_b, box_c, k_a, k_b, cfg, scene_diagonal);
  return sah_cost(box_a, box_b, box_c, k_a, k_b, cfg.t_i, cfg.t_trav);
}

namespace detail {

struct CentroidBinning {
  double lo = 0.0;
  double scale = 0.0;  // bins / extent
  int bins = 0;

  CentroidBinning(double lo_, double hi_, int bins_)
      : lo(lo_), scale(static_cast<double>(bins_) / (hi_ - lo_)), bins(bins_) {}

  int operator()(double c) const {
    const int b = static_cast<int>((c - lo) * scale);
    return std::clamp(b, 0, bins - 1);
  }
};

inline Aabb centroid_bounds(std::span<const std::uint32_t> prims, std::span<const Vec3> centroids) {
  Aabb b;
  for (std::uint32_t p : prims) b.expand(centroids[p]);
  return b;
}

}  // namespace detail

/// Binned split candidates on all three axes.
///
/// Centroids are bucketed into `cfg.bins` equal-width bins over their extent
/// on each axis; every bin boundary with facets on both sides yields one
/// candidate with exact child boxes, counts and cost. Returns an empty
/// sequence when every centroid coincides.
inline std::vector<SplitCandidate> enumerate_splits(std::span<const std::uint32_t> prims,
                                                    std::span<const Aabb> boxes,
                                                    std::span<const Vec3> centroids,
                                                    const BuildConfig& cfg,
                                                    double scene_diagonal = 1.0) {
  std::vector<SplitCandidate> out;
  if (prims.size() < 2) return out;

  Aabb parent;
  for (std::uint32_t p : prims) parent = aabb_union(parent, boxes[p]);
  const Aabb cbounds = detail::centroid_bounds(prims, centroids);
  const int nbins = cfg.bins;

  std::vector<std::size_t> counts(nbins);
  std::vector<Aabb> bin_boxes(nbins);
  std::vector<std::size_t> right_counts(nbins);
  std::vector<Aabb> right_boxes(nbins);

  for (int axis = 0; axis < 3; ++axis) {
    const double lo = cbounds.min[axis];
    const double hi = cbounds.max[axis];
    if (!(hi > lo)) continue;
    const detail::CentroidBinning bin_of(lo, hi, nbins);

    std::fill(counts.begin(), counts.end(), 0);
    std::fill(bin_boxes.begin(), bin_boxes.end(), Aabb::empty());
    for (std::uint32_t p : prims) {
      const int b = bin_of(centroids[p][axis]);
      ++counts[b];
      bin_boxes[b] = aabb_union(bin_boxes[b], boxes[p]);
    }

    // right_*[i] accumulates bins i+1 .. nbins-1.
    std::size_t acc_count = 0;
    Aabb acc_box;
    for (int i = nbins - 1; i >= 1; --i) {
      acc_count += counts[i];
      acc_box = aabb_union(acc_box, bin_boxes[i]);
      right_counts[i - 1] = acc_count;
      right_boxes[i - 1] = acc_box;
    }

    std::size_t left_count = 0;
    Aabb left_box;
    for (int i = 0; i < nbins - 1; ++i) {
      left_count += counts[i];
      left_box = aabb_union(left_box, bin_boxes[i]);
      if (left_count == 0 || right_counts[i] == 0) continue;
      SplitCandidate c;
      c.axis = axis;
      c.bin = i;
      c.boundary = lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(nbins);
      c.k_a = left_count;
      c.k_b = right_counts[i];
      c.box_a = left_box;
      c.box_b = right_boxes[i];
      c.cost = split_cost(c.box_a, c.box_b, parent, c.k_a, c.k_b, cfg, scene_diagonal);
      out.push_back(c);
    }
  }
  return out;
}

/// Lowest-cost candidate; ties go to the lower axis, then the lower boundary.
inline std::optional<SplitCandidate> best_split(std::span<const SplitCandidate> candidates) {
  std::optional<SplitCandidate> best;
  for (const SplitCandidate& c : candidates) {
    if (!best || c.cost < best->cost ||
        (c.cost == best->cost &&
         (c.axis < best->axis || (c.axis == best->axis && c.boundary < best->boundary))))
      best = c;
  }
  return best;
}

struct BvhNode {
  Aabb box;
  bool leaf = true;
  bool forced = false;  // leaf created above the threshold because no split exists
  std::uint32_t first = 0;  // leaf: offset into prim_order
  std::uint32_t count = 0;  // leaf: facet count
  std::uint32_t left = 0;   // internal: child node indices
  std::uint32_t right = 0;
  std::uint32_t depth = 0;
  int split_axis = -1;
  double split_cost = std::numeric_limits<double>::quiet_NaN();
};

struct BvhTree {
  std::vector<BvhNode> nodes;
  std::vector<std::uint32_t> prim_order;
  BuildConfig config;
  // Box inflation applied during traversal so that hits reported by the
  // triangle test can never fall outside a node box through rounding.
  double traversal_pad = 0.0;

  const BvhNode& root() const { return nodes.front(); }
  std::span<const std::uint32_t> leaf_prims(const BvhNode& n) const {
    return std::span<const std::uint32_t>(prim_order).subspan(n.first, n.count);
  }
};

inline BvhTree build(std::span<const Triangle> facets, const BuildConfig& cfg) {
  if (facets.empty()) throw std::invalid_argument("empty scene");
  cfg.validate();

  const std::size_t n = facets.size();
  std::vector<Aabb> boxes(n);
  std::vector<Vec3> centroids(n);
  for (std::size_t i = 0; i < n; ++i) {
    boxes[i] = aabb_of(facets[i]);
    centroids[i] = centroid(boxes[i]);
  }

  BvhTree tree;
  tree.config = cfg;
  tree.prim_order.resize(n);
  std::iota(tree.prim_order.begin(), tree.prim_order.end(), 0u);
  tree.nodes.reserve(2 * n);

  const Aabb scene_box = aabb_of_triangles(facets);
  const double scene_diag = diagonal(scene_box);
  {
    const double reach = std::max({std::abs(scene_box.min.x), std::abs(scene_box.min.y),
                                   std::abs(scene_box.min.z), std::abs(scene_box.max.x),
                                   std::abs(scene_box.max.y), std::abs(scene_box.max.z)});
    tree.traversal_pad = 1e-9 * std::max(1.0, reach);
  }

  struct Task {
    std::uint32_t node;
    std::uint32_t begin;
    std::uint32_t end;
  };
  std::vector<Task> stack;
  tree.nodes.emplace_back();
  stack.push_back({0, 0, static_cast<std::uint32_t>(n)});

  auto make_leaf = [&](BvhNode& node, const Task& task, bool forced) {
    node.leaf = true;
    node.forced = forced;
    node.first = task.begin;
    node.count = task.end - task.begin;
  };

  while (!stack.empty()) {
    const Task task = stack.back();
    stack.pop_back();
    std::span<std::uint32_t> range(tree.prim_order.data() + task.begin, task.end - task.begin);

    Aabb box;
    for (std::uint32_t p : range) box = aabb_union(box, boxes[p]);
    tree.nodes[task.node].box = box;

    const std::size_t count = range.size();
    if (count < static_cast<std::size_t>(cfg.leaf_threshold)) {
      make_leaf(tree.nodes[task.node], task, false);
      continue;
    }
    const Aabb cbounds = detail::centroid_bounds(range, centroids);
    if (count < 2 || !(cbounds.extent().x > 0.0 || cbounds.extent().y > 0.0 ||
                       cbounds.extent().z > 0.0)) {
      make_leaf(tree.nodes[task.node], task, true);
      continue;
    }

    std::uint32_t mid = 0;
    int axis = -1;
    double cost = std::numeric_limits<double>::quiet_NaN();
    bool use_median = cfg.strategy == Strategy::Median;
    if (!use_median) {
      std::optional<SplitCandidate> split;
      try {
        split = best_split(enumerate_splits(range, boxes, centroids, cfg, scene_diag));
      } catch (const std::domain_error&) {
        // Zero-area parent: fall back to the median split below.
      }
      if (split) {
        const detail::CentroidBinning bin_of(cbounds.min[split->axis], cbounds.max[split->axis],
                                             cfg.bins);
        const int last = split->bin;
        const int a = split->axis;
        auto it = std::stable_partition(range.begin(), range.end(), [&](std::uint32_t p) {
          return bin_of(centroids[p][a]) <= last;
        });
        mid = static_cast<std::uint32_t>(it - range.begin());
        axis = a;
        cost = split->cost;
      } else {
        use_median = true;
      }
    }
    if (use_median) {
      axis = cbounds.longest_axis();
      std::sort(range.begin(), range.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double ca = centroids[a][axis];
        const double cb = centroids[b][axis];
        return ca < cb || (ca == cb && a < b);
      });
      mid = static_cast<std::uint32_t>(count / 2);
    }

    const auto left = static_cast<std::uint32_t>(tree.nodes.size());
    const auto right = left + 1;
    const std::uint32_t depth = tree.nodes[task.node].depth + 1;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    tree.nodes[left].depth = depth;
    tree.nodes[right].depth = depth;

    BvhNode& node = tree.nodes[task.node];
    node.leaf = false;
    node.left = left;
    node.right = right;
    node.split_axis = axis;
    node.split_cost = cost;

    stack.push_back({right, task.begin + mid, task.end});
    stack.push_back({left, task.begin, task.begin + mid});
  }
  return tree;
}

/// Linear scan over every facet; the baseline every accelerated query must
/// reproduce exactly.
inline std::optional<Hit> brute_force_closest(std::span<const Triangle> facets, const Ray& r,
                                              RunStats& stats) {
  std::optional<Hit> best;
  for (const Triangle& tri : facets) {
    ++stats.ray_triangle_tests;
    if (auto h = ray_triangle_intersect(r, tri); h && (!best || closer(*h, *best))) best = h;
  }
  return best;
}

/// Stack-based closest-hit traversal. Children are visited near-first by
/// entry distance and a subtree is skipped once its entry distance exceeds
/// the best hit found so far.
inline std::optional<Hit> traverse_closest(const BvhTree& tree, std::span<const Triangle> facets,
                                           const Ray& r, RunStats& stats) {
  std::optional<Hit> best;
  if (tree.nodes.empty()) return best;

  const Vec3 pad{tree.traversal_pad, tree.traversal_pad, tree.traversal_pad};
  auto test_box = [&](const BvhNode& node) {
    ++stats.ray_aabb_tests;
    return ray_aabb_intersect(r, Aabb{node.box.min - pad, node.box.max + pad});
  };

  struct Entry {
    std::uint32_t node;
    double t_enter;
  };
  Entry stack[128];
  std::vector<Entry> overflow;  // only touched by pathologically deep trees
  int top = 0;
  auto push = [&](Entry e) {
    if (top < 128)
      stack[top++] = e;
    else
      overflow.push_back(e);
  };
  auto pop = [&]() {
    if (!overflow.empty()) {
      Entry e = overflow.back();
      overflow.pop_back();
      return e;
    }
    return stack[--top];
  };

  if (auto root_hit = test_box(tree.root())) push({0, root_hit->t_enter});

  while (top > 0 || !overflow.empty()) {
    const Entry e = pop();
    if (best && e.t_enter > best->t) continue;
    const BvhNode& node = tree.nodes[e.node];
    ++stats.nodes_visited;

    if (node.leaf) {
      for (std::uint32_t p : tree.leaf_prims(node)) {
        ++stats.ray_triangle_tests;
        if (auto h = ray_triangle_intersect(r, facets[p]); h && (!best || closer(*h, *best)))
          best = h;
      }
      continue;
    }

    auto hit_l = test_box(tree.nodes[node.left]);
    auto hit_r = test_box(tree.nodes[node.right]);
    const double limit = best ? best->t : kInfinity;
    const bool use_l = hit_l && hit_l->t_enter <= limit;
    const bool use_r = hit_r && hit_r->t_enter <= limit;
    if (use_l && use_r) {
      if (hit_r->t_enter < hit_l->t_enter) {
        push({node.left, hit_l->t_enter});
        push({node.right, hit_r->t_enter});
      } else {
        push({node.right, hit_r->t_enter});
        push({node.left, hit_l->t_enter});
      }
    } else if (use_l) {
      push({node.left, hit_l->t_enter});
    } else if (use_r) {
      push({node.right, hit_r->t_enter});
    }
  }
  return best;
}

struct TreeMetrics {
  std::size_t node_count = 0;
  std::size_t leaf_count = 0;
  std::size_t forced_leaf_count = 0;
  std::size_t max_depth = 0;
  double mean_leaf_size = 0.0;
  double sibling_overlap_area = 0.0;  // m^2
};

inline TreeMetrics tree_metrics(const BvhTree& tree) {
  TreeMetrics m;
  m.node_count = tree.nodes.size();
  std::size_t leaf_prims = 0;
  for (const BvhNode& n : tree.nodes) {
    m.max_depth = std::max<std::size_t>(m.max_depth, n.depth);
    if (n.leaf) {
      ++m.leaf_count;
      if (n.forced) ++m.forced_leaf_count;
      leaf_prims += n.count;
    } else {
      const Aabb overlap = aabb_intersection(tree.nodes[n.left].box, tree.nodes[n.right].box);
      if (!overlap.is_empty()) m.sibling_overlap_area += surface_area(overlap);
    }
  }
  if (m.leaf_count > 0)
    m.mean_leaf_size = static_cast<double>(leaf_prims) / static_cast<double>(m.leaf_count);
  return m;
}

/// Checks partition, box nesting, containment and the leaf bound. Returns a
/// description of the first violation, or nothing when the tree is sound.
inline std::optional<std::string> check_tree(const BvhTree& tree, std::span<const Triangle> facets) {
  if (tree.nodes.empty()) return "tree has no nodes";
  std::vector<std::uint32_t> order = tree.prim_order;
  std::sort(order.begin(), order.end());
  if (order.size() != facets.size()) return "prim_order size differs from facet count";
  for (std::size_t i = 0; i < order.size(); ++i)
    if (order[i] != i) return "prim_order is not a permutation";

  std::vector<int> owner(facets.size(), 0);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const BvhNode& n = tree.nodes[i];
    const std::string where = "node " + std::to_string(i) + ": ";
    if (n.leaf) {
      if (n.first + static_cast<std::size_t>(n.count) > tree.prim_order.size())
        return where + "leaf range out of bounds";
      if (n.count == 0) return where + "empty leaf";
      if (n.count >= static_cast<std::uint32_t>(tree.config.leaf_threshold) && !n.forced)
        return where + "leaf exceeds threshold without being forced";
      for (std::uint32_t p : tree.leaf_prims(n)) {
        ++owner[p];
        if (!n.box.contains(aabb_of(facets[p]))) return where + "facet outside leaf box";
      }
    } else {
      if (n.left >= tree.nodes.size() || n.right >= tree.nodes.size())
        return where + "child index out of range";
      const Aabb u = aabb_union(tree.nodes[n.left].box, tree.nodes[n.right].box);
      if (!(u == n.box)) return where + "box is not the union of its children";
    }
  }
  for (std::size_t p = 0; p < owner.size(); ++p)
    if (owner[p] != 1) return "facet " + std::to_string(p) + " owned by " +
                              std::to_string(owner[p]) + " leaves";
  return std::nullopt;
}

/// Line-oriented dump, one node per line in storage order:
///   depth kind min.x min.y min.z max.x max.y max.z count_or_children
/// where kind is `leaf` (followed by the facet count) or `internal`
/// (followed by the two child node indices).
inline void dump_tree(const BvhTree& tree, std::ostream& os) {
  for (const BvhNode& n : tree.nodes) {
    os << n.depth << (n.leaf ? " leaf " : " internal ") << format_vec(n.box.min) << ' '
       << format_vec(n.box.max) << ' ';
    if (n.leaf)
      os << n.count;
    else
      os << n.left << ' ' << n.right;
    os << '\n';
  }
}

}  // namespace rtbvh
