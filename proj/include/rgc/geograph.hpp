#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "rgc/patterns.hpp"
#include "rgc/pointproc.hpp"
#include "rgc/spatial_grid.hpp"

namespace rgc {

enum class CountMode { interior, ambient };

struct GeometricGraph {
  double r = 0;
  std::vector<std::uint32_t> ids;               // local vertex -> point index
  std::vector<std::vector<std::uint32_t>> adj;  // sorted local neighbours

  std::size_t size() const noexcept { return ids.size(); }
  std::size_t edge_count() const {
    std::size_t s = 0;
    for (const auto& a : adj) s += a.size();
    return s / 2;
  }
  bool adjacent(std::uint32_t a, std::uint32_t b) const {
    return std::binary_search(adj[a].begin(), adj[a].end(), b);
  }
};

// Closed-ball adjacency (distance <= r) among the listed points.
inline GeometricGraph build_graph(const PointSet& pts, std::vector<std::uint32_t> ids, double r) {
  require(r >= 0, errc::invalid_argument, "radius must be >= 0");
  GeometricGraph g;
  g.r = r;
  g.ids = std::move(ids);
  g.adj.assign(g.ids.size(), {});
  if (g.ids.empty()) return g;
  std::vector<std::uint32_t> local(g.ids.size());
  std::iota(local.begin(), local.end(), 0u);
  // Grid over local indices through a view of the selected points.
  PointSet view = pts.subset(g.ids);
  SpatialGrid grid(view, local, r > 0 ? r : 1.0);
  const double r2 = r * r;
  for (std::uint32_t a = 0; a < local.size(); ++a) {
    grid.for_each_candidate(view[a], r, [&](std::uint32_t b) {
      if (b != a && dist2(view[a], view[b]) <= r2) g.adj[a].push_back(b);
    });
    std::sort(g.adj[a].begin(), g.adj[a].end());
  }
  return g;
}

inline GeometricGraph build_graph(const PointConfiguration& cfg, double r, bool use_ambient) {
  require(r > 0, errc::invalid_argument, "radius must be positive");
  if (use_ambient) {
    require(cfg.ambient_margin() >= r, errc::margin,
            "ambient graph needs margin >= r");
    return build_graph(cfg.points(), cfg.all_ids(), r);
  }
  return build_graph(cfg.points(), cfg.window_ids(), r);
}

inline SmallGraph induced_graph(const GeometricGraph& g, std::span<const std::uint32_t> sub) {
  SmallGraph s;
  s.k = static_cast<int>(sub.size());
  for (int a = 0; a < s.k; ++a)
    for (int b = a + 1; b < s.k; ++b)
      if (g.adjacent(sub[a], sub[b])) s.add_edge(a, b);
  return s;
}

// Enumerates every connected induced k-vertex subgraph exactly once (ESU).
template <class Visit>
void for_each_connected_subset(const GeometricGraph& g, int k, Visit&& visit) {
  if (k <= 0) return;
  const auto n = static_cast<std::uint32_t>(g.size());
  std::vector<std::uint32_t> sub;
  sub.reserve(k);
  std::vector<int> cover(n, 0);  // members of sub or their neighbours
  auto add = [&](std::uint32_t w, int delta) {
    cover[w] += delta;
    for (auto u : g.adj[w]) cover[u] += delta;
  };
  auto extend = [&](auto&& self, std::vector<std::uint32_t>& ext, std::uint32_t root) -> void {
    if (static_cast<int>(sub.size()) == k) {
      visit(std::span<const std::uint32_t>(sub));
      return;
    }
    while (!ext.empty()) {
      std::uint32_t w = ext.back();
      ext.pop_back();
      std::vector<std::uint32_t> next = ext;
      for (auto u : g.adj[w])
        if (u > root && cover[u] == 0) next.push_back(u);
      sub.push_back(w);
      add(w, +1);
      self(self, next, root);
      add(w, -1);
      sub.pop_back();
    }
  };
  for (std::uint32_t v = 0; v < n; ++v) {
    sub.assign(1, v);
    add(v, +1);
    std::vector<std::uint32_t> ext;
    for (auto u : g.adj[v])
      if (u > v) ext.push_back(u);
    extend(extend, ext, v);
    add(v, -1);
  }
}

inline int pattern_indicator(const PointSet& pts, double r, const GraphPattern& pattern) {
  require(pts.size() == static_cast<std::size_t>(pattern.k), errc::invalid_argument,
          "point count differs from pattern size");
  SmallGraph s;
  s.k = pattern.k;
  for (int a = 0; a < s.k; ++a)
    for (int b = a + 1; b < s.k; ++b)
      if (dist2(pts[a], pts[b]) <= r * r) s.add_edge(a, b);
  return isomorphic(s, pattern.graph()) ? 1 : 0;
}

// Number of k-subsets of the window points inducing a copy of the pattern.
inline std::uint64_t count_subgraphs(const GeometricGraph& g, const GraphPattern& pattern) {
  const auto target = pattern.graph();
  const int edges = target.edge_count();
  std::uint64_t count = 0;
  for_each_connected_subset(g, pattern.k, [&](std::span<const std::uint32_t> sub) {
    auto s = induced_graph(g, sub);
    if (s.edge_count() == edges && isomorphic(s, target)) ++count;
  });
  return count;
}

inline std::uint64_t count_subgraphs(const PointConfiguration& cfg, double r,
                                     const GraphPattern& pattern) {
  return count_subgraphs(build_graph(cfg, r, false), pattern);
}

// Union-find partition into components, each sorted, ordered by first vertex.
inline std::vector<std::vector<std::uint32_t>> connected_components(const GeometricGraph& g) {
  const auto n = static_cast<std::uint32_t>(g.size());
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::uint32_t a = 0; a < n; ++a)
    for (auto b : g.adj[a]) {
      auto ra = find(a), rb = find(b);
      if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
  std::vector<std::vector<std::uint32_t>> comps;
  std::vector<std::int64_t> slot(n, -1);
  for (std::uint32_t v = 0; v < n; ++v) {
    auto root = find(v);
    if (slot[root] < 0) {
      slot[root] = static_cast<std::int64_t>(comps.size());
      comps.emplace_back();
    }
    comps[slot[root]].push_back(v);
  }
  return comps;
}

// Components of the graph matching the pattern; with `window_only`, every
// member must be a window point of cfg (ambient counting).
inline std::uint64_t count_matching_components(const GeometricGraph& g,
                                               const GraphPattern& pattern,
                                               const PointConfiguration* window_only = nullptr) {
  const auto target = pattern.graph();
  std::uint64_t count = 0;
  for (const auto& comp : connected_components(g)) {
    if (static_cast<int>(comp.size()) != pattern.k) continue;
    if (window_only) {
      bool inside = std::all_of(comp.begin(), comp.end(),
                                [&](std::uint32_t v) { return window_only->in_window(g.ids[v]); });
      if (!inside) continue;
    }
    if (isomorphic(induced_graph(g, comp), target)) ++count;
  }
  return count;
}

// J_n (interior) or the boundary-aware variant (ambient).
inline std::uint64_t count_components(const PointConfiguration& cfg, double r,
                                      const GraphPattern& pattern, CountMode mode) {
  if (mode == CountMode::interior) return count_matching_components(build_graph(cfg, r, false), pattern);
  auto g = build_graph(cfg, r, true);
  return count_matching_components(g, pattern, &cfg);
}

}  // namespace rgc
