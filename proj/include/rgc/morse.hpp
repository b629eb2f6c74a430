#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <vector>

#include "rgc/complexes.hpp"
#include "rgc/geometry.hpp"
#include "rgc/spatial_grid.hpp"

namespace rgc {

constexpr double ball_slack = 1e-12;
constexpr double critical_band = 1e-6;

struct CriticalPointRecord {
  int index = 0;
  std::vector<std::uint32_t> vertices;  // point indices into the configuration
  std::vector<double> center;
  double radius = 0;
  bool near_threshold = false;  // |radius - r| < 1e-6
};

struct CriticalPoints {
  double r = 0;
  std::vector<CriticalPointRecord> records;  // index >= 1, sorted by (index, vertices)
  std::vector<long long> counts;             // N_0 .. N_max_index
  long long degenerate = 0;                  // affinely dependent subsets skipped
  long long near_threshold = 0;

  long long operator[](std::size_t k) const { return k < counts.size() ? counts[k] : 0; }
};

namespace detail {

// Upper bound on the covering radius of `ids` over the window: every window
// location lies within the returned distance of some listed point. Cells of
// side h contribute (nearest distance from the centre) + h*sqrt(d)/2.
inline double covering_radius_bound(const PointSet& pts, const std::vector<std::uint32_t>& ids,
                                    const Window& w) {
  if (ids.empty()) return std::numeric_limits<double>::infinity();
  const int d = pts.dim();
  const double side = w.side();
  // About 3^d cells per point keeps the additive slack small.
  const auto per_axis = std::max<long>(
      1, static_cast<long>(std::ceil(3 * std::pow(static_cast<double>(ids.size()), 1.0 / d))));
  const double h = side / per_axis;
  SpatialGrid grid(pts, ids, h);
  std::vector<long> cur(d, 0);
  std::vector<double> q(d);
  double worst = 0;
  for (;;) {
    for (int c = 0; c < d; ++c) q[c] = -side / 2 + (cur[c] + 0.5) * h;
    worst = std::max(worst, grid.nearest_distance(q));
    int c = 0;
    while (c < d && ++cur[c] == per_axis) {
      cur[c] = 0;
      ++c;
    }
    if (c == d) break;
  }
  return worst + h * std::sqrt(static_cast<double>(d)) / 2;
}

// Closed-form circumcircle of a well-conditioned triangle: centre
// a + (|v|^2 (|u|^2 - u.v) u + |u|^2 (|v|^2 - u.v) v) / (2 |u x v|^2) and
// squared radius |u|^2 |v|^2 |w|^2 / (4 |u x v|^2). False for near-degenerate
// triangles, which are left to the general solver.
inline bool triangle_circumcircle(const PointSet& pts, std::span<const std::uint32_t> t,
                                  std::vector<double>& centre, double& radius2) {
  auto a = pts[t[0]], b = pts[t[1]], c = pts[t[2]];
  const int d = pts.dim();
  double uu = 0, vv = 0, uv = 0, ww = 0;
  for (int i = 0; i < d; ++i) {
    const double u = b[i] - a[i], v = c[i] - a[i], w = c[i] - b[i];
    uu += u * u;
    vv += v * v;
    uv += u * v;
    ww += w * w;
  }
  const double gram = uu * vv - uv * uv;
  if (!(gram > 1e-6 * uu * vv)) return false;
  const double su = vv * (uu - uv) / (2 * gram), sv = uu * (vv - uv) / (2 * gram);
  centre.resize(d);
  for (int i = 0; i < d; ++i) centre[i] = a[i] + su * (b[i] - a[i]) + sv * (c[i] - a[i]);
  radius2 = uu * vv * ww / (4 * gram);
  return true;
}

}  // namespace detail

// Index-k critical points (k >= 1) of the distance function to the window
// points with critical value <= r, plus N_0 = number of window points.
// Ball emptiness is tested against window points (interior) or all sampled
// points (ambient, margin >= 2r).
inline CriticalPoints critical_points(const PointConfiguration& cfg, double r, int max_index,
                                      CountMode mode = CountMode::interior) {
  require(r > 0, errc::invalid_argument, "radius must be positive");
  const int d = cfg.dim();
  require(max_index >= 0 && max_index <= d, errc::invalid_argument, "max_index must lie in [0, d]");
  const bool ambient = mode == CountMode::ambient;
  if (ambient)
    require(cfg.ambient_margin() >= 2 * r, errc::margin, "ambient critical points need margin >= 2r");
  const PointSet& pts = cfg.points();
  const auto& win = cfg.window_ids();
  CriticalPoints out;
  out.r = r;
  out.counts.assign(max_index + 1, 0);
  out.counts[0] = static_cast<long long>(win.size());
  if (max_index == 0 || win.size() < 2) return out;

  // Centres lie in the window (convex hull of window points), so no critical
  // value exceeds the covering radius of the window points.
  const double reach = std::min(r, detail::covering_radius_bound(pts, win, cfg.window()));
  GeometricGraph g = build_graph(pts, win, 2 * reach);
  std::vector<std::uint32_t> emptiness_ids = ambient ? cfg.all_ids() : win;
  SpatialGrid grid(pts, emptiness_ids, std::max(reach, 1e-9));

  std::vector<std::uint32_t> global;
  std::vector<double> centre;
  detail::expand_cliques(
      g, max_index, [](auto) { return true; },
      [&](std::span<const std::uint32_t> local) {
        if (local.size() < 2) return;
        global.assign(local.size(), 0);
        for (std::size_t i = 0; i < local.size(); ++i) global[i] = g.ids[local[i]];
        // Cheap rejections for edges and triangles; survivors take the general path.
        double rad2;
        if (local.size() == 2) {
          auto a = pts[global[0]], b = pts[global[1]];
          centre.resize(a.size());
          for (std::size_t i = 0; i < a.size(); ++i) centre[i] = (a[i] + b[i]) / 2;
          const double shrunk = dist(a, b) / 2 * (1 - 1e-7) - ball_slack;
          if (grid.any_strictly_within(centre, shrunk, [&](std::uint32_t id) {
                return id == global[0] || id == global[1];
              }))
            return;
        }
        if (local.size() == 3 && detail::triangle_circumcircle(pts, global, centre, rad2)) {
          if (rad2 > reach * reach * (1 + 1e-9)) return;
          const double shrunk = std::sqrt(rad2) * (1 - 1e-7) - ball_slack;
          if (grid.any_strictly_within(centre, shrunk, [&](std::uint32_t id) {
                return id == global[0] || id == global[1] || id == global[2];
              }))
            return;
        }
        PointSet sub = pts.subset(global);
        auto sph = circumsphere(sub);
        if (!sph) {
          ++out.degenerate;
          return;
        }
        if (sph->radius > reach) return;
        if (!in_open_convex_hull(sph->center, sub)) return;
        bool occupied = grid.any_strictly_within(sph->center, sph->radius - ball_slack, [&](std::uint32_t id) {
          return std::find(global.begin(), global.end(), id) != global.end();
        });
        if (occupied) return;
        CriticalPointRecord rec;
        rec.index = static_cast<int>(local.size()) - 1;
        rec.vertices = global;
        std::sort(rec.vertices.begin(), rec.vertices.end());
        rec.center = sph->center;
        rec.radius = sph->radius;
        rec.near_threshold = std::abs(sph->radius - r) < critical_band;
        out.near_threshold += rec.near_threshold;
        ++out.counts[rec.index];
        out.records.push_back(std::move(rec));
      });
  std::sort(out.records.begin(), out.records.end(), [](const auto& a, const auto& b) {
    if (a.index != b.index) return a.index < b.index;
    return a.vertices < b.vertices;
  });
  return out;
}

inline long long morse_euler(const CriticalPoints& cp) {
  long long chi = 0;
  for (std::size_t k = 0; k < cp.counts.size(); ++k) chi += (k % 2 ? -1 : 1) * cp.counts[k];
  return chi;
}

// Alternating critical count at value r. The matching Cech parameter is 2r.
inline long long morse_euler(const PointConfiguration& cfg, double r, CountMode mode = CountMode::interior) {
  return morse_euler(critical_points(cfg, r, cfg.dim(), mode));
}

inline void write_critical_points_csv(std::ostream& out, const CriticalPoints& cp) {
  auto old = out.precision(17);
  out << "index,radius,center,vertices\n";
  for (const auto& rec : cp.records) {
    out << rec.index << ',' << rec.radius;
    for (double c : rec.center) out << ',' << c;
    for (auto v : rec.vertices) out << ',' << v;
    out << '\n';
  }
  out.precision(old);
}

// Critical simplex counts C_0..C_max_dim of the vertex-order matching on the
// Rips complex at eps. Vertices are ranked by distance to the origin; a
// simplex s is matched with s + {y} when y is the lowest-ranked vertex below
// min(s) adjacent to all of s. Unmatched simplices are critical, and
// beta_k <= C_k.
inline std::vector<long long> discrete_morse_critical_simplices(const PointSet& pts, double eps,
                                                                int max_dim) {
  require(eps > 0, errc::invalid_argument, "eps must be positive");
  const std::size_t n = pts.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::vector<double> nrm(n);
  for (std::size_t i = 0; i < n; ++i) nrm[i] = norm(pts[i]);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return nrm[a] < nrm[b]; });
  for (std::size_t i = 1; i < n; ++i)
    require(nrm[order[i - 1]] < nrm[order[i]], errc::degenerate, "points with equal norms");
  PointSet ranked = pts.subset(order);
  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  auto g = build_graph(ranked, ids, eps);
  std::vector<long long> crit(max_dim + 1, 0);
  if (n == 0) return crit;

  // Lowest common neighbour of f below min(f), or -1.
  std::vector<std::uint32_t> common, tmp;
  auto lowest_cofacet_vertex = [&](std::span<const std::uint32_t> f) -> long {
    const auto& first = g.adj[f[0]];
    common.assign(first.begin(), std::lower_bound(first.begin(), first.end(), f[0]));
    for (std::size_t j = 1; j < f.size() && !common.empty(); ++j) {
      tmp.clear();
      std::set_intersection(common.begin(), common.end(), g.adj[f[j]].begin(), g.adj[f[j]].end(),
                            std::back_inserter(tmp));
      common.swap(tmp);
    }
    return common.empty() ? -1 : static_cast<long>(common.front());
  };

  detail::expand_cliques(g, max_dim, [](auto) { return true; }, [&](std::span<const std::uint32_t> f) {
    const int p = static_cast<int>(f.size()) - 1;
    if (p < max_dim && lowest_cofacet_vertex(f) >= 0) return;  // matched upward
    if (p >= 1 && lowest_cofacet_vertex(f.subspan(1)) == static_cast<long>(f[0])) return;
    ++crit[p];
  });
  return crit;
}

inline std::vector<long long> discrete_morse_critical_simplices(const PointConfiguration& cfg,
                                                                double eps, int max_dim) {
  return discrete_morse_critical_simplices(cfg.points().subset(cfg.window_ids()), eps, max_dim);
}

}  // namespace rgc
