#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "rgc/geometry.hpp"

namespace rgc {

constexpr double miniball_tolerance = 1e-9;

namespace detail {

inline bool ball_covers(const Sphere& s, std::span<const double> p) {
  return dist(s.center, p) <= s.radius + miniball_tolerance;
}

// Smallest ball with all of `boundary` on its sphere. Affinely dependent
// boundary sets (possible with collinear input) fall back to the smallest
// enclosing circumsphere of their independent subsets.
inline Sphere boundary_ball(const PointSet& pts, const std::vector<std::uint32_t>& boundary) {
  Sphere s;
  if (boundary.empty()) {
    s.radius = -std::numeric_limits<double>::infinity();
    return s;
  }
  if (auto c = circumsphere(pts.subset(boundary))) return *c;
  const auto m = boundary.size();
  Sphere best;
  best.radius = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 1; mask < (1u << m) - 1; ++mask) {
    std::vector<std::uint32_t> sub;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1u) sub.push_back(boundary[i]);
    auto c = circumsphere(pts.subset(sub));
    if (!c || c->radius >= best.radius) continue;
    bool ok = true;
    for (auto b : boundary) ok = ok && ball_covers(*c, pts[b]);
    if (ok) best = *c;
  }
  return best;
}

inline Sphere welzl(const PointSet& pts, std::vector<std::uint32_t>& todo, std::size_t count,
                    std::vector<std::uint32_t>& boundary) {
  const auto d = static_cast<std::size_t>(pts.dim());
  if (count == 0 || boundary.size() == d + 1) return boundary_ball(pts, boundary);
  const auto p = todo[count - 1];
  Sphere s = welzl(pts, todo, count - 1, boundary);
  if (s.radius >= 0 && ball_covers(s, pts[p])) return s;
  boundary.push_back(p);
  s = welzl(pts, todo, count - 1, boundary);
  boundary.pop_back();
  return s;
}

}  // namespace detail

// Smallest enclosing ball of the given points (Welzl recursion).
inline Sphere miniball(const PointSet& pts) {
  require(!pts.empty(), errc::invalid_argument, "miniball of no points");
  std::vector<std::uint32_t> todo(pts.size());
  std::iota(todo.begin(), todo.end(), 0u);
  std::vector<std::uint32_t> boundary;
  return detail::welzl(pts, todo, todo.size(), boundary);
}

inline double miniball_radius(const PointSet& pts) { return miniball(pts).radius; }

}  // namespace rgc
