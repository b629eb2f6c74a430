#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rgc/pointset.hpp"

namespace rgc {

// Uniform bucket grid over a subset of a PointSet. Cell side is at least the
// requested size; it grows when the bounding box would need too many cells.
class SpatialGrid {
 public:
  SpatialGrid(const PointSet& pts, std::vector<std::uint32_t> ids, double cell)
      : pts_(&pts), d_(pts.dim()) {
    lo_.assign(d_, 0.0);
    dims_.assign(d_, 1);
    if (ids.empty()) return;
    std::vector<double> hi(d_, -std::numeric_limits<double>::infinity());
    lo_.assign(d_, std::numeric_limits<double>::infinity());
    for (auto i : ids)
      for (int c = 0; c < d_; ++c) {
        lo_[c] = std::min(lo_[c], pts[i][c]);
        hi[c] = std::max(hi[c], pts[i][c]);
      }
    const double max_cells = std::max<double>(64.0, 4.0 * ids.size());
    h_ = cell > 0 ? cell : 1.0;
    for (;;) {
      double total = 1;
      for (int c = 0; c < d_; ++c) total *= std::floor((hi[c] - lo_[c]) / h_) + 1;
      if (total <= max_cells) break;
      h_ *= 1.5;
    }
    std::size_t ncell = 1;
    for (int c = 0; c < d_; ++c) {
      dims_[c] = static_cast<long>(std::floor((hi[c] - lo_[c]) / h_)) + 1;
      ncell *= dims_[c];
    }
    start_.assign(ncell + 1, 0);
    std::vector<std::size_t> cell_of(ids.size());
    for (std::size_t j = 0; j < ids.size(); ++j) {
      cell_of[j] = cell_index((*pts_)[ids[j]]);
      ++start_[cell_of[j] + 1];
    }
    for (std::size_t c = 0; c < ncell; ++c) start_[c + 1] += start_[c];
    items_.resize(ids.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t j = 0; j < ids.size(); ++j) items_[fill[cell_of[j]]++] = ids[j];
  }

  double cell_size() const { return h_; }

  // Calls f(id) for every indexed point in cells meeting the box around q.
  template <class F>
  void for_each_candidate(std::span<const double> q, double radius, F&& f) const {
    if (items_.empty()) return;
    std::vector<long> a(d_), b(d_), cur(d_);
    for (int c = 0; c < d_; ++c) {
      a[c] = std::max(0L, static_cast<long>(std::floor((q[c] - radius - lo_[c]) / h_)));
      b[c] = std::min(dims_[c] - 1, static_cast<long>(std::floor((q[c] + radius - lo_[c]) / h_)));
      if (a[c] > b[c]) return;
    }
    cur = a;
    for (;;) {
      std::size_t idx = 0;
      for (int c = d_ - 1; c >= 0; --c) idx = idx * dims_[c] + cur[c];
      for (std::size_t s = start_[idx]; s < start_[idx + 1]; ++s) f(items_[s]);
      int c = 0;
      while (c < d_ && ++cur[c] > b[c]) {
        cur[c] = a[c];
        ++c;
      }
      if (c == d_) break;
    }
  }

  // Calls f(id) for indexed points within closed distance radius of q.
  template <class F>
  void for_each_within(std::span<const double> q, double radius, F&& f) const {
    const double r2 = radius * radius;
    for_each_candidate(q, radius, [&](std::uint32_t id) {
      if (dist2((*pts_)[id], q) <= r2) f(id);
    });
  }

  // True when some indexed point other than those rejected by skip lies at
  // distance strictly below radius.
  template <class Skip>
  bool any_strictly_within(std::span<const double> q, double radius, Skip&& skip) const {
    bool found = false;
    const double r2 = radius * radius;
    if (radius <= 0) return false;
    // Scan the cell holding q first, a cheap early exit for large balls.
    for_each_candidate(q, 0.0, [&](std::uint32_t id) {
      if (!found && !skip(id) && dist2((*pts_)[id], q) < r2) found = true;
    });
    if (found) return true;
    for_each_candidate(q, radius, [&](std::uint32_t id) {
      if (!found && !skip(id) && dist2((*pts_)[id], q) < r2) found = true;
    });
    return found;
  }

  // Distance from q to the nearest indexed point (infinity when empty).
  double nearest_distance(std::span<const double> q) const {
    if (items_.empty()) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    double extent = 0;
    for (int c = 0; c < d_; ++c) extent = std::max(extent, dims_[c] * h_);
    for (double radius = h_;; radius *= 2) {
      for_each_candidate(q, radius, [&](std::uint32_t id) {
        best = std::min(best, dist((*pts_)[id], q));
      });
      if (best <= radius) return best;
      if (radius > 2 * extent + outside(q)) return best;
    }
  }

 private:
  std::size_t cell_index(std::span<const double> p) const {
    std::size_t idx = 0;
    for (int c = d_ - 1; c >= 0; --c) {
      long k = static_cast<long>(std::floor((p[c] - lo_[c]) / h_));
      k = std::clamp(k, 0L, dims_[c] - 1);
      idx = idx * dims_[c] + k;
    }
    return idx;
  }
  double outside(std::span<const double> q) const {
    double s = 0;
    for (int c = 0; c < d_; ++c) s += std::abs(q[c] - lo_[c]);
    return s;
  }

  const PointSet* pts_;
  int d_;
  double h_ = 1.0;
  std::vector<double> lo_;
  std::vector<long> dims_;
  std::vector<std::size_t> start_;
  std::vector<std::uint32_t> items_;
};

}  // namespace rgc
