#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "rgc/error.hpp"

namespace rgc {

// Flat row-major storage of points in R^d.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(int dim) : dim_(dim) {
    require(dim >= 1, errc::invalid_argument, "dimension must be positive");
  }
  PointSet(int dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
    require(dim >= 1, errc::invalid_argument, "dimension must be positive");
    require(coords_.size() % static_cast<std::size_t>(dim) == 0, errc::invalid_argument,
            "coordinate count is not a multiple of the dimension");
  }
  PointSet(int dim, std::initializer_list<std::initializer_list<double>> pts) : PointSet(dim) {
    for (const auto& p : pts) {
      require(p.size() == static_cast<std::size_t>(dim), errc::dimension_mismatch,
              "point has wrong dimension");
      coords_.insert(coords_.end(), p.begin(), p.end());
    }
  }

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ ? coords_.size() / dim_ : 0; }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }
  std::span<double> mutable_point(std::size_t i) noexcept {
    return {coords_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }

  void push_back(std::span<const double> p) {
    require(p.size() == static_cast<std::size_t>(dim_), errc::dimension_mismatch,
            "point has wrong dimension");
    coords_.insert(coords_.end(), p.begin(), p.end());
  }
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }

  const std::vector<double>& coords() const noexcept { return coords_; }

  PointSet subset(std::span<const std::uint32_t> ids) const {
    PointSet out(dim_);
    out.reserve(ids.size());
    for (auto i : ids) out.push_back((*this)[i]);
    return out;
  }

 private:
  int dim_ = 1;
  std::vector<double> coords_;
};

inline double dist2(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

inline double dist(std::span<const double> a, std::span<const double> b) noexcept {
  return std::sqrt(dist2(a, b));
}

inline double norm(std::span<const double> a) noexcept {
  double s = 0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

}  // namespace rgc
