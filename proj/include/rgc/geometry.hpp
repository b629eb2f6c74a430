#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rgc/pointset.hpp"

namespace rgc {

struct Sphere {
  std::vector<double> center;
  double radius = 0;
};

constexpr double affine_tolerance = 1e-9;

namespace detail {

// Columns p_i - p_0, i = 1..k.
inline Eigen::MatrixXd edge_matrix(const PointSet& pts) {
  const int d = pts.dim();
  const auto k = static_cast<Eigen::Index>(pts.size()) - 1;
  Eigen::MatrixXd v(d, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (int c = 0; c < d; ++c) v(c, i) = pts[i + 1][c] - pts[0][c];
  return v;
}

inline bool affinely_independent(const Eigen::MatrixXd& v) {
  if (v.cols() == 0) return true;
  if (v.cols() > v.rows()) return false;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v);
  const auto& s = svd.singularValues();
  return s(s.size() - 1) > affine_tolerance * std::max(1.0, s(0));
}

}  // namespace detail

inline bool affinely_independent(const PointSet& pts) {
  if (pts.size() <= 1) return true;
  return detail::affinely_independent(detail::edge_matrix(pts));
}

// Sphere through all points with centre in their affine hull; empty when the
// points are affinely dependent.
inline std::optional<Sphere> circumsphere(const PointSet& pts) {
  require(!pts.empty(), errc::invalid_argument, "circumsphere of no points");
  const int d = pts.dim();
  Sphere s;
  s.center.assign(pts[0].begin(), pts[0].end());
  if (pts.size() == 1) return s;
  Eigen::MatrixXd v = detail::edge_matrix(pts);
  if (!detail::affinely_independent(v)) return std::nullopt;
  Eigen::MatrixXd g = v.transpose() * v;
  Eigen::VectorXd b = 0.5 * g.diagonal();
  Eigen::VectorXd a = g.ldlt().solve(b);
  Eigen::VectorXd c = v * a;
  for (int i = 0; i < d; ++i) s.center[i] += c(i);
  s.radius = c.norm();
  return s;
}

// Barycentric coordinates of x relative to affinely independent points
// (least squares when x is off the affine hull).
inline std::vector<double> barycentric(std::span<const double> x, const PointSet& pts) {
  require(!pts.empty(), errc::invalid_argument, "barycentric coordinates need points");
  std::vector<double> lam(pts.size(), 0.0);
  if (pts.size() == 1) {
    lam[0] = 1.0;
    return lam;
  }
  Eigen::MatrixXd v = detail::edge_matrix(pts);
  require(detail::affinely_independent(v), errc::degenerate, "points are affinely dependent");
  Eigen::VectorXd rhs(pts.dim());
  for (int i = 0; i < pts.dim(); ++i) rhs(i) = x[i] - pts[0][i];
  Eigen::VectorXd a = v.colPivHouseholderQr().solve(rhs);
  double sum = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    lam[i + 1] = a(i);
    sum += a(i);
  }
  lam[0] = 1.0 - sum;
  return lam;
}

inline bool in_open_convex_hull(std::span<const double> x, const PointSet& pts) {
  for (double l : barycentric(x, pts))
    if (!(l > affine_tolerance)) return false;
  return true;
}

}  // namespace rgc
