// Brute-force reference implementations. They share no code paths with the
// library beyond PointSet and the pattern structs.
#pragma once

#include <algorithm>
#include <bitset>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "rgc/patterns.hpp"
#include "rgc/pointset.hpp"

namespace oracle {

using rgc::PointSet;

inline double d2(const PointSet& p, std::size_t a, std::size_t b) {
  double s = 0;
  for (int c = 0; c < p.dim(); ++c) {
    double t = p[a][c] - p[b][c];
    s += t * t;
  }
  return s;
}

// Visits every k-subset of {0..n-1} in lexicographic order.
inline void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& f) {
  if (k > n || k <= 0) return;
  std::vector<int> s(k);
  std::iota(s.begin(), s.end(), 0);
  while (true) {
    f(s);
    int i = k - 1;
    while (i >= 0 && s[i] == n - k + i) --i;
    if (i < 0) return;
    ++s[i];
    for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
  }
}

// Adjacency matrix of the subset at radius r (closed).
inline std::vector<std::vector<bool>> adjacency(const PointSet& p, const std::vector<int>& s, double r) {
  const int k = static_cast<int>(s.size());
  std::vector<std::vector<bool>> a(k, std::vector<bool>(k, false));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j && d2(p, s[i], s[j]) <= r * r) a[i][j] = true;
  return a;
}

// Isomorphism by trying every permutation.
inline bool same_graph(const std::vector<std::vector<bool>>& a, const rgc::GraphPattern& g) {
  const int k = g.k;
  if (static_cast<int>(a.size()) != k) return false;
  std::vector<std::vector<bool>> b(k, std::vector<bool>(k, false));
  for (auto [x, y] : g.edges) b[x][y] = b[y][x] = true;
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (int i = 0; i < k && ok; ++i)
      for (int j = 0; j < k && ok; ++j) ok = a[i][j] == b[perm[i]][perm[j]];
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

inline long long subgraph_count(const PointSet& p, double r, const rgc::GraphPattern& g) {
  long long c = 0;
  for_each_subset(static_cast<int>(p.size()), g.k, [&](const std::vector<int>& s) {
    if (same_graph(adjacency(p, s, r), g)) ++c;
  });
  return c;
}

// Pattern copies with no point of `others` (indices outside the subset)
// within r of any member.
inline long long component_count(const PointSet& p, double r, const rgc::GraphPattern& g,
                                 const std::vector<int>& candidates, const std::vector<int>& blockers) {
  long long c = 0;
  for_each_subset(static_cast<int>(candidates.size()), g.k, [&](const std::vector<int>& idx) {
    std::vector<int> s;
    for (int i : idx) s.push_back(candidates[i]);
    if (!same_graph(adjacency(p, s, r), g)) return;
    for (int b : blockers) {
      if (std::find(s.begin(), s.end(), b) != s.end()) continue;
      for (int v : s)
        if (d2(p, b, v) <= r * r) return;
    }
    ++c;
  });
  return c;
}

// Smallest enclosing ball radius: minimum over circumspheres of affinely
// independent subsets that enclose every point.
inline double miniball_radius(const PointSet& p) {
  const int n = static_cast<int>(p.size()), d = p.dim();
  if (n == 1) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int m = 2; m <= std::min(n, d + 1); ++m) {
    for_each_subset(n, m, [&](const std::vector<int>& s) {
      Eigen::MatrixXd v(d, m - 1);
      for (int i = 1; i < m; ++i)
        for (int c = 0; c < d; ++c) v(c, i - 1) = p[s[i]][c] - p[s[0]][c];
      Eigen::FullPivLU<Eigen::MatrixXd> lu(v);
      lu.setThreshold(1e-10);
      if (lu.rank() < m - 1) return;
      // centre = p0 + v a with v^T v a = |v_i|^2 / 2
      Eigen::MatrixXd g = v.transpose() * v;
      Eigen::VectorXd rhs = 0.5 * g.diagonal();
      Eigen::VectorXd a = g.fullPivLu().solve(rhs);
      Eigen::VectorXd c = v * a;
      double rad = c.norm();
      for (int q = 0; q < n; ++q) {
        double s2 = 0;
        for (int j = 0; j < d; ++j) {
          double t = p[q][j] - (p[s[0]][j] + c(j));
          s2 += t * t;
        }
        if (std::sqrt(s2) > rad + 1e-9) return;
      }
      best = std::min(best, rad);
    });
  }
  return best;
}

inline PointSet pick(const PointSet& p, const std::vector<int>& s) {
  PointSet out(p.dim());
  for (int i : s) out.push_back(p[i]);
  return out;
}

// Faces of the Rips or Cech complex by exhaustive subset search, as sorted
// vertex lists per dimension.
inline std::vector<std::vector<std::vector<int>>> complex_faces(const PointSet& p, double eps, int max_dim,
                                                                bool cech) {
  std::vector<std::vector<std::vector<int>>> out(max_dim + 1);
  const int n = static_cast<int>(p.size());
  for (int m = 1; m <= max_dim + 1; ++m)
    for_each_subset(n, m, [&](const std::vector<int>& s) {
      bool in = true;
      if (cech && m >= 3) {
        in = miniball_radius(pick(p, s)) <= eps / 2 + 1e-9;
      } else {
        for (int i = 0; i < m && in; ++i)
          for (int j = i + 1; j < m && in; ++j) in = d2(p, s[i], s[j]) <= eps * eps;
      }
      if (in) out[m - 1].push_back(s);
    });
  return out;
}

// Z2 rank of a dense 0/1 matrix by Gaussian elimination on bitsets.
inline int z2_rank(std::vector<std::vector<bool>> rows) {
  int rank = 0;
  const int nr = static_cast<int>(rows.size());
  const int nc = nr ? static_cast<int>(rows[0].size()) : 0;
  for (int c = 0; c < nc && rank < nr; ++c) {
    int piv = -1;
    for (int r = rank; r < nr; ++r)
      if (rows[r][c]) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[rank], rows[piv]);
    for (int r = 0; r < nr; ++r)
      if (r != rank && rows[r][c])
        for (int j = c; j < nc; ++j) rows[r][j] = rows[r][j] != rows[rank][j];
    ++rank;
  }
  return rank;
}

// Betti numbers of a complex given by per-dimension face lists.
inline std::vector<long long> betti(const std::vector<std::vector<std::vector<int>>>& faces) {
  const int top = static_cast<int>(faces.size()) - 1;
  std::vector<int> rank(top + 2, 0);
  for (int p = 1; p <= top; ++p) {
    const auto& cols = faces[p];
    const auto& rowsf = faces[p - 1];
    if (cols.empty() || rowsf.empty()) continue;
    std::vector<std::vector<bool>> m(cols.size(), std::vector<bool>(rowsf.size(), false));
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (std::size_t skip = 0; skip < cols[j].size(); ++skip) {
        std::vector<int> f;
        for (std::size_t t = 0; t < cols[j].size(); ++t)
          if (t != skip) f.push_back(cols[j][t]);
        auto it = std::find(rowsf.begin(), rowsf.end(), f);
        m[j][it - rowsf.begin()] = true;
      }
    rank[p] = z2_rank(m);
  }
  std::vector<long long> b(top + 1);
  for (int p = 0; p <= top; ++p) b[p] = static_cast<long long>(faces[p].size()) - rank[p] - rank[p + 1];
  return b;
}

struct Critical {
  int index;
  std::vector<int> vertices;
  double radius;
};

// Critical points by scanning all subsets of size 2..d+1 with an explicit
// emptiness test against every point.
inline std::vector<Critical> critical_points(const PointSet& p, double r) {
  std::vector<Critical> out;
  const int n = static_cast<int>(p.size()), d = p.dim();
  for (int m = 2; m <= std::min(n, d + 1); ++m)
    for_each_subset(n, m, [&](const std::vector<int>& s) {
      Eigen::MatrixXd v(d, m - 1);
      for (int i = 1; i < m; ++i)
        for (int c = 0; c < d; ++c) v(c, i - 1) = p[s[i]][c] - p[s[0]][c];
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(v);
      auto sv = svd.singularValues();
      if (!(sv(sv.size() - 1) > 1e-9 * std::max(1.0, sv(0)))) return;
      Eigen::MatrixXd g = v.transpose() * v;
      Eigen::VectorXd a = g.fullPivLu().solve(Eigen::VectorXd(0.5 * g.diagonal()));
      double lam0 = 1 - a.sum();
      if (!(lam0 > 1e-9)) return;
      for (int i = 0; i < a.size(); ++i)
        if (!(a(i) > 1e-9)) return;
      Eigen::VectorXd c = v * a;
      double rad = c.norm();
      if (rad > r) return;
      for (int q = 0; q < n; ++q) {
        if (std::find(s.begin(), s.end(), q) != s.end()) continue;
        double s2 = 0;
        for (int j = 0; j < d; ++j) {
          double t = p[q][j] - (p[s[0]][j] + c(j));
          s2 += t * t;
        }
        if (std::sqrt(s2) < rad - 1e-12) return;
      }
      out.push_back({m - 1, s, rad});
    });
  return out;
}

inline std::set<std::vector<int>> face_set(const std::vector<std::vector<std::vector<int>>>& faces) {
  std::set<std::vector<int>> s;
  for (const auto& level : faces)
    for (const auto& f : level) s.insert(f);
  return s;
}

// Simplicial isomorphism by trying every relabelling.
inline bool same_complex(const std::set<std::vector<int>>& a, const rgc::ComplexPattern& p) {
  std::set<std::vector<int>> b(p.faces.begin(), p.faces.end());
  if (a.size() != b.size()) return false;
  std::vector<int> perm(p.k);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (const auto& f : a) {
      std::vector<int> g;
      for (int v : f) g.push_back(perm[v]);
      std::sort(g.begin(), g.end());
      if (!b.count(g)) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

inline long long subcomplex_count(const PointSet& p, double eps, const rgc::ComplexPattern& pat, bool isolated) {
  long long c = 0;
  const int n = static_cast<int>(p.size());
  for_each_subset(n, pat.k, [&](const std::vector<int>& s) {
    auto faces = complex_faces(pick(p, s), eps, pat.k - 1, true);
    if (!same_complex(face_set(faces), pat)) return;
    if (isolated)
      for (int q = 0; q < n; ++q) {
        if (std::find(s.begin(), s.end(), q) != s.end()) continue;
        for (int v : s)
          if (d2(p, q, v) <= eps * eps) return;
      }
    ++c;
  });
  return c;
}

inline PointSet uniform_points(int n, int d, double side, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(-side / 2, side / 2);
  PointSet p(d);
  std::vector<double> x(d);
  for (int i = 0; i < n; ++i) {
    for (auto& v : x) v = u(g);
    p.push_back(x);
  }
  return p;
}

}  // namespace oracle
