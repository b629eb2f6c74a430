#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "rgc/complexes.hpp"

namespace rgc {

struct BettiVector {
  std::vector<long long> b;  // b[k] = beta_k for k = 0..max_dim
  double eps = 0;
  ComplexKind kind = ComplexKind::rips;

  long long operator[](std::size_t k) const { return k < b.size() ? b[k] : 0; }
  bool operator==(const BettiVector& o) const {
    std::size_t n = std::max(b.size(), o.b.size());
    for (std::size_t k = 0; k < n; ++k)
      if ((*this)[k] != o[k]) return false;
    return true;
  }
};

namespace detail {

using Column = std::vector<std::uint32_t>;  // sorted row indices over Z2

inline void add_column(Column& a, const Column& b) {
  Column out;
  out.reserve(a.size() + b.size());
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  a.swap(out);
}

inline constexpr std::uint32_t no_pivot = std::numeric_limits<std::uint32_t>::max();

// Facet indices (within dimension p-1) of face i of dimension p.
inline Column facet_rows(const SimplicialComplex& k, int p, std::size_t i) {
  Column col;
  auto f = k.face(p, i);
  std::array<std::uint32_t, max_face_dim + 1> sub{};
  for (int skip = 0; skip <= p; ++skip) {
    int t = 0;
    for (int j = 0; j <= p; ++j)
      if (j != skip) sub[t++] = f[j];
    auto idx = k.index_of(std::span<const std::uint32_t>(sub.data(), p));
    require(idx.has_value(), errc::malformed_complex, "missing facet: complex not downward closed");
    col.push_back(static_cast<std::uint32_t>(*idx));
  }
  std::sort(col.begin(), col.end());
  return col;
}

}  // namespace detail

// Z2 Betti numbers by column reduction of each boundary matrix, highest
// dimension first so that pivot rows of the next matrix are cleared.
inline BettiVector betti_numbers(const SimplicialComplex& k) {
  k.validate();
  const int top = k.max_dim();
  std::vector<std::size_t> rank(top + 2, 0);
  std::vector<char> cleared_next;  // dims p faces that were pivots of dim p+1
  for (int p = top; p >= 1; --p) {
    const std::size_t n = k.count(p);
    std::vector<char> cleared(k.count(p - 1), 0);
    std::vector<std::uint32_t> owner(k.count(p - 1), detail::no_pivot);
    std::vector<detail::Column> reduced(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (!cleared_next.empty() && cleared_next[j]) continue;
      auto col = detail::facet_rows(k, p, j);
      while (!col.empty() && owner[col.back()] != detail::no_pivot)
        detail::add_column(col, reduced[owner[col.back()]]);
      if (col.empty()) continue;
      owner[col.back()] = static_cast<std::uint32_t>(j);
      cleared[col.back()] = 1;
      reduced[j] = std::move(col);
      ++rank[p];
    }
    cleared_next.swap(cleared);
  }
  BettiVector out;
  out.b.assign(top + 1, 0);
  for (int p = 0; p <= top; ++p)
    out.b[p] = static_cast<long long>(k.count(p)) - static_cast<long long>(rank[p]) -
               static_cast<long long>(rank[p + 1]);
  return out;
}

inline long long euler_characteristic(const SimplicialComplex& k) {
  long long chi = 0;
  for (int p = 0; p <= k.max_dim(); ++p)
    chi += (p % 2 ? -1 : 1) * static_cast<long long>(k.count(p));
  return chi;
}

struct Bar {
  int dim = 0;
  double birth = 0;
  double death = std::numeric_limits<double>::infinity();

  bool essential() const { return death == std::numeric_limits<double>::infinity(); }
};

struct Barcode {
  std::vector<Bar> bars;
  int max_dim = 0;       // homology above max_dim - 1 is truncated by the filtration
  std::string source;    // free-form provenance label

  std::vector<Bar> in_dim(int p) const {
    std::vector<Bar> out;
    for (const auto& b : bars)
      if (b.dim == p) out.push_back(b);
    return out;
  }
};

// Standard reduction in filtration order with clearing. Zero-length bars are
// dropped; unpaired positive simplices give essential bars.
inline Barcode persistence(const Filtration& f) {
  f.validate();
  const int top = f.max_dim();
  const auto& s = f.simplices();
  const std::size_t n = s.size();
  // Lookup from (dim, face) to filtration position.
  SimplicialComplex all(f.vertex_count(), top);
  for (const auto& x : s) all.add(x.vertices());
  all.finalize();
  std::vector<std::vector<std::uint32_t>> pos(top + 1);
  for (int p = 0; p <= top; ++p) pos[p].assign(all.count(p), 0);
  for (std::size_t i = 0; i < n; ++i)
    pos[s[i].dim][*all.index_of(s[i].vertices())] = static_cast<std::uint32_t>(i);

  std::vector<std::uint32_t> owner(n, detail::no_pivot);  // row -> column with that low
  std::vector<char> positive(n, 0), paired(n, 0);
  std::vector<detail::Column> reduced(n);
  std::vector<std::vector<std::uint32_t>> by_dim(top + 1);
  for (std::size_t i = 0; i < n; ++i) by_dim[s[i].dim].push_back(static_cast<std::uint32_t>(i));

  Barcode out;
  out.max_dim = top;
  for (int p = top; p >= 1; --p) {
    for (auto j : by_dim[p]) {
      if (paired[j]) continue;  // cleared: already the low of a higher column
      detail::Column col;
      auto fi = *all.index_of(s[j].vertices());
      for (auto r : detail::facet_rows(all, p, fi)) col.push_back(pos[p - 1][r]);
      std::sort(col.begin(), col.end());
      while (!col.empty() && owner[col.back()] != detail::no_pivot)
        detail::add_column(col, reduced[owner[col.back()]]);
      if (col.empty()) continue;
      const auto low = col.back();
      owner[low] = j;
      paired[low] = 1;
      paired[j] = 1;
      if (s[j].birth > s[low].birth) out.bars.push_back({p - 1, s[low].birth, s[j].birth});
      reduced[j] = std::move(col);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!paired[i]) out.bars.push_back({s[i].dim, s[i].birth, std::numeric_limits<double>::infinity()});
  std::sort(out.bars.begin(), out.bars.end(), [](const Bar& a, const Bar& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    if (a.birth != b.birth) return a.birth < b.birth;
    return a.death < b.death;
  });
  return out;
}

// Bars alive at eps under the [birth, death) convention.
inline BettiVector betti_from_barcode(const Barcode& bc, double eps) {
  BettiVector out;
  out.eps = eps;
  out.b.assign(bc.max_dim + 1, 0);
  for (const auto& b : bc.bars)
    if (b.birth <= eps && eps < b.death) ++out.b[b.dim];
  return out;
}

inline void write_barcode_csv(std::ostream& out, const Barcode& bc) {
  auto old = out.precision(17);
  out << "dim,birth,death\n";
  for (const auto& b : bc.bars) {
    out << b.dim << ',' << b.birth << ',';
    if (b.essential()) out << "inf";
    else out << b.death;
    out << '\n';
  }
  out.precision(old);
}

// ---- Sandwich bounds ------------------------------------------------------

namespace detail {

// Exact determinant of an integer matrix (fraction-free Bareiss).
inline long long bareiss_determinant(std::vector<std::vector<long long>> a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  __int128 prev = 1;
  int sign = 1;
  std::vector<std::vector<__int128>> m(n, std::vector<__int128>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = a[i][j];
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && m[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(m[k], m[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * static_cast<long long>(m[n - 1][n - 1]);
}

// Spanning-tree count of a multigraph given by an integer adjacency matrix.
inline long long spanning_trees(const std::vector<std::vector<long long>>& adj) {
  const std::size_t n = adj.size();
  if (n <= 1) return 1;
  std::vector<std::vector<long long>> lap(n - 1, std::vector<long long>(n - 1, 0));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    long long deg = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) deg += adj[i][j];
    lap[i][i] = deg;
    for (std::size_t j = 0; j + 1 < n; ++j)
      if (j != i) lap[i][j] = -adj[i][j];
  }
  return bareiss_determinant(std::move(lap));
}

}  // namespace detail

struct SandwichReport {
  ComplexKind kind = ComplexKind::rips;
  int k = 1;
  double eps = 0;
  long long lower = 0;
  long long betti = 0;
  long long upper = 0;
  std::vector<long long> upper_terms;  // the summands of the upper bound
  bool holds() const { return lower <= betti && betti <= upper; }
};

// Rips, k = 1:  J(O_1) <= beta_1 <= J(O_1) + #(5-vertex trees in the graph).
//   A component on <= 4 vertices has beta_1 = 1 exactly when it is a 4-cycle;
//   a larger component has beta_1 at most its cycle rank, which never exceeds
//   its number of 5-vertex subtrees.
// Cech, k >= 1:  C*(empty (k+1)-simplex) <= beta_k <= C* + C' + C''.
//   Components on <= k+2 vertices carry homology only as an isolated empty
//   simplex; in a larger component beta_k is at most its number of k-faces,
//   and each such face extends either by two vertices both adjacent to it (C')
//   or by a path of length two (C'').
inline SandwichReport check_sandwich(const PointConfiguration& cfg, double eps, ComplexKind kind, int k) {
  require(eps > 0, errc::invalid_argument, "eps must be positive");
  SandwichReport rep;
  rep.kind = kind;
  rep.k = k;
  rep.eps = eps;
  const PointSet pts = cfg.points().subset(cfg.window_ids());
  std::vector<std::uint32_t> ids(pts.size());
  std::iota(ids.begin(), ids.end(), 0u);
  auto g = build_graph(pts, ids, eps);

  if (kind == ComplexKind::rips) {
    require(k == 1, errc::cap_exceeded, "Rips sandwich is available for k = 1");
    auto cx = build_rips(pts, eps, 2);
    rep.betti = betti_numbers(cx)[1];
    rep.lower = static_cast<long long>(count_matching_components(g, cross_polytope_skeleton(1)));
    long long trees = 0;
    for_each_connected_subset(g, 5, [&](std::span<const std::uint32_t> sub) {
      std::vector<std::vector<long long>> adj(5, std::vector<long long>(5, 0));
      for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b)
          if (g.adjacent(sub[a], sub[b])) adj[a][b] = adj[b][a] = 1;
      trees += detail::spanning_trees(adj);
    });
    rep.upper_terms = {rep.lower, trees};
    rep.upper = rep.lower + trees;
    return rep;
  }

  require(k >= 1 && k < pts.dim() && k + 2 <= max_pattern_vertices, errc::cap_exceeded,
          "Cech sandwich needs 1 <= k < d");
  auto cx = build_cech(pts, eps, k + 1);
  rep.betti = betti_numbers(cx)[k];
  auto local = PointConfiguration::enclosing(pts);
  rep.lower = static_cast<long long>(
      count_subcomplexes(local, eps, empty_simplex(k + 2), true, CountMode::interior));
  long long two_adjacent = 0, path = 0;
  std::vector<int> touch(g.size(), 0);  // # of face vertices adjacent or equal
  for (std::size_t i = 0; i < cx.count(k); ++i) {
    auto f = cx.face(k, i);
    std::vector<std::uint32_t> near;
    for (auto v : f) {
      touch[v] += 1000;  // member marker
      for (auto u : g.adj[v]) {
        if (touch[u] == 0) near.push_back(u);
        touch[u] += 1;
      }
    }
    std::vector<std::uint32_t> outside;
    for (auto u : near)
      if (touch[u] < 1000) outside.push_back(u);
    const long long m = static_cast<long long>(outside.size());
    two_adjacent += m * (m - 1) / 2;
    for (auto u : outside)
      for (auto v : g.adj[u])
        if (touch[v] == 0) ++path;
    for (auto v : f) {
      touch[v] -= 1000;
      for (auto u : g.adj[v]) touch[u] -= 1;
    }
  }
  rep.upper_terms = {rep.lower, two_adjacent, path};
  rep.upper = rep.lower + two_adjacent + path;
  return rep;
}

}  // namespace rgc
