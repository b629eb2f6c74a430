#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "rgc/geograph.hpp"
#include "rgc/miniball.hpp"
#include "rgc/patterns.hpp"

namespace rgc {

inline constexpr int max_face_dim = 8;

// Faces per dimension, each a strictly increasing vertex tuple, stored flat
// and sorted lexicographically.
class SimplicialComplex {
 public:
  SimplicialComplex() = default;
  SimplicialComplex(std::size_t vertices, int max_dim) : vertices_(vertices), faces_(max_dim + 1) {
    require(max_dim >= 0 && max_dim <= max_face_dim, errc::invalid_argument,
            "max_dim must lie in [0, 8]");
  }

  std::size_t vertex_count() const noexcept { return vertices_; }
  int max_dim() const noexcept { return static_cast<int>(faces_.size()) - 1; }
  // Highest dimension with a face, -1 when empty.
  int dimension() const {
    for (int p = max_dim(); p >= 0; --p)
      if (count(p)) return p;
    return -1;
  }
  std::size_t count(int p) const {
    if (p < 0 || p > max_dim()) return 0;
    return faces_[p].size() / (p + 1);
  }
  std::size_t size() const {
    std::size_t s = 0;
    for (int p = 0; p <= max_dim(); ++p) s += count(p);
    return s;
  }
  std::span<const std::uint32_t> face(int p, std::size_t i) const {
    return {faces_[p].data() + i * (p + 1), static_cast<std::size_t>(p + 1)};
  }

  void add(std::span<const std::uint32_t> f) {
    const int p = static_cast<int>(f.size()) - 1;
    require(p >= 0 && p <= max_dim(), errc::malformed_complex, "face dimension out of range");
    faces_[p].insert(faces_[p].end(), f.begin(), f.end());
    sorted_ = false;
  }

  // Sorts each dimension lexicographically and removes duplicates.
  void finalize() {
    for (int p = 0; p <= max_dim(); ++p) {
      const std::size_t w = p + 1, n = count(p);
      std::vector<std::uint32_t> idx(n);
      std::iota(idx.begin(), idx.end(), 0u);
      auto& flat = faces_[p];
      auto less = [&](std::uint32_t a, std::uint32_t b) {
        return std::lexicographical_compare(flat.begin() + a * w, flat.begin() + (a + 1) * w,
                                            flat.begin() + b * w, flat.begin() + (b + 1) * w);
      };
      std::sort(idx.begin(), idx.end(), less);
      std::vector<std::uint32_t> out;
      out.reserve(flat.size());
      for (std::size_t j = 0; j < n; ++j) {
        if (j > 0 && !less(idx[j - 1], idx[j])) continue;
        out.insert(out.end(), flat.begin() + idx[j] * w, flat.begin() + (idx[j] + 1) * w);
      }
      flat.swap(out);
    }
    sorted_ = true;
  }

  std::optional<std::size_t> index_of(std::span<const std::uint32_t> f) const {
    const int p = static_cast<int>(f.size()) - 1;
    if (p < 0 || p > max_dim()) return std::nullopt;
    require(sorted_, errc::malformed_complex, "complex not finalized");
    std::size_t lo = 0, hi = count(p);
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      auto g = face(p, mid);
      if (std::lexicographical_compare(g.begin(), g.end(), f.begin(), f.end())) lo = mid + 1;
      else hi = mid;
    }
    if (lo < count(p) && std::equal(f.begin(), f.end(), face(p, lo).begin())) return lo;
    return std::nullopt;
  }
  bool contains(std::span<const std::uint32_t> f) const { return index_of(f).has_value(); }

  // Downward closure, strictly increasing tuples, vertex range, no duplicates.
  bool valid() const {
    if (!sorted_) return false;
    for (int p = 0; p <= max_dim(); ++p) {
      for (std::size_t i = 0; i < count(p); ++i) {
        auto f = face(p, i);
        if (f.back() >= vertices_) return false;
        for (std::size_t j = 1; j < f.size(); ++j)
          if (f[j - 1] >= f[j]) return false;
        if (i > 0 && !std::lexicographical_compare(face(p, i - 1).begin(), face(p, i - 1).end(),
                                                   f.begin(), f.end()))
          return false;
        if (p == 0) continue;
        std::array<std::uint32_t, max_face_dim + 1> sub{};
        for (int skip = 0; skip <= p; ++skip) {
          int t = 0;
          for (int j = 0; j <= p; ++j)
            if (j != skip) sub[t++] = f[j];
          if (!contains(std::span<const std::uint32_t>(sub.data(), p))) return false;
        }
      }
    }
    return true;
  }
  void validate() const {
    require(valid(), errc::malformed_complex, "complex is not a valid simplicial complex");
  }

  bool operator==(const SimplicialComplex& o) const {
    if (vertices_ != o.vertices_) return false;
    const int top = std::max(max_dim(), o.max_dim());
    for (int p = 0; p <= top; ++p) {
      if (count(p) != o.count(p)) return false;
      if (count(p) && faces_[p] != o.faces_[p]) return false;
    }
    return true;
  }

  // True when every face of this complex is a face of `o`.
  bool subcomplex_of(const SimplicialComplex& o) const {
    for (int p = 0; p <= max_dim(); ++p)
      for (std::size_t i = 0; i < count(p); ++i)
        if (!o.contains(face(p, i))) return false;
    return true;
  }

 private:
  std::size_t vertices_ = 0;
  std::vector<std::vector<std::uint32_t>> faces_{1};
  bool sorted_ = true;
};

enum class ComplexKind { rips, cech };

inline std::string complex_kind_name(ComplexKind k) { return k == ComplexKind::rips ? "rips" : "cech"; }

namespace detail {

// Clique expansion over sorted neighbour lists. `accept(clique)` may prune a
// candidate clique (and hence all its supersets); `emit` receives accepted
// cliques of size <= max_dim + 1.
template <class Accept, class Emit>
void expand_cliques(const GeometricGraph& g, int max_dim, Accept&& accept, Emit&& emit) {
  std::vector<std::uint32_t> clique;
  clique.reserve(max_dim + 1);
  auto rec = [&](auto&& self, const std::vector<std::uint32_t>& cand) -> void {
    emit(std::span<const std::uint32_t>(clique));
    if (static_cast<int>(clique.size()) == max_dim + 1) return;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      const auto w = cand[i];
      clique.push_back(w);
      if (accept(std::span<const std::uint32_t>(clique))) {
        std::vector<std::uint32_t> next;
        const auto& nw = g.adj[w];
        std::set_intersection(cand.begin() + i + 1, cand.end(), nw.begin(), nw.end(),
                              std::back_inserter(next));
        self(self, next);
      }
      clique.pop_back();
    }
  };
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    clique.assign(1, v);
    std::vector<std::uint32_t> cand;
    for (auto u : g.adj[v])
      if (u > v) cand.push_back(u);
    rec(rec, cand);
  }
}

inline double rips_birth(const PointSet& pts, std::span<const std::uint32_t> f) {
  double b = 0;
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = i + 1; j < f.size(); ++j) b = std::max(b, dist(pts[f[i]], pts[f[j]]));
  return b;
}

inline double cech_birth(const PointSet& pts, std::span<const std::uint32_t> f) {
  if (f.size() <= 1) return 0.0;
  if (f.size() == 2) return dist(pts[f[0]], pts[f[1]]);
  return 2.0 * miniball_radius(pts.subset(f));
}

}  // namespace detail

// Birth of a face under the given construction: max pairwise distance (Rips)
// or the miniball diameter (Cech).
inline double face_birth(ComplexKind kind, const PointSet& pts, std::span<const std::uint32_t> f) {
  return kind == ComplexKind::rips ? detail::rips_birth(pts, f) : detail::cech_birth(pts, f);
}

// Complex on all points of `pts` at parameter eps. Cech uses balls of radius
// eps/2: a face is present iff its miniball radius is <= eps/2 (+1e-9).
inline SimplicialComplex build_complex(ComplexKind kind, const PointSet& pts, double eps, int max_dim) {
  require(eps > 0, errc::invalid_argument, "eps must be positive");
  std::vector<std::uint32_t> ids(pts.size());
  std::iota(ids.begin(), ids.end(), 0u);
  auto g = build_graph(pts, ids, eps);
  SimplicialComplex k(pts.size(), max_dim);
  auto emit = [&](std::span<const std::uint32_t> f) { k.add(f); };
  if (kind == ComplexKind::rips) {
    detail::expand_cliques(g, max_dim, [](auto) { return true; }, emit);
  } else {
    detail::expand_cliques(
        g, max_dim,
        [&](std::span<const std::uint32_t> f) {
          return f.size() <= 2 || miniball_radius(pts.subset(f)) <= eps / 2 + miniball_tolerance;
        },
        emit);
  }
  k.finalize();
  return k;
}

inline SimplicialComplex build_rips(const PointSet& pts, double eps, int max_dim) {
  return build_complex(ComplexKind::rips, pts, eps, max_dim);
}
inline SimplicialComplex build_cech(const PointSet& pts, double eps, int max_dim) {
  return build_complex(ComplexKind::cech, pts, eps, max_dim);
}
// Configuration overloads use the window points in window_ids() order.
inline SimplicialComplex build_rips(const PointConfiguration& cfg, double eps, int max_dim) {
  return build_rips(cfg.points().subset(cfg.window_ids()), eps, max_dim);
}
inline SimplicialComplex build_cech(const PointConfiguration& cfg, double eps, int max_dim) {
  return build_cech(cfg.points().subset(cfg.window_ids()), eps, max_dim);
}

struct FilteredSimplex {
  int dim = 0;
  std::array<std::uint32_t, max_face_dim + 1> v{};
  double birth = 0;

  std::span<const std::uint32_t> vertices() const { return {v.data(), static_cast<std::size_t>(dim + 1)}; }
};

// Total order used everywhere: birth, then dimension, then lexicographic.
inline bool filtration_less(const FilteredSimplex& a, const FilteredSimplex& b) {
  if (a.birth != b.birth) return a.birth < b.birth;
  if (a.dim != b.dim) return a.dim < b.dim;
  return std::lexicographical_compare(a.v.begin(), a.v.begin() + a.dim + 1, b.v.begin(),
                                      b.v.begin() + b.dim + 1);
}

class Filtration {
 public:
  Filtration() = default;
  Filtration(std::size_t vertices, int max_dim, double eps_max, std::vector<FilteredSimplex> s)
      : vertices_(vertices), max_dim_(max_dim), eps_max_(eps_max), simplices_(std::move(s)) {
    std::sort(simplices_.begin(), simplices_.end(), filtration_less);
  }

  std::size_t vertex_count() const noexcept { return vertices_; }
  int max_dim() const noexcept { return max_dim_; }
  double eps_max() const noexcept { return eps_max_; }
  std::size_t size() const noexcept { return simplices_.size(); }
  const std::vector<FilteredSimplex>& simplices() const noexcept { return simplices_; }
  const FilteredSimplex& operator[](std::size_t i) const { return simplices_[i]; }

  // Complex of all simplices born at or before eps.
  SimplicialComplex slice(double eps) const {
    SimplicialComplex k(vertices_, max_dim_);
    for (const auto& s : simplices_) {
      if (s.birth > eps) break;
      k.add(s.vertices());
    }
    k.finalize();
    return k;
  }

  // Every face is born no earlier than each of its codimension-1 faces, and
  // appears after them in the order.
  bool monotone() const {
    SimplicialComplex all = slice(std::numeric_limits<double>::infinity());
    std::vector<std::vector<double>> birth(max_dim_ + 1);
    std::vector<std::vector<std::size_t>> pos(max_dim_ + 1);
    for (int p = 0; p <= max_dim_; ++p) {
      birth[p].assign(all.count(p), 0);
      pos[p].assign(all.count(p), 0);
    }
    for (std::size_t i = 0; i < simplices_.size(); ++i) {
      const auto& s = simplices_[i];
      auto idx = all.index_of(s.vertices());
      if (!idx) return false;
      birth[s.dim][*idx] = s.birth;
      pos[s.dim][*idx] = i;
    }
    if (all.size() != simplices_.size()) return false;
    for (const auto& s : simplices_) {
      if (s.dim == 0) continue;
      auto self = *all.index_of(s.vertices());
      std::array<std::uint32_t, max_face_dim + 1> sub{};
      for (int skip = 0; skip <= s.dim; ++skip) {
        int t = 0;
        for (int j = 0; j <= s.dim; ++j)
          if (j != skip) sub[t++] = s.v[j];
        auto f = all.index_of(std::span<const std::uint32_t>(sub.data(), s.dim));
        if (!f) return false;
        if (birth[s.dim - 1][*f] > s.birth) return false;
        if (pos[s.dim - 1][*f] > pos[s.dim][self]) return false;
      }
    }
    return true;
  }
  void validate() const {
    require(monotone(), errc::non_monotone, "filtration is not monotone");
  }

  // One face per line: `dim;v0,v1,...;birth`.
  void write(std::ostream& out) const {
    auto old = out.precision(17);
    for (const auto& s : simplices_) {
      out << s.dim << ';';
      for (int j = 0; j <= s.dim; ++j) out << (j ? "," : "") << s.v[j];
      out << ';' << s.birth << '\n';
    }
    out.precision(old);
  }

 private:
  std::size_t vertices_ = 0;
  int max_dim_ = 0;
  double eps_max_ = 0;
  std::vector<FilteredSimplex> simplices_;
};

inline Filtration build_filtration(ComplexKind kind, const PointSet& pts, int max_dim, double eps_max) {
  require(eps_max > 0, errc::invalid_argument, "eps_max must be positive");
  require(max_dim >= 0 && max_dim <= max_face_dim, errc::invalid_argument,
          "max_dim must lie in [0, 8]");
  std::vector<std::uint32_t> ids(pts.size());
  std::iota(ids.begin(), ids.end(), 0u);
  auto g = build_graph(pts, ids, eps_max);
  std::vector<FilteredSimplex> out;
  double pending = 0;  // birth of the clique just accepted
  auto emit = [&](std::span<const std::uint32_t> f) {
    FilteredSimplex s;
    s.dim = static_cast<int>(f.size()) - 1;
    std::copy(f.begin(), f.end(), s.v.begin());
    s.birth = f.size() <= 2 ? detail::rips_birth(pts, f) : pending;
    out.push_back(s);
  };
  if (kind == ComplexKind::rips) {
    detail::expand_cliques(
        g, max_dim,
        [&](std::span<const std::uint32_t> f) {
          pending = detail::rips_birth(pts, f);
          return true;
        },
        emit);
  } else {
    detail::expand_cliques(
        g, max_dim,
        [&](std::span<const std::uint32_t> f) {
          pending = detail::cech_birth(pts, f);
          return pending <= eps_max + 2 * miniball_tolerance;
        },
        emit);
  }
  // A Cech face within tolerance of its facets' birth keeps the order valid.
  if (kind == ComplexKind::cech) {
    // Faces are emitted after their facets; lift births that round below.
    SimplicialComplex all(pts.size(), max_dim);
    for (const auto& s : out) all.add(s.vertices());
    all.finalize();
    std::vector<std::vector<double>> birth(max_dim + 1);
    for (int p = 0; p <= max_dim; ++p) birth[p].assign(all.count(p), 0);
    std::sort(out.begin(), out.end(),
              [](const FilteredSimplex& a, const FilteredSimplex& b) { return a.dim < b.dim; });
    for (auto& s : out) {
      if (s.dim >= 2) {
        std::array<std::uint32_t, max_face_dim + 1> sub{};
        for (int skip = 0; skip <= s.dim; ++skip) {
          int t = 0;
          for (int j = 0; j <= s.dim; ++j)
            if (j != skip) sub[t++] = s.v[j];
          auto f = all.index_of(std::span<const std::uint32_t>(sub.data(), s.dim));
          s.birth = std::max(s.birth, birth[s.dim - 1][*f]);
        }
      }
      birth[s.dim][*all.index_of(s.vertices())] = s.birth;
    }
  }
  return Filtration(pts.size(), max_dim, eps_max, std::move(out));
}

inline Filtration rips_filtration(const PointSet& pts, int max_dim, double eps_max) {
  return build_filtration(ComplexKind::rips, pts, max_dim, eps_max);
}
inline Filtration cech_filtration(const PointSet& pts, int max_dim, double eps_max) {
  return build_filtration(ComplexKind::cech, pts, max_dim, eps_max);
}
inline Filtration rips_filtration(const PointConfiguration& cfg, int max_dim, double eps_max) {
  return rips_filtration(cfg.points().subset(cfg.window_ids()), max_dim, eps_max);
}
inline Filtration cech_filtration(const PointConfiguration& cfg, int max_dim, double eps_max) {
  return cech_filtration(cfg.points().subset(cfg.window_ids()), max_dim, eps_max);
}

// Induced complex on a vertex subset (at most 8 vertices) at parameter eps.
inline SmallComplex induced_complex(ComplexKind kind, const PointSet& pts,
                                    std::span<const std::uint32_t> sub, double eps) {
  require(sub.size() <= static_cast<std::size_t>(max_pattern_vertices), errc::cap_exceeded,
          "induced complex limited to 8 vertices");
  SmallComplex c;
  c.k = static_cast<int>(sub.size());
  std::array<std::uint32_t, max_pattern_vertices> f{};
  for (unsigned m = 1; m < (1u << c.k); ++m) {
    // A face needs all its facets; checking them first skips most miniballs.
    bool facets = true;
    for (int v = 0; v < c.k && facets; ++v)
      if ((m >> v & 1u) && (m & ~(1u << v))) facets = c.faces[m & ~(1u << v)];
    if (!facets) continue;
    int t = 0;
    for (int v = 0; v < c.k; ++v)
      if (m >> v & 1u) f[t++] = sub[v];
    std::span<const std::uint32_t> face(f.data(), t);
    bool in = t == 1;
    if (t == 2) in = dist(pts[f[0]], pts[f[1]]) <= eps;
    if (t > 2) {
      in = kind == ComplexKind::rips ||
           miniball_radius(pts.subset(face)) <= eps / 2 + miniball_tolerance;
    }
    if (in) c.faces[m] = true;
  }
  return c;
}

// Number of k-subsets whose induced complex at eps is simplicially isomorphic
// to the pattern. With `isolated`, the subset must also be a connected
// component of the eps-graph (no other point within eps). Ambient mode
// checks isolation against all sampled points and needs margin >= eps.
inline std::uint64_t count_subcomplexes(const PointConfiguration& cfg, double eps,
                                        const ComplexPattern& pattern, bool isolated,
                                        CountMode mode, ComplexKind kind = ComplexKind::cech) {
  require(pattern.k <= max_pattern_vertices, errc::cap_exceeded, "pattern exceeds 8 vertices");
  const auto target = pattern.complex();
  const auto skeleton = target.skeleton();
  const int edges = skeleton.edge_count();
  const bool ambient = mode == CountMode::ambient;
  auto g = build_graph(cfg, eps, ambient && isolated);
  std::uint64_t count = 0;
  auto test = [&](std::span<const std::uint32_t> local) {
    std::array<std::uint32_t, max_pattern_vertices> ids{};
    for (std::size_t i = 0; i < local.size(); ++i) ids[i] = g.ids[local[i]];
    auto s = induced_graph(g, local);
    if (s.edge_count() != edges || !isomorphic(s, skeleton)) return;
    auto c = induced_complex(kind, cfg.points(), std::span<const std::uint32_t>(ids.data(), local.size()), eps);
    if (isomorphic(c, target)) ++count;
  };
  if (!isolated) {
    for_each_connected_subset(g, pattern.k, test);
    return count;
  }
  for (const auto& comp : connected_components(g)) {
    if (static_cast<int>(comp.size()) != pattern.k) continue;
    if (ambient && !std::all_of(comp.begin(), comp.end(),
                                [&](std::uint32_t v) { return cfg.in_window(g.ids[v]); }))
      continue;
    test(comp);
  }
  return count;
}

}  // namespace rgc
