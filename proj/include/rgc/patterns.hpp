#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <bitset>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rgc/error.hpp"

namespace rgc {

inline constexpr int max_pattern_vertices = 8;

// Graph on at most 8 vertices as neighbour bitmasks.
struct SmallGraph {
  int k = 0;
  std::array<std::uint8_t, max_pattern_vertices> adj{};

  void add_edge(int a, int b) {
    adj[a] |= std::uint8_t(1u << b);
    adj[b] |= std::uint8_t(1u << a);
  }
  bool has_edge(int a, int b) const { return adj[a] >> b & 1u; }
  int degree(int v) const { return std::popcount(unsigned(adj[v])); }
  int edge_count() const {
    int s = 0;
    for (int v = 0; v < k; ++v) s += degree(v);
    return s / 2;
  }
  bool connected() const {
    if (k == 0) return false;
    unsigned seen = 1, frontier = 1;
    while (frontier) {
      unsigned next = 0;
      for (int v = 0; v < k; ++v)
        if (frontier >> v & 1u) next |= adj[v];
      frontier = next & ~seen;
      seen |= next;
    }
    return seen == (1u << k) - 1;
  }
};

// Abstract complex on at most 8 vertices: faces indexed by vertex bitmask.
struct SmallComplex {
  int k = 0;
  std::bitset<256> faces;

  SmallGraph skeleton() const {
    SmallGraph g;
    g.k = k;
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b)
        if (faces[(1u << a) | (1u << b)]) g.add_edge(a, b);
    return g;
  }
  bool downward_closed() const {
    for (unsigned m = 1; m < 256; ++m) {
      if (!faces[m]) continue;
      if (m >> k) return false;
      for (int v = 0; v < k; ++v)
        if ((m >> v & 1u) && (m & ~(1u << v)) && !faces[m & ~(1u << v)]) return false;
    }
    for (int v = 0; v < k; ++v)
      if (!faces[1u << v]) return false;
    return true;
  }
  std::size_t face_count() const { return faces.count(); }
};

namespace detail {

// Backtracking over vertex bijections a -> b preserving adjacency and
// non-adjacency, pruned by degree. Visitor returns true to stop.
template <class Visit>
bool for_each_isomorphism(const SmallGraph& a, const SmallGraph& b, Visit&& visit) {
  if (a.k != b.k || a.edge_count() != b.edge_count()) return false;
  const int k = a.k;
  std::array<int, max_pattern_vertices> da{}, db{};
  for (int v = 0; v < k; ++v) {
    da[v] = a.degree(v);
    db[v] = b.degree(v);
  }
  {
    auto sa = da, sb = db;
    std::sort(sa.begin(), sa.begin() + k);
    std::sort(sb.begin(), sb.begin() + k);
    if (!std::equal(sa.begin(), sa.begin() + k, sb.begin())) return false;
  }
  // Map high-degree vertices first.
  std::array<int, max_pattern_vertices> order{};
  for (int v = 0; v < k; ++v) order[v] = v;
  std::sort(order.begin(), order.begin() + k, [&](int x, int y) { return da[x] > da[y]; });
  std::array<int, max_pattern_vertices> map{};
  unsigned used = 0;
  bool stop = false;
  auto rec = [&](auto&& self, int depth) -> void {
    if (stop) return;
    if (depth == k) {
      stop = visit(map);
      return;
    }
    int v = order[depth];
    for (int w = 0; w < k && !stop; ++w) {
      if ((used >> w & 1u) || db[w] != da[v]) continue;
      bool ok = true;
      for (int j = 0; j < depth && ok; ++j) {
        int u = order[j];
        ok = a.has_edge(u, v) == b.has_edge(map[u], w);
      }
      if (!ok) continue;
      map[v] = w;
      used |= 1u << w;
      self(self, depth + 1);
      used &= ~(1u << w);
    }
  };
  rec(rec, 0);
  return stop;
}

}  // namespace detail

inline bool isomorphic(const SmallGraph& a, const SmallGraph& b) {
  return detail::for_each_isomorphism(a, b, [](const auto&) { return true; });
}

// Simplicial isomorphism: a skeleton isomorphism carrying faces onto faces.
inline bool isomorphic(const SmallComplex& a, const SmallComplex& b) {
  if (a.k != b.k || a.face_count() != b.face_count()) return false;
  return detail::for_each_isomorphism(a.skeleton(), b.skeleton(), [&](const auto& map) {
    for (unsigned m = 1; m < (1u << a.k); ++m) {
      if (!a.faces[m]) continue;
      unsigned img = 0;
      for (int v = 0; v < a.k; ++v)
        if (m >> v & 1u) img |= 1u << map[v];
      if (!b.faces[img]) return false;
    }
    return true;
  });
}

struct GraphPattern {
  std::string name;
  int k = 0;
  std::vector<std::pair<int, int>> edges;

  GraphPattern() = default;
  GraphPattern(std::string n, int vertices, std::vector<std::pair<int, int>> e)
      : name(std::move(n)), k(vertices), edges(std::move(e)) {
    validate();
  }

  SmallGraph graph() const {
    SmallGraph g;
    g.k = k;
    for (auto [a, b] : edges) g.add_edge(a, b);
    return g;
  }

  void validate() const {
    require(k >= 1, errc::invalid_argument, "pattern needs at least one vertex");
    require(k <= max_pattern_vertices, errc::cap_exceeded, "pattern exceeds 8 vertices");
    std::vector<std::pair<int, int>> seen;
    for (auto [a, b] : edges) {
      require(a >= 0 && b >= 0 && a < k && b < k, errc::invalid_argument,
              "pattern edge endpoint out of range");
      require(a != b, errc::invalid_argument, "pattern has a self-loop");
      seen.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(seen.begin(), seen.end());
    require(std::adjacent_find(seen.begin(), seen.end()) == seen.end(), errc::invalid_argument,
            "pattern has a duplicate edge");
    require(graph().connected(), errc::invalid_argument, "pattern '" + name + "' is not connected");
  }
};

struct ComplexPattern {
  std::string name;
  int k = 0;
  std::vector<std::vector<int>> faces;  // downward closed, vertices included

  ComplexPattern() = default;
  // Closes the generating faces downward and adds all vertices.
  ComplexPattern(std::string n, int vertices, const std::vector<std::vector<int>>& generators)
      : name(std::move(n)), k(vertices) {
    require(k >= 1, errc::invalid_argument, "pattern needs at least one vertex");
    require(k <= max_pattern_vertices, errc::cap_exceeded, "pattern exceeds 8 vertices");
    std::bitset<256> mask;
    for (int v = 0; v < k; ++v) mask[1u << v] = true;
    for (const auto& f : generators) {
      unsigned m = 0;
      for (int v : f) {
        require(v >= 0 && v < k, errc::invalid_argument, "pattern face vertex out of range");
        m |= 1u << v;
      }
      for (unsigned s = m; s; s = (s - 1) & m) mask[s] = true;
    }
    for (unsigned m = 1; m < 256; ++m)
      if (mask[m]) {
        std::vector<int> f;
        for (int v = 0; v < k; ++v)
          if (m >> v & 1u) f.push_back(v);
        faces.push_back(std::move(f));
      }
    std::sort(faces.begin(), faces.end(), [](const auto& x, const auto& y) {
      return x.size() != y.size() ? x.size() < y.size() : x < y;
    });
    validate();
  }

  SmallComplex complex() const {
    SmallComplex c;
    c.k = k;
    for (const auto& f : faces) {
      unsigned m = 0;
      for (int v : f) m |= 1u << v;
      c.faces[m] = true;
    }
    return c;
  }

  void validate() const {
    auto c = complex();
    require(c.downward_closed(), errc::invalid_argument, "pattern faces are not downward closed");
    require(c.skeleton().connected(), errc::invalid_argument,
            "pattern '" + name + "' has a disconnected 1-skeleton");
  }
};

// ---- generators -----------------------------------------------------------

inline GraphPattern path_pattern(int k) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < k; ++i) e.emplace_back(i, i + 1);
  return {"path_" + std::to_string(k), k, e};
}

inline GraphPattern clique_pattern(int k) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) e.emplace_back(i, j);
  return {"clique_" + std::to_string(k), k, e};
}

inline GraphPattern cycle_pattern(int k) {
  require(k >= 3, errc::invalid_argument, "cycle needs at least 3 vertices");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < k; ++i) e.emplace_back(i, (i + 1) % k);
  return {"cycle_" + std::to_string(k), k, e};
}

inline GraphPattern star_pattern(int k) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i < k; ++i) e.emplace_back(0, i);
  return {"star_" + std::to_string(k), k, e};
}

inline GraphPattern vertex_pattern() { return {"vertex", 1, {}}; }
inline GraphPattern edge_pattern() { return {"edge", 2, {{0, 1}}}; }
inline GraphPattern triangle_pattern() { return {"triangle", 3, {{0, 1}, {1, 2}, {0, 2}}}; }

// 1-skeleton of the boundary of the (k+1)-dimensional cross-polytope:
// 2k+2 vertices, vertex i antipodal to i+k+1.
inline GraphPattern cross_polytope_skeleton(int k) {
  require(k >= 1 && 2 * k + 2 <= max_pattern_vertices, errc::cap_exceeded,
          "cross-polytope skeleton needs 1 <= k <= 3");
  const int m = 2 * k + 2;
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (j != i + k + 1) e.emplace_back(i, j);
  return {"cross_polytope_" + std::to_string(k), m, e};
}

// k vertices, every (k-1)-subset a face, the full set missing.
inline ComplexPattern empty_simplex(int k) {
  require(k >= 3 && k <= max_pattern_vertices, errc::cap_exceeded,
          "empty simplex needs 3 <= k <= 8");
  std::vector<std::vector<int>> gens;
  for (int skip = 0; skip < k; ++skip) {
    std::vector<int> f;
    for (int v = 0; v < k; ++v)
      if (v != skip) f.push_back(v);
    gens.push_back(f);
  }
  return {"empty_simplex_" + std::to_string(k), k, gens};
}

// Full simplex on k-1 vertices with two pendant edges to new vertices, at
// distinct simplex vertices (k+1 vertices in total).
inline ComplexPattern empty_simplex_edge(int k) {
  require(k >= 3 && k + 1 <= max_pattern_vertices, errc::cap_exceeded,
          "attachment pattern needs 3 <= k <= 7");
  std::vector<int> base;
  for (int v = 0; v < k - 1; ++v) base.push_back(v);
  return {"empty_simplex_edge_" + std::to_string(k), k + 1, {base, {0, k - 1}, {1, k}}};
}

// Full simplex on k-1 vertices with a path of length 2 hanging from one
// vertex (k+1 vertices in total).
inline ComplexPattern empty_simplex_path(int k) {
  require(k >= 3 && k + 1 <= max_pattern_vertices, errc::cap_exceeded,
          "attachment pattern needs 3 <= k <= 7");
  std::vector<int> base;
  for (int v = 0; v < k - 1; ++v) base.push_back(v);
  return {"empty_simplex_path_" + std::to_string(k), k + 1, {base, {0, k - 1}, {k - 1, k}}};
}

inline ComplexPattern full_simplex(int k) {
  std::vector<int> all;
  for (int v = 0; v < k; ++v) all.push_back(v);
  return {"simplex_" + std::to_string(k), k, {all}};
}

// Clique complex of a graph pattern.
inline ComplexPattern flag_complex(const GraphPattern& g) {
  auto sg = g.graph();
  std::vector<std::vector<int>> gens;
  for (unsigned m = 1; m < (1u << g.k); ++m) {
    bool clique = true;
    for (int a = 0; a < g.k && clique; ++a)
      for (int b = a + 1; b < g.k && clique; ++b)
        if ((m >> a & 1u) && (m >> b & 1u) && !sg.has_edge(a, b)) clique = false;
    if (!clique) continue;
    std::vector<int> f;
    for (int v = 0; v < g.k; ++v)
      if (m >> v & 1u) f.push_back(v);
    gens.push_back(f);
  }
  return {g.name, g.k, gens};
}

// ---- catalog ----------------------------------------------------------------

namespace detail {

inline bool split_suffix(const std::string& name, const std::string& stem, int& k) {
  if (name.rfind(stem + "_", 0) != 0) return false;
  std::string tail = name.substr(stem.size() + 1);
  if (tail.empty() || !std::all_of(tail.begin(), tail.end(), ::isdigit)) return false;
  k = std::stoi(tail);
  return true;
}

}  // namespace detail

// Named patterns understood without a catalog file.
inline bool builtin_graph_pattern(const std::string& name, GraphPattern& out) {
  int k = 0;
  if (name == "vertex") out = vertex_pattern();
  else if (name == "edge") out = edge_pattern();
  else if (name == "triangle") out = triangle_pattern();
  else if (detail::split_suffix(name, "path", k)) out = path_pattern(k);
  else if (detail::split_suffix(name, "clique", k)) out = clique_pattern(k);
  else if (detail::split_suffix(name, "cycle", k)) out = cycle_pattern(k);
  else if (detail::split_suffix(name, "star", k)) out = star_pattern(k);
  else if (detail::split_suffix(name, "cross_polytope", k)) out = cross_polytope_skeleton(k);
  else return false;
  return true;
}

inline bool builtin_complex_pattern(const std::string& name, ComplexPattern& out) {
  int k = 0;
  if (detail::split_suffix(name, "empty_simplex_edge", k)) out = empty_simplex_edge(k);
  else if (detail::split_suffix(name, "empty_simplex_path", k)) out = empty_simplex_path(k);
  else if (detail::split_suffix(name, "empty_simplex", k)) out = empty_simplex(k);
  else if (detail::split_suffix(name, "simplex", k)) out = full_simplex(k);
  else return false;
  return true;
}

// Catalog text format, one pattern per line:
//   name k a-b a-b ... [| a-b-c ...]
// Edges before the bar; higher faces after it make a complex pattern.
struct PatternCatalog {
  std::map<std::string, GraphPattern> graphs;
  std::map<std::string, ComplexPattern> complexes;

  static PatternCatalog parse(std::istream& in) {
    PatternCatalog cat;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
      std::istringstream s(line);
      std::string name;
      if (!(s >> name)) continue;
      auto where = "pattern catalog line " + std::to_string(lineno) + ": ";
      int k = 0;
      require(static_cast<bool>(s >> k), errc::config, where + "missing vertex count");
      std::vector<std::pair<int, int>> edges;
      std::vector<std::vector<int>> faces;
      bool after_bar = false;
      std::string tok;
      while (s >> tok) {
        if (tok == "|") {
          after_bar = true;
          continue;
        }
        std::vector<int> vs;
        std::istringstream ts(tok);
        std::string part;
        while (std::getline(ts, part, '-')) {
          require(!part.empty() && std::all_of(part.begin(), part.end(), ::isdigit),
                  errc::config, where + "bad face token '" + tok + "'");
          vs.push_back(std::stoi(part));
        }
        if (!after_bar) {
          require(vs.size() == 2, errc::config, where + "edges must have two endpoints");
          edges.emplace_back(vs[0], vs[1]);
        } else {
          faces.push_back(vs);
        }
      }
      try {
        if (after_bar) {
          for (auto [a, b] : edges) faces.push_back({a, b});
          cat.complexes[name] = ComplexPattern(name, k, faces);
        } else {
          cat.graphs[name] = GraphPattern(name, k, edges);
        }
      } catch (const error& e) {
        fail(errc::config, where + e.what());
      }
    }
    return cat;
  }

  static PatternCatalog load(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), errc::io, "cannot open pattern catalog " + path);
    return parse(in);
  }

  GraphPattern graph(const std::string& name) const {
    if (auto it = graphs.find(name); it != graphs.end()) return it->second;
    GraphPattern p;
    require(builtin_graph_pattern(name, p), errc::config, "unknown graph pattern '" + name + "'");
    return p;
  }

  ComplexPattern complex(const std::string& name) const {
    if (auto it = complexes.find(name); it != complexes.end()) return it->second;
    ComplexPattern p;
    if (builtin_complex_pattern(name, p)) return p;
    GraphPattern g;
    if (auto it = graphs.find(name); it != graphs.end()) return flag_complex(it->second);
    require(builtin_graph_pattern(name, g), errc::config, "unknown complex pattern '" + name + "'");
    return flag_complex(g);
  }
};

}  // namespace rgc
