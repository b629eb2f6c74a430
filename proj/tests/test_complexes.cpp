#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "oracles.hpp"
#include "rgc/complexes.hpp"
#include "rgc/miniball.hpp"

using namespace rgc;

namespace {

PointSet equilateral(double s) { return PointSet(2, {{0, 0}, {s, 0}, {s / 2, s * std::sqrt(3.0) / 2}}); }
PointSet square4() { return PointSet(2, {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}); }

std::set<std::vector<int>> face_set(const SimplicialComplex& k) {
  std::set<std::vector<int>> s;
  for (int p = 0; p <= k.max_dim(); ++p)
    for (std::size_t i = 0; i < k.count(p); ++i) {
      auto f = k.face(p, i);
      s.insert(std::vector<int>(f.begin(), f.end()));
    }
  return s;
}

std::vector<ComplexPattern> complex_patterns() {
  return {empty_simplex(3), full_simplex(3), empty_simplex_edge(3), empty_simplex_path(3), empty_simplex(4),
          flag_complex(path_pattern(3)), flag_complex(cross_polytope_skeleton(1))};
}

}  // namespace

TEST(Rips, Examples) {
  auto k = build_rips(equilateral(0.9), 1.0, 2);
  EXPECT_EQ(k.count(2), 1u);
  auto c = build_rips(square4(), 1.5, 2);
  EXPECT_EQ(c.count(1), 4u);
  EXPECT_EQ(c.count(2), 0u);
}

TEST(Cech, Examples) {
  EXPECT_EQ(build_cech(equilateral(0.9), 1.0, 2).count(2), 0u);
  EXPECT_EQ(build_cech(equilateral(0.8), 1.0, 2).count(2), 1u);
}

TEST(Miniball, AgreesWithEnumerationOracle) {
  std::mt19937_64 g(17);
  for (int t = 0; t < 400; ++t) {
    const int d = 2 + t % 2, m = 2 + t % 4;
    auto p = oracle::uniform_points(m, d, 2, 1000 + t);
    EXPECT_NEAR(miniball_radius(p), oracle::miniball_radius(p), 1e-7) << "t=" << t;
    auto s = miniball(p);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_LE(dist(s.center, p[i]), s.radius + 1e-9);
  }
}

TEST(Miniball, DegenerateSets) {
  PointSet line(2, {{0, 0}, {1, 0}, {2, 0}, {0.5, 0}});
  EXPECT_NEAR(miniball_radius(line), 1.0, 1e-12);
  PointSet same(3, {{1, 1, 1}});
  EXPECT_EQ(miniball_radius(same), 0.0);
  PointSet flat(3, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}});
  EXPECT_NEAR(miniball_radius(flat), std::sqrt(0.5), 1e-12);
}

TEST(Complexes, OracleEquivalence) {
  for (int t = 0; t < 30; ++t) {
    const int n = 8 + t % 8, d = 2 + t % 2;
    auto p = oracle::uniform_points(n, d, 2.5, 1100 + t);
    const double eps = 0.6 + 0.08 * (t % 10);
    const int top = 3;
    for (bool cech : {false, true}) {
      auto k = cech ? build_cech(p, eps, top) : build_rips(p, eps, top);
      EXPECT_TRUE(k.valid());
      EXPECT_EQ(face_set(k), oracle::face_set(oracle::complex_faces(p, eps, top, cech))) << "t=" << t << " cech=" << cech;
    }
  }
}

TEST(Complexes, InterleavingAndSharedSkeleton) {
  for (int t = 0; t < 30; ++t) {
    auto cfg = sample(Poisson{}, Window(2 + t % 2, 30), 0, 1200 + t);
    const double eps = 0.5 + 0.05 * t;
    auto cech = build_cech(cfg, eps, 3), rips = build_rips(cfg, eps, 3);
    auto cech2 = build_cech(cfg, 2 * eps, 3);
    EXPECT_TRUE(cech.subcomplex_of(rips));
    EXPECT_TRUE(rips.subcomplex_of(cech2));
    EXPECT_EQ(cech.count(0), rips.count(0));
    EXPECT_EQ(cech.count(1), rips.count(1));
    EXPECT_TRUE(cech.valid());
    EXPECT_TRUE(rips.valid());
  }
}

TEST(Complexes, ValidatorCatchesMissingFacet) {
  SimplicialComplex k(3, 2);
  std::uint32_t tri[] = {0, 1, 2}, e01[] = {0, 1};
  k.add(tri);
  k.add(e01);
  for (std::uint32_t v = 0; v < 3; ++v) k.add(std::span<const std::uint32_t>(&v, 1));
  k.finalize();
  EXPECT_FALSE(k.valid());
  EXPECT_THROW(k.validate(), error);
}

TEST(Filtration, Births) {
  PointSet two(2, {{0, 0}, {0.7, 0}});
  for (auto kind : {ComplexKind::rips, ComplexKind::cech}) {
    auto f = build_filtration(kind, two, 1, 5.0);
    ASSERT_EQ(f.size(), 3u);
    EXPECT_NEAR(f.simplices().back().birth, 0.7, 1e-15);
  }
  const double s = 0.9;
  auto r = rips_filtration(equilateral(s), 2, 5.0);
  auto c = cech_filtration(equilateral(s), 2, 5.0);
  EXPECT_NEAR(r.simplices().back().birth, s, 1e-12);
  EXPECT_NEAR(c.simplices().back().birth, 2 * s / std::sqrt(3.0), 1e-12);
}

TEST(Filtration, SliceMatchesDirectBuild) {
  std::mt19937_64 g(5);
  for (int t = 0; t < 12; ++t) {
    auto p = oracle::uniform_points(20, 2 + t % 2, 3, 1300 + t);
    for (auto kind : {ComplexKind::rips, ComplexKind::cech}) {
      auto f = build_filtration(kind, p, 3, 3.0);
      EXPECT_TRUE(f.monotone());
      for (int i = 0; i < 5; ++i) {
        const double eps = std::uniform_real_distribution<double>(0.2, 2.9)(g);
        EXPECT_EQ(f.slice(eps), build_complex(kind, p, eps, 3)) << "t=" << t << " eps=" << eps;
      }
    }
  }
}

TEST(Filtration, NonMonotoneRejected) {
  std::vector<FilteredSimplex> s(3);
  s[0].dim = 0;
  s[0].v[0] = 0;
  s[1].dim = 0;
  s[1].v[0] = 1;
  s[1].birth = 0.5;
  s[2].dim = 1;
  s[2].v[0] = 0;
  s[2].v[1] = 1;
  s[2].birth = 0.2;
  Filtration f(2, 1, 1.0, s);
  try {
    f.validate();
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::non_monotone);
  }
}

TEST(Filtration, WriteFormat) {
  std::ostringstream out;
  rips_filtration(PointSet(2, {{0, 0}, {0.5, 0}}), 1, 1.0).write(out);
  EXPECT_EQ(out.str(), "0;0;0\n0;1;0\n1;0,1;0.5\n");
}

TEST(Subcomplexes, Examples) {
  auto cfg = PointConfiguration::enclosing(equilateral(0.9));
  EXPECT_EQ(count_subcomplexes(cfg, 1.0, empty_simplex(3), true, CountMode::interior), 1u);
  EXPECT_EQ(count_subcomplexes(cfg, 1.0, full_simplex(3), true, CountMode::interior), 0u);
}

TEST(Subcomplexes, OracleEquivalence) {
  for (int t = 0; t < 40; ++t) {
    const int n = 6 + t % 7;
    auto p = oracle::uniform_points(n, 2, 2.5, 1400 + t);
    auto cfg = PointConfiguration::enclosing(p);
    const double eps = 0.6 + 0.1 * (t % 6);
    for (const auto& pat : complex_patterns())
      for (bool iso : {false, true})
        EXPECT_EQ(count_subcomplexes(cfg, eps, pat, iso, CountMode::interior),
                  static_cast<std::uint64_t>(oracle::subcomplex_count(p, eps, pat, iso)))
            << pat.name << " iso=" << iso << " t=" << t;
  }
}

TEST(Generators, Shapes) {
  auto o1 = cross_polytope_skeleton(1);
  EXPECT_EQ(o1.k, 4);
  EXPECT_EQ(o1.edges.size(), 4u);
  EXPECT_TRUE(isomorphic(o1.graph(), cycle_pattern(4).graph()));
  auto o2 = cross_polytope_skeleton(2);
  EXPECT_EQ(o2.k, 6);
  EXPECT_EQ(o2.edges.size(), 12u);
  auto e3 = empty_simplex(3);
  EXPECT_EQ(e3.k, 3);
  EXPECT_EQ(e3.faces.size(), 6u);  // 3 vertices, 3 edges, no triangle
  auto e4 = empty_simplex(4);
  EXPECT_EQ(e4.faces.size(), 14u);  // 4 + 6 + 4
  EXPECT_EQ(empty_simplex_edge(3).k, 4);
  EXPECT_EQ(empty_simplex_path(3).k, 4);
  EXPECT_THROW(cross_polytope_skeleton(4), error);
  EXPECT_THROW(empty_simplex(1), error);
}
