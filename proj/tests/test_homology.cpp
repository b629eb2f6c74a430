#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "rgc/homology.hpp"

using namespace rgc;

namespace {

PointSet square4() { return PointSet(2, {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}); }

SimplicialComplex from_faces(std::size_t n, int max_dim, const std::vector<std::vector<std::uint32_t>>& faces) {
  SimplicialComplex k(n, max_dim);
  for (const auto& f : faces) k.add(f);
  k.finalize();
  return k;
}

SimplicialComplex tetrahedron_boundary() {
  std::vector<std::vector<std::uint32_t>> f;
  for (std::uint32_t a = 0; a < 4; ++a) f.push_back({a});
  for (std::uint32_t a = 0; a < 4; ++a)
    for (std::uint32_t b = a + 1; b < 4; ++b) f.push_back({a, b});
  f.push_back({0, 1, 2});
  f.push_back({0, 1, 3});
  f.push_back({0, 2, 3});
  f.push_back({1, 2, 3});
  return from_faces(4, 3, f);
}

long long alternating(const BettiVector& b) {
  long long s = 0;
  for (std::size_t k = 0; k < b.b.size(); ++k) s += (k % 2 ? -1 : 1) * b.b[k];
  return s;
}

}  // namespace

TEST(Betti, Examples) {
  auto cyc = build_rips(square4(), 1.5, 2);
  auto b = betti_numbers(cyc);
  EXPECT_EQ(b[0], 1);
  EXPECT_EQ(b[1], 1);
  auto t = betti_numbers(tetrahedron_boundary());
  EXPECT_EQ(t[0], 1);
  EXPECT_EQ(t[1], 0);
  EXPECT_EQ(t[2], 1);
  EXPECT_EQ(t[3], 0);
}

TEST(Betti, MalformedRejected) {
  SimplicialComplex k(2, 1);
  std::vector<std::uint32_t> e{0, 1}, v{0};
  k.add(e);
  k.add(v);
  k.finalize();
  try {
    betti_numbers(k);
    FAIL();
  } catch (const error& err) {
    EXPECT_EQ(err.code(), errc::malformed_complex);
  }
}

TEST(Betti, DenseOracle) {
  for (int t = 0; t < 40; ++t) {
    const int d = 2 + t % 2;
    auto p = oracle::uniform_points(15, d, 2.5, 2000 + t);
    const double eps = 0.7 + 0.05 * (t % 12);
    for (bool cech : {false, true}) {
      auto k = cech ? build_cech(p, eps, 3) : build_rips(p, eps, 3);
      auto ref = oracle::betti(oracle::complex_faces(p, eps, 3, cech));
      auto b = betti_numbers(k);
      for (int q = 0; q <= 3; ++q) EXPECT_EQ(b[q], ref[q]) << "t=" << t << " q=" << q << " cech=" << cech;
    }
  }
}

TEST(Euler, Examples) {
  EXPECT_EQ(euler_characteristic(from_faces(1, 0, {{0}})), 1);
  EXPECT_EQ(euler_characteristic(build_rips(square4(), 1.5, 2)), 0);
  EXPECT_EQ(euler_characteristic(tetrahedron_boundary()), 2);
}

TEST(Euler, MatchesAlternatingBettiSum) {
  for (int t = 0; t < 40; ++t) {
    auto cfg = sample(Poisson{}, Window(2 + t % 2, 40), 0, 2100 + t);
    const double eps = 0.6 + 0.04 * t;
    for (auto kind : {ComplexKind::rips, ComplexKind::cech}) {
      auto k = build_complex(kind, cfg.points().subset(cfg.window_ids()), eps, 4);
      EXPECT_EQ(euler_characteristic(k), alternating(betti_numbers(k)));
    }
  }
}

TEST(Betti, BettiZeroAgreesAcrossComplexesAndGraph) {
  for (int t = 0; t < 30; ++t) {
    auto cfg = sample(Poisson{}, Window(2, 60), 0, 2200 + t);
    const double eps = 0.5 + 0.05 * t;
    auto comps = static_cast<long long>(connected_components(build_graph(cfg, eps, false)).size());
    EXPECT_EQ(betti_numbers(build_rips(cfg, eps, 1))[0], comps);
    EXPECT_EQ(betti_numbers(build_cech(cfg, eps, 1))[0], comps);
  }
}

// Higher-dimensional Cech homology vanishes in the plane; the top computed
// dimension is excluded because truncation leaves its cycles unfilled.
TEST(Betti, PlanarCechVanishesAboveOne) {
  for (int t = 0; t < 30; ++t) {
    auto cfg = sample(Poisson{}, Window(2, 30), 0, 2300 + t);
    auto b = betti_numbers(build_cech(cfg, 0.8 + 0.05 * t, 5));
    for (int k = 2; k < 5; ++k) EXPECT_EQ(b[k], 0) << "t=" << t << " k=" << k;
  }
}

TEST(Persistence, TwoPoints) {
  auto bc = persistence(rips_filtration(PointSet(2, {{0, 0}, {0.7, 0}}), 1, 5.0));
  auto h0 = bc.in_dim(0);
  ASSERT_EQ(h0.size(), 2u);
  EXPECT_EQ(h0[0].birth, 0);
  EXPECT_NEAR(h0[0].death, 0.7, 1e-15);
  EXPECT_TRUE(h0[1].essential());
}

TEST(Persistence, SquareLoop) {
  auto bc = persistence(rips_filtration(square4(), 2, 3.0));
  auto h1 = bc.in_dim(1);
  ASSERT_EQ(h1.size(), 1u);
  EXPECT_NEAR(h1[0].birth, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(h1[0].death, 2.0, 1e-12);
  auto h0 = bc.in_dim(0);
  EXPECT_EQ(std::count_if(h0.begin(), h0.end(), [](const Bar& b) { return b.essential(); }), 1);
}

TEST(Persistence, BarcodeConventions) {
  auto bc = persistence(rips_filtration(square4(), 2, 3.0));
  EXPECT_EQ(betti_from_barcode(bc, -0.1)[0], 0);
  EXPECT_EQ(betti_from_barcode(bc, std::sqrt(2.0))[1], 1);  // closed on the left
  EXPECT_EQ(betti_from_barcode(bc, 2.0)[1], 0);             // open on the right
  for (double eps : {0.5, 1.0, 1.9}) {
    EXPECT_EQ(betti_from_barcode(bc, eps), betti_numbers(build_rips(square4(), eps, 2)));
    auto two = PointSet(2, {{0, 0}, {0.7, 0}});
    EXPECT_EQ(betti_from_barcode(persistence(rips_filtration(two, 1, 5.0)), eps),
              betti_numbers(build_rips(two, eps, 1)));
  }
}

TEST(Persistence, SliceOracle) {
  std::mt19937_64 g(77);
  for (int t = 0; t < 16; ++t) {
    auto p = oracle::uniform_points(25, 2 + t % 2, 3.5, 2400 + t);
    for (auto kind : {ComplexKind::rips, ComplexKind::cech}) {
      auto f = build_filtration(kind, p, 3, 3.0);
      auto bc = persistence(f);
      for (int i = 0; i < 5; ++i) {
        const double eps = std::uniform_real_distribution<double>(0.1, 2.9)(g);
        EXPECT_EQ(betti_from_barcode(bc, eps), betti_numbers(f.slice(eps))) << "t=" << t << " eps=" << eps;
      }
    }
  }
}

TEST(Persistence, ComponentsGetEssentialBars) {
  auto cfg = sample(Poisson{}, Window(2, 50), 0, 2500);
  auto bc = persistence(rips_filtration(cfg.points().subset(cfg.window_ids()), 1, 1.0));
  auto comps = connected_components(build_graph(cfg, 1.0, false)).size();
  auto h0 = bc.in_dim(0);
  EXPECT_EQ(static_cast<std::size_t>(std::count_if(h0.begin(), h0.end(), [](const Bar& b) { return b.essential(); })),
            comps);
}

TEST(Persistence, NonMonotoneRejected) {
  std::vector<FilteredSimplex> s(3);
  s[0].v[0] = 0;
  s[1].v[0] = 1;
  s[1].birth = 1.0;
  s[2].dim = 1;
  s[2].v = {0, 1};
  s[2].birth = 0.5;
  EXPECT_THROW(persistence(Filtration(2, 1, 2.0, s)), error);
}

TEST(Persistence, CsvFormat) {
  std::ostringstream out;
  write_barcode_csv(out, persistence(rips_filtration(PointSet(2, {{0, 0}, {0.5, 0}}), 1, 1.0)));
  EXPECT_EQ(out.str(), "dim,birth,death\n0,0,0.5\n0,0,inf\n");
}

TEST(Sandwich, Examples) {
  auto sq = PointConfiguration::enclosing(square4());
  auto r = check_sandwich(sq, 1.5, ComplexKind::rips, 1);
  EXPECT_EQ(r.lower, 1);
  EXPECT_EQ(r.betti, 1);
  EXPECT_EQ(r.upper, 1);
  auto tri = PointConfiguration::enclosing(PointSet(2, {{0, 0}, {0.9, 0}, {0.45, 0.9 * std::sqrt(3.0) / 2}}));
  auto c = check_sandwich(tri, 1.0, ComplexKind::cech, 1);
  EXPECT_EQ(c.lower, 1);
  EXPECT_EQ(c.betti, 1);
  EXPECT_TRUE(c.holds());
  EXPECT_THROW(check_sandwich(sq, 1.5, ComplexKind::rips, 2), error);
  EXPECT_THROW(check_sandwich(sq, 1.5, ComplexKind::cech, 2), error);
}

TEST(Sandwich, DetailDeterminant) {
  EXPECT_EQ(detail::bareiss_determinant({{2, 1}, {1, 3}}), 5);
  EXPECT_EQ(detail::bareiss_determinant({{0, 1}, {1, 0}}), -1);
  std::vector<std::vector<long long>> k5(5, std::vector<long long>(5, 1));
  for (int i = 0; i < 5; ++i) k5[i][i] = 0;
  EXPECT_EQ(detail::spanning_trees(k5), 125);  // Cayley
}

TEST(Sandwich, HoldsOnSparseSamples) {
  for (int t = 0; t < 60; ++t) {
    const int d = 2 + t % 2;
    auto cfg = sample(Poisson{}, Window(d, 30), 0, 2600 + t);
    const double eps = 0.4 + 0.05 * (t % 12);
    EXPECT_TRUE(check_sandwich(cfg, eps, ComplexKind::rips, 1).holds()) << "t=" << t;
    for (int k = 1; k < d; ++k) {
      auto rep = check_sandwich(cfg, eps, ComplexKind::cech, k);
      EXPECT_TRUE(rep.holds()) << "t=" << t << " k=" << k << " " << rep.lower << " " << rep.betti << " "
                               << rep.upper;
    }
  }
}
