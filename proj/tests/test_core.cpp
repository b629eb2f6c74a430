#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "rgc/io.hpp"
#include "rgc/parallel.hpp"
#include "rgc/pointproc.hpp"
#include "rgc/random.hpp"
#include "rgc/stats.hpp"

using namespace rgc;

namespace {

PerturbedLattice lattice(Replication kind) {
  PerturbedLattice m;
  m.law.kind = kind;
  return m;
}

double mean_count(const ModelSpec& m, double n, int replicates, std::uint64_t seed, int d = 2) {
  std::vector<double> c(replicates);
  for (int i = 0; i < replicates; ++i)
    c[i] = static_cast<double>(sample(m, Window(d, n), 0, stream_seed(seed, i)).window_count());
  return summarize(c).mean;
}

}  // namespace

TEST(Stats, SummaryMatchesTwoPass) {
  std::vector<double> x{1, 4, 2, 8, 5, 7};
  auto s = summarize(x);
  double m = 27.0 / 6, v = 0;
  for (double t : x) v += (t - m) * (t - m);
  EXPECT_DOUBLE_EQ(s.mean, m);
  EXPECT_NEAR(s.variance, v / 5, 1e-12);
  EXPECT_NEAR(s.ci_half_width(), z95 * std::sqrt(v / 5 / 6), 1e-12);
}

TEST(Stats, WilsonContainsProportion) {
  auto [lo, hi] = wilson_interval(30, 100);
  EXPECT_LT(lo, 0.3);
  EXPECT_GT(hi, 0.3);
  auto [z0, z1] = wilson_interval(0, 50);
  EXPECT_NEAR(z0, 0.0, 1e-15);
  EXPECT_GT(z1, 0.0);
}

TEST(Stats, TheilSenIgnoresOutlier) {
  std::vector<double> x{0, 1, 2, 3, 4, 5}, y{0, 2, 4, 6, 100, 10};
  EXPECT_DOUBLE_EQ(theil_sen_slope(x, y), 2.0);
}

TEST(Stats, WeightedFitExactLine) {
  std::vector<double> x{1, 2, 3, 4}, y{5, 7, 9, 11}, w{1, 2, 3, 4};
  auto f = weighted_line_fit(x, y, w);
  EXPECT_NEAR(f.slope, 2, 1e-12);
  EXPECT_NEAR(f.intercept, 3, 1e-12);
  EXPECT_NEAR(f.slope_se, 0, 1e-12);
}

TEST(Random, StreamsDifferAndRepeat) {
  EXPECT_EQ(stream_seed(1, 2), stream_seed(1, 2));
  EXPECT_NE(stream_seed(1, 2), stream_seed(1, 3));
  EXPECT_NE(stream_seed(1, 2), stream_seed(2, 2));
  auto a = make_engine(42), b = make_engine(42);
  EXPECT_EQ(a(), b());
}

TEST(Parallel, ResultIndependentOfThreads) {
  std::vector<double> one(200), four(200);
  auto work = [](std::vector<double>& out) {
    return [&out](std::size_t i) {
      auto e = make_engine(stream_seed(9, i));
      out[i] = std::uniform_real_distribution<double>()(e);
    };
  };
  parallel_for(200, work(one), 1);
  parallel_for(200, work(four), 4);
  EXPECT_EQ(one, four);
}

TEST(Parallel, RethrowsLowestIndex) {
  try {
    parallel_for(50, [](std::size_t i) {
      if (i == 7 || i == 30) fail(errc::geometry, "at " + std::to_string(i));
    }, 3);
    FAIL();
  } catch (const error& e) {
    EXPECT_STREQ(e.what(), "at 7");
  }
}

TEST(Window, SideAndMembership) {
  Window w(3, 1000);
  EXPECT_NEAR(std::pow(w.side(), 3), 1000, 1000 * 1e-12);
  std::vector<double> in{5, -5, 0}, out{5.0001, 0, 0};
  EXPECT_TRUE(w.contains(in));
  EXPECT_FALSE(w.contains(out));
  EXPECT_TRUE(w.contains(out, 0.01));
}

TEST(Sample, Deterministic) {
  for (ModelSpec m : {ModelSpec{Poisson{}}, ModelSpec{Ginibre{}}, ModelSpec{lattice(Replication::binomial)},
                      ModelSpec{CoxCluster{}}, ModelSpec{GefZeros{}}}) {
    auto a = sample(m, Window(2, 60), 1.0, 11);
    auto b = sample(m, Window(2, 60), 1.0, 11);
    EXPECT_EQ(a.points().coords(), b.points().coords()) << model_name(m);
    EXPECT_FALSE(PointConfiguration::has_duplicates(a.points()));
    for (std::size_t i = 0; i < a.points().size(); ++i)
      EXPECT_TRUE(a.window().contains(a.points()[i], 1.0));
  }
}

TEST(Sample, ZeroVolumeIsEmpty) {
  EXPECT_EQ(sample(Poisson{}, Window(2, 0), 0, 3).points().size(), 0u);
}

TEST(Sample, ConstantLatticeOnePerCell) {
  auto m = lattice(Replication::constant);
  m.shift_origin = false;
  auto c = sample(m, Window(2, 100), 0, 5);
  ASSERT_EQ(c.window_count(), 100u);
  std::set<std::pair<long, long>> cells;
  for (auto i : c.window_ids()) {
    auto p = c.points()[i];
    cells.insert({std::lround(std::floor(p[0] + 5.0 - 1e-15)), std::lround(std::floor(p[1] + 5.0 - 1e-15))});
  }
  EXPECT_EQ(cells.size(), 100u);
}

TEST(Sample, PoissonCountLaw) {
  std::vector<double> c(400);
  for (int i = 0; i < 400; ++i)
    c[i] = static_cast<double>(sample(Poisson{}, Window(2, 100), 0, stream_seed(77, i)).window_count());
  auto s = summarize(c);
  EXPECT_NEAR(s.mean, 100, 4 * std::sqrt(100.0 / 400));
  EXPECT_NEAR(s.variance, 100, 25);
}

TEST(Sample, GinibreMeanCount) {
  EXPECT_NEAR(mean_count(Ginibre{}, 100, 200, 3), 100, 3);
}

TEST(Sample, PlanarModelsRejectOtherDimensions) {
  EXPECT_THROW(sample(Ginibre{}, Window(3, 10), 0, 1), error);
  EXPECT_THROW(sample(GefZeros{}, Window(1, 10), 0, 1), error);
}

// Mean count / n within 5% at n = 1000 over 200 replicates. The planar
// models are expensive and their count variance grows only with the
// perimeter, so they use a handful of replicates.
TEST(Sample, UnitIntensityAllModels) {
  std::vector<ModelSpec> models{Poisson{},
                                CoxCluster{},
                                lattice(Replication::constant),
                                lattice(Replication::binomial),
                                lattice(Replication::hypergeometric),
                                lattice(Replication::negative_binomial),
                                lattice(Replication::geometric)};
  for (const auto& m : models)
    EXPECT_NEAR(mean_count(m, 1000, 200, 21) / 1000, 1.0, 0.05) << model_name(m);
  EXPECT_NEAR(mean_count(Poisson{}, 1000, 200, 22, 3) / 1000, 1.0, 0.05);
  EXPECT_NEAR(mean_count(Ginibre{}, 1000, 5, 23) / 1000, 1.0, 0.05);
  EXPECT_NEAR(mean_count(GefZeros{}, 1000, 10, 24) / 1000, 1.0, 0.05);
}

TEST(Sample, StationarityProxy) {
  for (ModelSpec m : {ModelSpec{Poisson{}}, ModelSpec{Ginibre{}}, ModelSpec{lattice(Replication::binomial)}}) {
    std::vector<double> a, b;
    for (int i = 0; i < 200; ++i) {
      auto c = sample(m, Window(2, 100), 0, stream_seed(31, i));
      double x = 0, y = 0;
      for (auto id : c.window_ids()) {
        auto p = c.points()[id];
        if (p[1] < 0) continue;
        if (p[0] >= -4.5 && p[0] < -0.5) ++x;
        if (p[0] >= 0.5 && p[0] < 4.5) ++y;
      }
      a.push_back(x);
      b.push_back(y);
    }
    auto sa = summarize(a), sb = summarize(b);
    EXPECT_LT(std::abs(sa.mean - sb.mean), 3 * std::hypot(sa.se(), sb.se()) + 1e-9) << model_name(m);
  }
}

TEST(JointIntensity, Values) {
  PointSet two(2, {{0, 0}, {1, 0}});
  EXPECT_EQ(joint_intensity(Poisson{}, two), 1.0);
  EXPECT_NEAR(joint_intensity(Ginibre{}, two), 1 - std::exp(-M_PI), 1e-12);
  EXPECT_EQ(joint_intensity(Ginibre{}, PointSet(2, {{0, 0}, {0, 0}})), 0.0);
  EXPECT_THROW(joint_intensity(CoxCluster{}, two), error);
  EXPECT_THROW(joint_intensity(GefZeros{}, two), error);
}

TEST(JointIntensity, SymmetricAndMatchesPairFormula) {
  PointSet p(2, {{0.1, 0.3}, {-0.4, 0.2}, {0.5, -0.6}});
  PointSet q(2, {{0.5, -0.6}, {0.1, 0.3}, {-0.4, 0.2}});
  EXPECT_NEAR(joint_intensity(Ginibre{}, p), joint_intensity(Ginibre{}, q), 1e-12);
  // the 3x3 determinant path agrees with the closed form for pairs
  PointSet a(2, {{0.1, 0.3}, {-0.4, 0.2}});
  Eigen::Matrix2cd K;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) K(i, j) = detail::ginibre_kernel(a[i], a[j]);
  EXPECT_NEAR(K.determinant().real(), joint_intensity(Ginibre{}, a), 1e-12);
}

TEST(Void, PoissonUnitDisk) {
  auto rec = estimate_void(Poisson{}, Window(2, 16), Ball{{0, 0}, 1.0}, 4000, 8);
  EXPECT_LE(rec.lower(), std::exp(-M_PI));
  EXPECT_GE(rec.upper(), std::exp(-M_PI));
}

TEST(Void, ZeroRadiusIsOne) {
  auto rec = estimate_void(Ginibre{}, Window(2, 16), Ball{{0, 0}, 0.0}, 10, 8);
  EXPECT_EQ(rec.mean, 1.0);
}

TEST(Void, RegionOutsideWindowRejected) {
  EXPECT_THROW(estimate_void(Poisson{}, Window(2, 4), Ball{{0, 0}, 1.5}, 10, 1), error);
}

TEST(Void, Ordering) {
  Window w(2, 9);
  Ball b{{0, 0}, 1.0};
  auto gin = estimate_void(Ginibre{}, w, b, 3000, 4);
  auto poi = estimate_void(Poisson{}, w, b, 3000, 5);
  auto nb = estimate_void(lattice(Replication::negative_binomial), w, b, 3000, 6);
  EXPECT_LT(gin.upper(), poi.lower());
  EXPECT_LT(poi.upper(), nb.lower());
}

TEST(Void, GinibreBelowPoissonAtRadius15) {
  Window w(2, 9);
  Ball b{{0, 0}, 1.5};
  auto gin = estimate_void(Ginibre{}, w, b, 25000, 14);
  auto poi = estimate_void(Poisson{}, w, b, 25000, 15);
  EXPECT_LT(gin.mean, poi.mean);
  EXPECT_LT(gin.upper(), poi.lower());
}

TEST(Palm, PoissonSlivnyak) {
  PointSet anchor(2, {{0, 0}});
  auto f = CountFunctional::count(annulus({0, 0}, 1.0, 2.0));
  auto est = estimate_palm_functional(Poisson{}, Window(2, 36), anchor, 0.3, f, 3000, 12);
  double gap = std::abs(est.palm.mean - est.unconditional.mean);
  EXPECT_LT(gap, 3 * std::sqrt(est.palm.variance / est.palm.replicates +
                               est.unconditional.variance / est.unconditional.replicates));
  EXPECT_NEAR(est.acceptance_rate, 1 - std::exp(-M_PI * 0.09), 0.03);
}

TEST(Palm, GinibreIncreasingFunctionalBelowUnconditional) {
  PointSet anchor(2, {{0, 0}});
  auto f = CountFunctional::count(annulus({0, 0}, 0.3, 1.2));
  auto est = estimate_palm_functional(Ginibre{}, Window(2, 9), anchor, 0.25, f, 3000, 13);
  EXPECT_LE(est.palm.lower(), est.unconditional.upper());
  EXPECT_LT(est.palm.mean, est.unconditional.mean);
}

TEST(Palm, ErrorsReported) {
  PointSet anchor(2, {{0, 0}});
  auto f = CountFunctional::count(annulus({0, 0}, 0.0, 1.0));
  EXPECT_THROW(estimate_palm_functional(Poisson{}, Window(2, 36), anchor, 0.3, f, 10, 1), error);
  auto g = CountFunctional::count(annulus({0, 0}, 1.0, 2.0));
  try {
    estimate_palm_functional(Poisson{}, Window(2, 36), anchor, 1e-6, g, 5, 1);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::insufficient_conditioning);
  }
}

TEST(Io, PointsRoundTrip) {
  auto c = sample(Poisson{}, Window(2, 30), 0.5, 3);
  std::stringstream s;
  write_points_csv(s, c);
  auto back = read_points_csv(s, 2);
  EXPECT_EQ(back.coords(), c.points().coords());
  std::stringstream t("x0,x1\n1.5,2\n-3,4e-1\n");
  auto p = read_points_csv(t, 2);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[1][1], 0.4);
}
