#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "rgc/error.hpp"

namespace rgc {

struct EstimateRecord {
  std::string statistic;
  std::string model;
  double n = 0;
  double r = 0;
  std::size_t replicates = 0;
  double mean = 0;
  double variance = 0;
  double ci_half_width = 0;
  std::uint64_t seed = 0;
  std::size_t excluded = 0;
  // Only set by estimators with asymmetric intervals or conditioning.
  double ci_low = std::numeric_limits<double>::quiet_NaN();
  double ci_high = std::numeric_limits<double>::quiet_NaN();
  std::size_t accepted = 0;

  double lower() const { return std::isnan(ci_low) ? mean - ci_half_width : ci_low; }
  double upper() const { return std::isnan(ci_high) ? mean + ci_half_width : ci_high; }
};

constexpr double z95 = 1.959963984540054;

struct Summary {
  std::size_t count = 0;
  double mean = 0;
  double variance = 0;  // unbiased
  double se() const { return count > 1 ? std::sqrt(variance / count) : 0.0; }
  double ci_half_width() const { return z95 * se(); }
};

inline Summary summarize(std::span<const double> xs) {
  Summary s;
  // Welford
  for (double x : xs) {
    ++s.count;
    double d = x - s.mean;
    s.mean += d / s.count;
    s.variance += d * (x - s.mean);
  }
  s.variance = s.count > 1 ? s.variance / (s.count - 1) : 0.0;
  return s;
}

// Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials,
                                                 double z = z95) {
  if (trials == 0) return {0.0, 1.0};
  double n = static_cast<double>(trials);
  double p = successes / n;
  double z2 = z * z;
  double denom = 1 + z2 / n;
  double centre = (p + z2 / (2 * n)) / denom;
  double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

inline double quantile(std::vector<double> xs, double q) {
  require(!xs.empty(), errc::invalid_argument, "quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  double pos = q * (xs.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  auto hi = std::min(lo + 1, xs.size() - 1);
  double frac = pos - lo;
  return xs[lo] * (1 - frac) + xs[hi] * frac;
}

inline double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

// Theil-Sen slope: median of pairwise slopes.
inline double theil_sen_slope(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, errc::invalid_argument,
          "Theil-Sen needs at least two points");
  std::vector<double> slopes;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      if (x[j] != x[i]) slopes.push_back((y[j] - y[i]) / (x[j] - x[i]));
  require(!slopes.empty(), errc::invalid_argument, "Theil-Sen with all x equal");
  return median(std::move(slopes));
}

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double slope_se = 0;
};

// Weighted least squares y = a + b x; weights are inverse variances.
inline LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                                 std::span<const double> w) {
  std::size_t n = x.size();
  require(n >= 2 && y.size() == n && w.size() == n, errc::invalid_argument,
          "line fit needs matching series of length >= 2");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0, errc::invalid_argument, "line fit with degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  // Residual-scaled standard error, so unit weights give the OLS formula.
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = y[i] - f.intercept - f.slope * x[i];
    rss += w[i] * e * e;
  }
  f.slope_se = n > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
  return f;
}

}  // namespace rgc
