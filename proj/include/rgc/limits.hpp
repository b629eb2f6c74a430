#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rgc/complexes.hpp"
#include "rgc/geograph.hpp"
#include "rgc/geometry.hpp"
#include "rgc/morse.hpp"
#include "rgc/parallel.hpp"
#include "rgc/pointproc.hpp"
#include "rgc/random.hpp"
#include "rgc/stats.hpp"

namespace rgc {

struct LimitConstant {
  std::string id;       // mu0 | mu_beta | gamma_beta | nu_k
  std::string pattern;  // pattern name or index label
  std::string model;
  double beta = 0;
  double estimate = 0;
  double se = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string method;   // integral | simulation
};

inline void write_limits_csv_header(std::ostream& out) {
  out << "id,pattern,model,beta,estimate,se,samples,seed\n";
}
inline void write_limits_csv_row(std::ostream& out, const LimitConstant& c) {
  auto old = out.precision(17);
  out << c.id << ',' << c.pattern << ',' << c.model << ',' << c.beta << ',' << c.estimate << ','
      << c.se << ',' << c.samples << ',' << c.seed << '\n';
  out.precision(old);
}

inline constexpr int mc_batches = 32;
inline constexpr double ginibre_limit_scale = 1e-3;

namespace detail {

inline void uniform_in_ball(engine& rng, int d, double radius, std::span<double> out) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double s = 0;
  for (int c = 0; c < d; ++c) {
    out[c] = g(rng);
    s += out[c] * out[c];
  }
  const double rho = radius * std::pow(u(rng), 1.0 / d) / std::sqrt(s);
  for (int c = 0; c < d; ++c) out[c] *= rho;
}

struct McResult {
  double estimate = 0;
  double se = 0;
};

// Integral over y in B_0(support)^(m-1) of f(0, y_1, ..., y_{m-1}) by plain
// Monte Carlo in independent batches; SE from the batch means.
inline McResult integrate_configurations(int m, int d, double support, std::size_t samples,
                                         std::uint64_t seed,
                                         const std::function<double(const PointSet&, engine&)>& f) {
  require(samples >= static_cast<std::size_t>(mc_batches), errc::invalid_argument,
          "at least 32 Monte Carlo samples are needed");
  const double volume = std::pow(unit_ball_volume(d) * std::pow(support, d), m - 1);
  std::vector<double> batch(mc_batches, 0.0);
  parallel_for(mc_batches, [&](std::size_t b) {
    const std::size_t count = samples / mc_batches + (b < samples % mc_batches ? 1 : 0);
    auto rng = make_engine(stream_seed(seed, b));
    PointSet pts(d, std::vector<double>(static_cast<std::size_t>(m) * d, 0.0));
    double sum = 0;
    for (std::size_t s = 0; s < count; ++s) {
      for (int i = 1; i < m; ++i) uniform_in_ball(rng, d, support, pts.mutable_point(i));
      sum += f(pts, rng);
    }
    batch[b] = volume * sum / count;
  });
  auto s = summarize(batch);
  return {s.mean, s.se()};
}

inline double factorial(int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace detail

// Limit of rho^(k)(r y) / r^(k(k-1)) for the unit-intensity Ginibre process,
// evaluated at r = 1e-3 from the Cauchy-Binet expansion of the kernel
// determinant: a sum over exponent sets m_1 < ... < m_k of
// prod(pi^m / m!) |det[y_i^m_l]|^2 r^(2 * excess), where the excess over the
// minimal set {0, ..., k-1} is cut at 4.
inline double ginibre_scaled_intensity(const PointSet& y, double r = ginibre_limit_scale) {
  require(y.dim() == 2, errc::dimension_mismatch, "Ginibre intensity needs planar points");
  const int k = static_cast<int>(y.size());
  if (k <= 1) return 1.0;
  constexpr int max_excess = 4;
  const int base = k * (k - 1) / 2;
  std::vector<std::complex<double>> z(k);
  double sq = 0;
  for (int i = 0; i < k; ++i) {
    z[i] = {y[i][0], y[i][1]};
    sq += std::norm(z[i]);
  }
  double total = 0;
  std::vector<int> m(k);
  Eigen::MatrixXcd v(k, k);
  auto rec = [&](auto&& self, int pos, int next, int sum) -> void {
    if (pos == k) {
      double weight = 1;
      for (int l = 0; l < k; ++l) weight *= std::pow(M_PI, m[l]) / detail::factorial(m[l]);
      for (int i = 0; i < k; ++i)
        for (int l = 0; l < k; ++l) v(i, l) = std::pow(z[i], m[l]);
      const double det = std::norm(v.partialPivLu().determinant());
      total += weight * det * std::pow(r * r, sum - base);
      return;
    }
    for (int e = next;; ++e) {
      // Smallest completion uses e, e+1, ...
      const int rest = k - pos;
      const int min_sum = sum + rest * e + rest * (rest - 1) / 2;
      if (min_sum > base + max_excess) break;
      m[pos] = e;
      self(self, pos + 1, e + 1, sum + e);
    }
  };
  rec(rec, 0, 0, 0);
  return std::exp(-M_PI * r * r * sq) * total;
}

// g^k at the scale used by the sparse limits: 1 for Poisson, the scaled
// Ginibre limit otherwise.
inline double scaled_intensity(const ModelSpec& model, const PointSet& y) {
  if (std::holds_alternative<Poisson>(model)) return 1.0;
  require(std::holds_alternative<Ginibre>(model), errc::intensity_unavailable,
          "no closed-form intensity scaling for " + model_name(model));
  return ginibre_scaled_intensity(y);
}

// ---- union volume of equal or unequal balls --------------------------------

// Exact area of a union of disks (boundary integral over uncovered arcs).
inline double union_of_disks_area(const std::vector<Ball>& balls) {
  std::vector<Ball> bs;
  for (const auto& b : balls) {
    if (b.radius <= 0) continue;
    bool dup = false;
    for (const auto& c : bs)
      if (c.radius == b.radius && c.center == b.center) dup = true;
    if (!dup) bs.push_back(b);
  }
  double area = 0;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    const double xi = bs[i].center[0], yi = bs[i].center[1], ri = bs[i].radius;
    bool swallowed = false;
    std::vector<std::pair<double, double>> covered;  // angular intervals
    for (std::size_t j = 0; j < bs.size() && !swallowed; ++j) {
      if (j == i) continue;
      const double dx = bs[j].center[0] - xi, dy = bs[j].center[1] - yi, rj = bs[j].radius;
      const double dd = std::hypot(dx, dy);
      if (dd + ri <= rj) {
        swallowed = true;
        break;
      }
      if (dd >= ri + rj || dd + rj <= ri) continue;
      const double mid = std::atan2(dy, dx);
      const double half = std::acos(std::clamp((ri * ri + dd * dd - rj * rj) / (2 * ri * dd), -1.0, 1.0));
      double a = mid - half, b = mid + half;
      // normalise into [-pi, pi), splitting wrapped intervals
      while (a < -M_PI) {
        a += 2 * M_PI;
        b += 2 * M_PI;
      }
      if (b > M_PI) {
        covered.push_back({a, M_PI});
        covered.push_back({-M_PI, b - 2 * M_PI});
      } else {
        covered.push_back({a, b});
      }
    }
    if (swallowed) continue;
    std::sort(covered.begin(), covered.end());
    auto arc = [&](double t0, double t1) {
      if (t1 <= t0) return;
      area += 0.5 * (ri * ri * (t1 - t0) + ri * (xi * (std::sin(t1) - std::sin(t0)) -
                                                  yi * (std::cos(t1) - std::cos(t0))));
    };
    double t = -M_PI;
    for (const auto& [a, b] : covered) {
      arc(t, a);
      t = std::max(t, b);
    }
    arc(t, M_PI);
  }
  return area;
}

// Volume of a union of balls: exact for d <= 2; otherwise an unbiased
// estimate sum(vol) * E[1 / multiplicity] from `samples` points.
inline double union_volume(const std::vector<Ball>& balls, int d, engine& rng,
                           std::size_t samples = 4096) {
  if (balls.empty()) return 0.0;
  if (d == 2) return union_of_disks_area(balls);
  if (d == 1) {
    std::vector<std::pair<double, double>> iv;
    for (const auto& b : balls) iv.push_back({b.center[0] - b.radius, b.center[0] + b.radius});
    std::sort(iv.begin(), iv.end());
    double len = 0, lo = iv[0].first, hi = iv[0].second;
    for (const auto& [a, b] : iv) {
      if (a > hi) {
        len += hi - lo;
        lo = a;
        hi = b;
      } else {
        hi = std::max(hi, b);
      }
    }
    return len + hi - lo;
  }
  std::vector<double> vol(balls.size());
  for (std::size_t i = 0; i < balls.size(); ++i) vol[i] = unit_ball_volume(d) * std::pow(balls[i].radius, d);
  const double total = std::accumulate(vol.begin(), vol.end(), 0.0);
  std::discrete_distribution<std::size_t> pick(vol.begin(), vol.end());
  std::vector<double> p(d);
  double acc = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto& b = balls[pick(rng)];
    detail::uniform_in_ball(rng, d, b.radius, p);
    for (int c = 0; c < d; ++c) p[c] += b.center[c];
    int mult = 0;
    for (const auto& c : balls) mult += c.contains(p);
    acc += 1.0 / std::max(mult, 1);
  }
  return total * acc / samples;
}

// ---- Palm void factors -----------------------------------------------------

struct PalmVoidOptions {
  double eps_fraction = 0.05;  // conditioning radius as a fraction of the ball radius
  std::size_t replicates = 4000;
};

namespace detail {

// Reduced Palm probability that `balls` hold no point, given points at the
// anchors. Poisson: exp(-|union|). Other models: rejection estimate.
inline double palm_void(const ModelSpec& model, const PointSet& anchors, const std::vector<Ball>& balls,
                        double ball_radius, engine& rng, const PalmVoidOptions& opt) {
  const int d = anchors.dim();
  if (std::holds_alternative<Poisson>(model)) return std::exp(-union_volume(balls, d, rng));
  const double eps = opt.eps_fraction * ball_radius;
  // Centre the picture in a window that contains every ball with room to spare.
  std::vector<double> centre(d, 0.0);
  for (std::size_t i = 0; i < anchors.size(); ++i)
    for (int c = 0; c < d; ++c) centre[c] += anchors[i][c] / anchors.size();
  PointSet a(d);
  double reach = 0;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    std::vector<double> p(anchors[i].begin(), anchors[i].end());
    for (int c = 0; c < d; ++c) p[c] -= centre[c];
    a.push_back(p);
    for (double x : p) reach = std::max(reach, std::abs(x));
  }
  Region region;
  for (const auto& b : balls) {
    std::vector<double> c(b.center);
    for (int j = 0; j < d; ++j) c[j] -= centre[j];
    region.include.push_back({c, b.radius});
    reach = std::max(reach, std::abs(c[0]) + b.radius);
    for (int j = 1; j < d; ++j) reach = std::max(reach, std::abs(c[j]) + b.radius);
  }
  for (std::size_t i = 0; i < a.size(); ++i) region.exclude.push_back({{a[i].begin(), a[i].end()}, eps});
  const double side = 2 * (reach + 1.0);
  Window w(d, std::pow(side, d));
  auto est = estimate_palm_functional(model, w, a, eps, CountFunctional::void_indicator(region),
                                      opt.replicates, rng());
  return est.palm.mean;
}

}  // namespace detail

// ---- constants -------------------------------------------------------------

using ConfigurationIndicator = std::function<bool(const PointSet&)>;

inline ConfigurationIndicator graph_indicator(const GraphPattern& p) {
  return [p](const PointSet& y) { return pattern_indicator(y, 1.0, p) == 1; };
}
inline ConfigurationIndicator complex_indicator(const ComplexPattern& p, ComplexKind kind = ComplexKind::cech) {
  return [p, kind](const PointSet& y) {
    std::vector<std::uint32_t> ids(y.size());
    std::iota(ids.begin(), ids.end(), 0u);
    return isomorphic(induced_complex(kind, y, ids, 1.0), p.complex());
  };
}

// (1/k!) int h(0, y) g^k(0, y) dy with y uniform in B_0(k-1)^(k-1); a
// connected pattern at unit radius never spans more than k-1.
inline LimitConstant mu0(const ConfigurationIndicator& h, int k, const std::string& name,
                         const ModelSpec& model, int d, std::size_t samples, std::uint64_t seed) {
  require(k >= 1 && k <= max_pattern_vertices, errc::cap_exceeded, "pattern size out of range");
  if (std::holds_alternative<Ginibre>(model))
    require(d == 2, errc::dimension_mismatch, "Ginibre limits are planar");
  (void)scaled_intensity(model, PointSet(d, std::vector<double>(d, 0.0)));  // model check
  LimitConstant out{"mu0", name, model_name(model), 0.0, 0, 0, samples, seed, "integral"};
  if (k == 1) {
    out.estimate = h(PointSet(d, std::vector<double>(d, 0.0))) ? 1.0 : 0.0;
    return out;
  }
  auto res = detail::integrate_configurations(k, d, k - 1.0, samples, seed, [&](const PointSet& y, engine&) {
    return h(y) ? scaled_intensity(model, y) : 0.0;
  });
  out.estimate = res.estimate / detail::factorial(k);
  out.se = res.se / detail::factorial(k);
  return out;
}

inline LimitConstant mu0(const GraphPattern& p, const ModelSpec& model, int d, std::size_t samples,
                         std::uint64_t seed) {
  p.validate();
  return mu0(graph_indicator(p), p.k, p.name, model, d, samples, seed);
}
inline LimitConstant mu0(const ComplexPattern& p, const ModelSpec& model, int d, std::size_t samples,
                         std::uint64_t seed) {
  p.validate();
  return mu0(complex_indicator(p), p.k, p.name, model, d, samples, seed);
}

struct SimulationBudget {
  double n = 2000;             // window volume per replicate
  std::size_t replicates = 20;
};

namespace detail {

inline bool has_joint_intensity(const ModelSpec& m) {
  return std::holds_alternative<Poisson>(m) || std::holds_alternative<Ginibre>(m);
}

// Mean of stat(cfg, r) / n over independent windows with r = beta^(1/d).
inline std::pair<double, double> simulate_density(
    const ModelSpec& model, int d, double beta, double margin_factor, const SimulationBudget& budget,
    std::uint64_t seed, const std::function<double(const PointConfiguration&, double)>& stat) {
  const double r = std::pow(beta, 1.0 / d);
  std::vector<double> v(budget.replicates);
  parallel_for(budget.replicates, [&](std::size_t i) {
    auto cfg = sample(model, Window(d, budget.n), margin_factor * r, stream_seed(seed, i));
    v[i] = stat(cfg, r) / budget.n;
  });
  auto s = summarize(v);
  return {s.mean, s.se()};
}

}  // namespace detail

// mu_beta = beta^(k-1)/k! int h(0,y) rho^(k)(beta^(1/d) (0,y)) dy; models
// without a joint intensity fall back to the window density E[G_n]/n.
inline LimitConstant mu_beta(const GraphPattern& p, const ModelSpec& model, int d, double beta,
                             std::size_t samples, std::uint64_t seed,
                             const SimulationBudget& budget = {}) {
  p.validate();
  require(beta > 0, errc::invalid_argument, "beta must be positive");
  LimitConstant out{"mu_beta", p.name, model_name(model), beta, 0, 0, samples, seed, "integral"};
  if (!detail::has_joint_intensity(model)) {
    auto [m, se] = detail::simulate_density(model, d, beta, 0.0, budget, seed,
                                            [&](const PointConfiguration& c, double r) {
                                              return double(count_subgraphs(c, r, p));
                                            });
    out.estimate = m;
    out.se = se;
    out.samples = budget.replicates;
    out.method = "simulation";
    return out;
  }
  if (p.k == 1) {
    out.estimate = 1.0;
    return out;
  }
  const double s = std::pow(beta, 1.0 / d);
  auto h = graph_indicator(p);
  auto res = detail::integrate_configurations(p.k, d, p.k - 1.0, samples, seed, [&](const PointSet& y, engine&) {
    if (!h(y)) return 0.0;
    PointSet x(d, std::vector<double>(y.coords()));
    for (std::size_t i = 0; i < x.size(); ++i)
      for (int c = 0; c < d; ++c) x.mutable_point(i)[c] *= s;
    return joint_intensity(model, x);
  });
  const double f = std::pow(beta, p.k - 1) / detail::factorial(p.k);
  out.estimate = f * res.estimate;
  out.se = f * res.se;
  return out;
}

// gamma_beta: mu_beta's integrand times the reduced Palm probability that the
// radius-beta^(1/d) balls around the scaled points are otherwise empty.
// Models without a joint intensity use the window density E[J~_n]/n.
inline LimitConstant gamma_beta(const GraphPattern& p, const ModelSpec& model, int d, double beta,
                                std::size_t samples, std::uint64_t seed,
                                const SimulationBudget& budget = {}, const PalmVoidOptions& palm = {}) {
  p.validate();
  require(beta > 0, errc::invalid_argument, "beta must be positive");
  LimitConstant out{"gamma_beta", p.name, model_name(model), beta, 0, 0, samples, seed, "integral"};
  if (!detail::has_joint_intensity(model)) {
    auto [m, se] = detail::simulate_density(model, d, beta, p.k + 1.0, budget, seed,
                                            [&](const PointConfiguration& c, double r) {
                                              return double(count_components(c, r, p, CountMode::ambient));
                                            });
    out.estimate = m;
    out.se = se;
    out.samples = budget.replicates;
    out.method = "simulation";
    return out;
  }
  const double s = std::pow(beta, 1.0 / d);
  auto h = graph_indicator(p);
  auto integrand = [&](const PointSet& y, engine& rng) {
    if (!h(y)) return 0.0;
    PointSet x(d, std::vector<double>(y.coords()));
    for (std::size_t i = 0; i < x.size(); ++i)
      for (int c = 0; c < d; ++c) x.mutable_point(i)[c] *= s;
    const double rho = joint_intensity(model, x);
    if (rho == 0) return 0.0;
    std::vector<Ball> balls;
    for (std::size_t i = 0; i < x.size(); ++i) balls.push_back({{x[i].begin(), x[i].end()}, s});
    return rho * detail::palm_void(model, x, balls, s, rng, palm);
  };
  if (p.k == 1) {
    // No outer integral: one configuration, batch the inner estimate.
    std::vector<double> v(mc_batches);
    PointSet origin(d, std::vector<double>(d, 0.0));
    parallel_for(mc_batches, [&](std::size_t b) {
      auto rng = make_engine(stream_seed(seed, b));
      v[b] = integrand(origin, rng);
    });
    auto sm = summarize(v);
    out.estimate = sm.mean;
    out.se = sm.se();
    return out;
  }
  auto res = detail::integrate_configurations(p.k, d, p.k - 1.0, samples, seed, integrand);
  const double f = std::pow(beta, p.k - 1) / detail::factorial(p.k);
  out.estimate = f * res.estimate;
  out.se = f * res.se;
  return out;
}

// Index-k critical configuration at unit radius: k+1 points with a
// nondegenerate circumsphere of radius <= 1 whose centre is inside their
// open convex hull.
inline std::optional<Sphere> critical_configuration(const PointSet& y) {
  auto sph = circumsphere(y);
  if (!sph || sph->radius > 1.0) return std::nullopt;
  if (!in_open_convex_hull(sph->center, y)) return std::nullopt;
  return sph;
}

// nu_k: beta = 0 gives the sparse constant 1/(k+1)! int h1 g^(k+1); beta > 0
// the thermodynamic constant with the empty-circumball Palm factor.
inline LimitConstant nu_k(const ModelSpec& model, int d, double beta, int k, std::size_t samples,
                          std::uint64_t seed, const SimulationBudget& budget = {},
                          const PalmVoidOptions& palm = {}) {
  require(k >= 1 && k <= d, errc::invalid_argument, "index must lie in [1, d]");
  require(beta >= 0, errc::invalid_argument, "beta must be >= 0");
  LimitConstant out{"nu_k", "index_" + std::to_string(k), model_name(model), beta, 0, 0, samples, seed,
                    "integral"};
  if (!detail::has_joint_intensity(model)) {
    require(beta > 0, errc::intensity_unavailable,
            "sparse constant needs a joint intensity for " + model_name(model));
    auto [m, se] = detail::simulate_density(model, d, beta, 2.0, budget, seed,
                                            [&](const PointConfiguration& c, double r) {
                                              return double(critical_points(c, r, k, CountMode::ambient)[k]);
                                            });
    out.estimate = m;
    out.se = se;
    out.samples = budget.replicates;
    out.method = "simulation";
    return out;
  }
  if (std::holds_alternative<Ginibre>(model))
    require(d == 2, errc::dimension_mismatch, "Ginibre limits are planar");
  const double s = beta > 0 ? std::pow(beta, 1.0 / d) : 0.0;
  auto res = detail::integrate_configurations(k + 1, d, 2.0, samples, seed, [&](const PointSet& y, engine& rng) {
    auto sph = critical_configuration(y);
    if (!sph) return 0.0;
    if (beta == 0) return scaled_intensity(model, y);
    PointSet x(d, std::vector<double>(y.coords()));
    for (std::size_t i = 0; i < x.size(); ++i)
      for (int c = 0; c < d; ++c) x.mutable_point(i)[c] *= s;
    const double rho = joint_intensity(model, x);
    if (rho == 0) return 0.0;
    if (std::holds_alternative<Poisson>(model))
      return rho * std::exp(-unit_ball_volume(d) * beta * std::pow(sph->radius, d));
    std::vector<double> c(sph->center);
    for (double& v : c) v *= s;
    std::vector<Ball> balls{{c, s * sph->radius}};
    return rho * detail::palm_void(model, x, balls, s * sph->radius, rng, palm);
  });
  const double f = (beta > 0 ? std::pow(beta, k) : 1.0) / detail::factorial(k + 1);
  out.estimate = f * res.estimate;
  out.se = f * res.se;
  return out;
}

struct ScalingPoint {
  double r = 0;
  double estimate = 0;
  double se = 0;
};

// Weighted least squares of log estimate on log r with delta-method weights
// (estimate / se)^2; uniform weights when no SE is given.
inline LineFit fit_scaling_exponent(const std::vector<ScalingPoint>& series) {
  require(series.size() >= 4, errc::invalid_argument, "scaling fit needs at least 4 points");
  std::vector<double> x, y, w;
  bool all_se = true;
  for (const auto& p : series) {
    require(p.r > 0, errc::invalid_argument, "scaling fit needs positive radii");
    require(p.estimate > 0, errc::invalid_argument, "scaling fit needs positive estimates");
    all_se = all_se && p.se > 0;
  }
  for (const auto& p : series) {
    x.push_back(std::log(p.r));
    y.push_back(std::log(p.estimate));
    w.push_back(all_se ? (p.estimate / p.se) * (p.estimate / p.se) : 1.0);
  }
  return weighted_line_fit(x, y, w);
}

}  // namespace rgc
