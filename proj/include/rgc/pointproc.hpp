#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "rgc/error.hpp"
#include "rgc/lapack.hpp"
#include "rgc/parallel.hpp"
#include "rgc/pointset.hpp"
#include "rgc/random.hpp"
#include "rgc/stats.hpp"

namespace rgc {

inline std::function<void(const std::string&)>& warning_sink() {
  static std::function<void(const std::string&)> sink = [](const std::string& m) {
    std::clog << "warning: " << m << '\n';
  };
  return sink;
}

inline void warn(const std::string& m) {
  if (warning_sink()) warning_sink()(m);
}

// Cube of volume n centred at the origin.
struct Window {
  int d = 2;
  double n = 0;

  Window() = default;
  Window(int dim, double volume) : d(dim), n(volume) {
    require(d >= 1, errc::invalid_argument, "window dimension must be positive");
    require(n >= 0 && std::isfinite(n), errc::invalid_argument, "window volume must be >= 0");
  }

  double side() const {
    if (n <= 0) return 0.0;
    if (d == 1) return n;
    if (d == 2) return std::sqrt(n);
    if (d == 3) return std::cbrt(n);
    return std::pow(n, 1.0 / d);
  }
  double half() const { return side() / 2; }

  bool contains(std::span<const double> p, double margin = 0) const {
    const double h = half() + margin;
    for (double x : p)
      if (x < -h || x > h) return false;
    return true;
  }
};

enum class Replication { constant, binomial, hypergeometric, negative_binomial, geometric };

// Replication counts of a perturbed lattice; every preset has mean 1.
struct ReplicationLaw {
  Replication kind = Replication::constant;
  int trials = 4;       // binomial(trials, 1/trials)
  int population = 4;   // hypergeometric urn size
  int successes = 2;    // marked balls in the urn
  int draws = 2;        // balls drawn
  double shape = 0.5;   // negative binomial as Gamma(shape, 1/shape)-mixed Poisson

  double mean() const {
    switch (kind) {
      case Replication::hypergeometric:
        return static_cast<double>(draws) * successes / population;
      default:
        return 1.0;
    }
  }
  double variance() const {
    switch (kind) {
      case Replication::constant: return 0.0;
      case Replication::binomial: return 1.0 - 1.0 / trials;
      case Replication::hypergeometric: {
        double N = population, K = successes, n = draws;
        return n * (K / N) * (1 - K / N) * (N - n) / (N - 1);
      }
      case Replication::negative_binomial: return 1.0 + 1.0 / shape;
      case Replication::geometric: return 2.0;
    }
    return 0.0;
  }
  void validate() const {
    switch (kind) {
      case Replication::binomial:
        require(trials >= 1, errc::invalid_argument, "binomial trials must be >= 1");
        break;
      case Replication::hypergeometric:
        require(population >= 1 && successes >= 0 && successes <= population && draws >= 0 &&
                    draws <= population,
                errc::invalid_argument, "hypergeometric parameters out of range");
        require(std::abs(mean() - 1.0) < 1e-12, errc::invalid_argument,
                "hypergeometric preset must have mean 1 (draws*successes == population)");
        break;
      case Replication::negative_binomial:
        require(shape > 0, errc::invalid_argument, "negative binomial shape must be positive");
        break;
      default:
        break;
    }
  }
  std::string name() const {
    std::ostringstream s;
    switch (kind) {
      case Replication::constant: s << "constant"; break;
      case Replication::binomial: s << "binomial(" << trials << ")"; break;
      case Replication::hypergeometric:
        s << "hypergeometric(" << population << "," << successes << "," << draws << ")";
        break;
      case Replication::negative_binomial: s << "negative_binomial(" << shape << ")"; break;
      case Replication::geometric: s << "geometric"; break;
    }
    return s.str();
  }
};

struct Poisson {};
struct PerturbedLattice {
  ReplicationLaw law;
  bool shift_origin = true;  // uniform origin shift per sample
};
struct Ginibre {};
struct GefZeros {};
struct CoxCluster {
  double cluster_radius = 0.5;
  int per_cluster = 4;
};
// Points supplied by the caller (files, fixtures); no sampler.
struct Explicit {};

using ModelSpec = std::variant<Poisson, PerturbedLattice, Ginibre, GefZeros, CoxCluster, Explicit>;

// Cox model whose clusters have diameter beta^{1/d}.
inline CoxCluster cox_matched(double beta, int d) {
  return CoxCluster{std::pow(beta, 1.0 / d) / 2, 4};
}

inline std::string model_name(const ModelSpec& m) {
  struct V {
    std::string operator()(const Poisson&) const { return "poisson"; }
    std::string operator()(const PerturbedLattice& p) const {
      return "lattice-" + p.law.name() + (p.shift_origin ? "" : "-unshifted");
    }
    std::string operator()(const Ginibre&) const { return "ginibre"; }
    std::string operator()(const GefZeros&) const { return "gef"; }
    std::string operator()(const CoxCluster& c) const {
      std::ostringstream s;
      s << "cox(" << c.cluster_radius << "," << c.per_cluster << ")";
      return s.str();
    }
    std::string operator()(const Explicit&) const { return "explicit"; }
  };
  return std::visit(V{}, m);
}

inline bool planar_only(const ModelSpec& m) {
  return std::holds_alternative<Ginibre>(m) || std::holds_alternative<GefZeros>(m);
}

class PointConfiguration {
 public:
  PointConfiguration() = default;

  static PointConfiguration create(PointSet pts, Window w, double margin, ModelSpec model,
                                   std::uint64_t seed) {
    require(pts.empty() || pts.dim() == w.d, errc::dimension_mismatch,
            "points and window differ in dimension");
    require(margin >= 0, errc::invalid_argument, "margin must be >= 0");
    if (pts.empty()) pts = PointSet(w.d);
    PointConfiguration c;
    c.window_ = w;
    c.margin_ = margin;
    c.model_ = model;
    c.seed_ = seed;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      require(w.contains(pts[i], margin), errc::geometry, "point outside the inflated window");
      if (w.contains(pts[i])) c.window_ids_.push_back(static_cast<std::uint32_t>(i));
    }
    require(!has_duplicates(pts), errc::invalid_argument, "configuration has duplicate points");
    c.points_ = std::move(pts);
    return c;
  }

  // Explicit points in the smallest centred cube holding them.
  static PointConfiguration enclosing(PointSet pts, double margin = 0) {
    double h = 0;
    for (double x : pts.coords()) h = std::max(h, std::abs(x));
    h = h * (1 + 1e-12) + 1e-12;
    Window w(pts.dim(), std::pow(2 * h, pts.dim()));
    while (true) {
      bool ok = true;
      for (std::size_t i = 0; i < pts.size() && ok; ++i) ok = w.contains(pts[i]);
      if (ok) break;
      w.n *= 1 + 1e-9;
    }
    return create(std::move(pts), w, margin, Explicit{}, 0);
  }

  const PointSet& points() const noexcept { return points_; }
  const Window& window() const noexcept { return window_; }
  double ambient_margin() const noexcept { return margin_; }
  const ModelSpec& model() const noexcept { return model_; }
  std::uint64_t seed() const noexcept { return seed_; }
  int dim() const noexcept { return window_.d; }

  // Indices of points inside the window (the set Phi_n).
  const std::vector<std::uint32_t>& window_ids() const noexcept { return window_ids_; }
  std::size_t window_count() const noexcept { return window_ids_.size(); }
  std::vector<std::uint32_t> all_ids() const {
    std::vector<std::uint32_t> ids(points_.size());
    std::iota(ids.begin(), ids.end(), 0u);
    return ids;
  }
  bool in_window(std::size_t i) const { return window_.contains(points_[i]); }

  static bool has_duplicates(const PointSet& pts) {
    auto order = lex_order(pts);
    for (std::size_t j = 1; j < order.size(); ++j)
      if (std::equal(pts[order[j]].begin(), pts[order[j]].end(), pts[order[j - 1]].begin()))
        return true;
    return false;
  }

  static std::vector<std::uint32_t> lex_order(const PointSet& pts) {
    std::vector<std::uint32_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
      auto pa = pts[a], pb = pts[b];
      if (std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end())) return true;
      if (std::lexicographical_compare(pb.begin(), pb.end(), pa.begin(), pa.end())) return false;
      return a < b;
    });
    return order;
  }

 private:
  PointSet points_;
  Window window_;
  double margin_ = 0;
  ModelSpec model_ = Poisson{};
  std::uint64_t seed_ = 0;
  std::vector<std::uint32_t> window_ids_;
};

namespace detail {

// Moves exact duplicates apart by 1e-12 in the first coordinate.
inline void separate_duplicates(PointSet& pts) {
  for (int pass = 0; pass < 8; ++pass) {
    auto order = PointConfiguration::lex_order(pts);
    bool moved = false;
    for (std::size_t j = 1; j < order.size(); ++j) {
      auto a = pts[order[j - 1]];
      auto b = pts.mutable_point(order[j]);
      if (std::equal(a.begin(), a.end(), b.begin())) {
        b[0] += 1e-12;
        moved = true;
        warn("duplicate point perturbed by 1e-12");
      }
    }
    if (!moved) return;
  }
}

inline void uniform_in_cube(engine& rng, double h, std::span<double> out) {
  std::uniform_real_distribution<double> u(-h, h);
  for (double& x : out) x = u(rng);
}

inline PointSet sample_poisson(int d, double h, engine& rng) {
  PointSet pts(d);
  if (h <= 0) return pts;
  std::poisson_distribution<long> count(std::pow(2 * h, d));
  long n = count(rng);
  pts.reserve(n);
  std::vector<double> p(d);
  for (long i = 0; i < n; ++i) {
    uniform_in_cube(rng, h, p);
    pts.push_back(p);
  }
  return pts;
}

inline int replicate_count(const ReplicationLaw& law, engine& rng) {
  switch (law.kind) {
    case Replication::constant:
      return 1;
    case Replication::binomial:
      return std::binomial_distribution<int>(law.trials, 1.0 / law.trials)(rng);
    case Replication::hypergeometric: {
      int good = law.successes, total = law.population, hits = 0;
      for (int i = 0; i < law.draws; ++i) {
        std::uniform_int_distribution<int> pick(0, total - 1);
        if (pick(rng) < good) {
          ++hits;
          --good;
        }
        --total;
      }
      return hits;
    }
    case Replication::negative_binomial: {
      double lambda = std::gamma_distribution<double>(law.shape, 1.0 / law.shape)(rng);
      return static_cast<int>(std::poisson_distribution<long>(lambda)(rng));
    }
    case Replication::geometric:
      return std::geometric_distribution<int>(0.5)(rng);
  }
  return 1;
}

inline PointSet sample_lattice(const PerturbedLattice& m, int d, double h, engine& rng) {
  m.law.validate();
  PointSet pts(d);
  if (h <= 0) return pts;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> shift(d, 0.0);
  if (m.shift_origin)
    for (double& s : shift) s = u(rng);
  std::vector<long> lo(d), hi(d), z(d);
  for (int c = 0; c < d; ++c) {
    lo[c] = static_cast<long>(std::floor(-h - shift[c]));
    hi[c] = static_cast<long>(std::floor(h - shift[c]));
  }
  z = lo;
  std::vector<double> p(d);
  for (;;) {
    int copies = replicate_count(m.law, rng);
    for (int j = 0; j < copies; ++j) {
      bool inside = true;
      for (int c = 0; c < d; ++c) {
        p[c] = z[c] + shift[c] + u(rng);
        inside = inside && p[c] >= -h && p[c] <= h;
      }
      if (inside) pts.push_back(p);
    }
    int c = 0;
    while (c < d && ++z[c] > hi[c]) {
      z[c] = lo[c];
      ++c;
    }
    if (c == d) break;
  }
  return pts;
}

inline PointSet sample_cox(const CoxCluster& m, int d, double h, engine& rng) {
  require(m.cluster_radius > 0 && m.per_cluster >= 1, errc::invalid_argument,
          "cluster radius and size must be positive");
  PointSet pts(d);
  if (h <= 0) return pts;
  const double H = h + m.cluster_radius;
  std::poisson_distribution<long> count(std::pow(2 * H, d) / m.per_cluster);
  long parents = count(rng);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c(d), p(d);
  for (long i = 0; i < parents; ++i) {
    uniform_in_cube(rng, H, c);
    for (int j = 0; j < m.per_cluster; ++j) {
      double s = 0;
      for (int k = 0; k < d; ++k) {
        p[k] = g(rng);
        s += p[k] * p[k];
      }
      double radius = m.cluster_radius * std::pow(u(rng), 1.0 / d) / std::sqrt(s);
      bool inside = true;
      for (int k = 0; k < d; ++k) {
        p[k] = c[k] + p[k] * radius;
        inside = inside && p[k] >= -h && p[k] <= h;
      }
      if (inside) pts.push_back(p);
    }
  }
  return pts;
}

// Radius (unit-intensity coordinates) of the disk that must be filled so the
// cube [-h,h]^2 sits inside the bulk: the corner distance plus three standard
// Ginibre units. The finite-matrix density deficit at that depth inside the
// spectral edge is about erfc(3 sqrt 2)/2 < 1e-8.
inline double planar_cover_radius(double h) {
  return h * std::sqrt(2.0) + 3.0 / std::sqrt(M_PI);
}

inline constexpr int ginibre_max_size = 10000;

inline int ginibre_matrix_size(double h) {
  require(h > 0, errc::sizing, "Ginibre window is empty after margin: matrix size would be 0");
  const double R = planar_cover_radius(h);
  const double m = std::ceil(M_PI * R * R);
  require(m <= ginibre_max_size, errc::sizing,
          "Ginibre window needs a matrix larger than " + std::to_string(ginibre_max_size));
  return static_cast<int>(m);
}

// Eigenvalues of an m x m complex Gaussian matrix, via the unitarily
// equivalent random Hessenberg form (independent entries on and above the
// diagonal, chi-distributed subdiagonal).
inline std::vector<std::complex<double>> ginibre_eigenvalues(int m, engine& rng) {
  std::vector<std::complex<double>> H(static_cast<std::size_t>(m) * m, 0.0);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i <= j; ++i) {
      double re = g(rng);
      double im = g(rng);
      H[static_cast<std::size_t>(j) * m + i] = {re, im};
    }
    if (j + 1 < m) {
      double dof = m - 1 - j;  // |column tail|^2 ~ Gamma(dof, 1)
      double s = std::gamma_distribution<double>(dof, 1.0)(rng);
      H[static_cast<std::size_t>(j) * m + j + 1] = std::sqrt(s);
    }
  }
  return lapack::hessenberg_eigenvalues(H, m);
}

inline PointSet sample_ginibre(double h, engine& rng) {
  const int m = ginibre_matrix_size(h);
  auto ev = ginibre_eigenvalues(m, rng);
  PointSet pts(2);
  const double s = 1.0 / std::sqrt(M_PI);
  double p[2];
  for (const auto& z : ev) {
    p[0] = z.real() * s;
    p[1] = z.imag() * s;
    if (std::abs(p[0]) <= h && std::abs(p[1]) <= h) pts.push_back(p);
  }
  return pts;
}

// Smallest degree M with P(Poisson(rho^2) > M) <= tail.
inline int gef_degree(double rho, double tail) {
  const double lam = rho * rho;
  const int top = static_cast<int>(lam + 40 * rho + 60);
  auto logpmf = [&](int k) { return -lam + k * std::log(lam) - std::lgamma(k + 1.0); };
  double acc = 0;
  for (int M = top; M >= 1; --M) {
    acc += std::exp(logpmf(M));
    if (acc > tail) return std::max(M, 8);
  }
  return 8;
}

inline constexpr double gef_max_radius = 120.0;

// f(z) = sum xi_k z^k / sqrt(k!) truncated at degree M, evaluated with the
// weight exp(-|z|^2/2) so that values stay O(1). Terms are generated outward
// from the dominant index k ~ |z|^2.
class GefSeries {
 public:
  GefSeries(int degree, engine& rng) : xi_(degree + 1) {
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    for (auto& c : xi_) {
      double re = g(rng);
      double im = g(rng);
      c = {re, im};
    }
  }

  // Weighted value and weighted derivative.
  void eval(std::complex<double> z, std::complex<double>& f, std::complex<double>& df) const {
    const int M = static_cast<int>(xi_.size()) - 1;
    const double a2 = std::norm(z);
    f = df = 0;
    if (a2 == 0) {
      f = xi_[0];
      if (M >= 1) df = xi_[1];
      return;
    }
    const double la = 0.5 * std::log(a2), th = std::arg(z);
    const int k0 = std::min(M, static_cast<int>(a2));
    const double lm = k0 * la - 0.5 * std::lgamma(k0 + 1.0) - 0.5 * a2;
    const std::complex<double> t0 = std::polar(std::exp(lm), k0 * th);
    // term t_k = z^k / sqrt(k!) * w; derivative term k t_k / z
    auto add = [&](int k, std::complex<double> t) {
      f += xi_[k] * t;
      df += xi_[k] * (static_cast<double>(k) * t);
    };
    std::complex<double> t = t0;
    for (int k = k0; k <= M; ++k) {
      if (k > k0) t *= z / std::sqrt(static_cast<double>(k));
      add(k, t);
      if (k > k0 + 4 && std::abs(t) < 1e-22) break;
    }
    t = t0;
    for (int k = k0 - 1; k >= 0; --k) {
      t *= std::sqrt(static_cast<double>(k + 1)) / z;
      add(k, t);
      if (std::abs(t) < 1e-22) break;
    }
    df /= z;
  }

 private:
  std::vector<std::complex<double>> xi_;
};

// Zeros of the series inside the square [-a, a]^2 (standard units), located
// cell by cell with the argument principle and refined by Newton.
class GefRootFinder {
 public:
  GefRootFinder(const GefSeries& f, double a) : f_(f), a_(a) {}

  std::vector<std::complex<double>> roots() {
    const int cells = std::max(1, static_cast<int>(std::ceil(2 * a_ / 0.5)));
    const double h = 2 * a_ / cells;
    std::vector<std::complex<double>> out;
    for (int i = 0; i < cells; ++i)
      for (int j = 0; j < cells; ++j) cell({-a_ + i * h, -a_ + j * h}, h, 0, out);
    return out;
  }

 private:
  std::complex<double> value(std::complex<double> z) const {
    std::complex<double> v, d;
    f_.eval(z, v, d);
    return v;
  }

  // Phase change along a segment of f(z) exp(-z conj(c)), which has the same
  // zeros as f but a slowly turning phase near the cell centre c (f alone
  // turns at a rate ~|z|). Refined until each step is below pi/4.
  double phase(std::complex<double> a, std::complex<double> fa, std::complex<double> b,
               std::complex<double> fb, std::complex<double> c, int depth) const {
    const double step = std::remainder(std::arg(fb / fa) - ((b - a) * std::conj(c)).imag(), 2 * M_PI);
    if (std::abs(step) < M_PI / 4 || depth > 14) return step;
    const auto m = 0.5 * (a + b);
    const auto fm = value(m);
    return phase(a, fa, m, fm, c, depth + 1) + phase(m, fm, b, fb, c, depth + 1);
  }

  int winding(std::complex<double> lo, double h) const {
    const std::complex<double> c[4] = {lo, lo + h, lo + std::complex<double>(h, h),
                                       lo + std::complex<double>(0, h)};
    const auto centre = lo + std::complex<double>(h / 2, h / 2);
    std::complex<double> v[4];
    for (int i = 0; i < 4; ++i) v[i] = value(c[i]);
    double total = 0;
    for (int i = 0; i < 4; ++i) total += phase(c[i], v[i], c[(i + 1) % 4], v[(i + 1) % 4], centre, 0);
    return static_cast<int>(std::lround(total / (2 * M_PI)));
  }

  bool inside(std::complex<double> z, std::complex<double> lo, double h) const {
    return z.real() >= lo.real() && z.real() < lo.real() + h && z.imag() >= lo.imag() &&
           z.imag() < lo.imag() + h;
  }

  void cell(std::complex<double> lo, double h, int depth, std::vector<std::complex<double>>& out) {
    const int w = winding(lo, h);
    if (w <= 0) return;
    if (w == 1 || depth >= 8) {
      auto z = lo + std::complex<double>(h / 2, h / 2);
      for (int it = 0; it < 50; ++it) {
        std::complex<double> v, d;
        f_.eval(z, v, d);
        if (d == 0.0) break;
        const auto step = v / d;
        z -= step;
        if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(z))) break;
      }
      if (inside(z, lo, h)) {
        out.push_back(z);
        return;
      }
      if (depth >= 8) {
        out.push_back(lo + std::complex<double>(h / 2, h / 2));
        return;
      }
    }
    const double q = h / 2;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) cell(lo + std::complex<double>(i * q, j * q), q, depth + 1, out);
  }

  const GefSeries& f_;
  double a_;
};

inline PointSet sample_gef(double h, engine& rng) {
  require(h > 0, errc::sizing, "GEF window is empty after margin");
  const double s = std::sqrt(M_PI);  // unit-intensity -> standard units
  const double rho = h * std::sqrt(2.0) * s;
  require(rho <= gef_max_radius, errc::sizing, "GEF window too large for the series truncation");
  GefSeries f(gef_degree(rho, 1e-16), rng);
  auto roots = GefRootFinder(f, h * s).roots();
  PointSet pts(2);
  double q[2];
  for (auto z : roots) {
    q[0] = z.real() / s;
    q[1] = z.imag() / s;
    if (std::abs(q[0]) <= h && std::abs(q[1]) <= h) pts.push_back(q);
  }
  return pts;
}

}  // namespace detail

// Draws the model restricted to the window inflated by margin.
inline PointConfiguration sample(const ModelSpec& model, const Window& window, double margin,
                                 std::uint64_t seed) {
  require(margin >= 0, errc::invalid_argument, "margin must be >= 0");
  require(!planar_only(model) || window.d == 2, errc::dimension_mismatch,
          model_name(model) + " requires d = 2");
  engine rng = make_engine(seed);
  const double h = window.half() + margin;
  const int d = window.d;
  PointSet pts(d);
  struct V {
    int d;
    double h;
    engine& rng;
    PointSet operator()(const Poisson&) const { return detail::sample_poisson(d, h, rng); }
    PointSet operator()(const PerturbedLattice& m) const {
      return detail::sample_lattice(m, d, h, rng);
    }
    PointSet operator()(const Ginibre&) const { return detail::sample_ginibre(h, rng); }
    PointSet operator()(const GefZeros&) const { return detail::sample_gef(h, rng); }
    PointSet operator()(const CoxCluster& m) const { return detail::sample_cox(m, d, h, rng); }
    PointSet operator()(const Explicit&) const {
      fail(errc::invalid_argument, "explicit configurations cannot be sampled");
    }
  };
  pts = std::visit(V{d, h, rng}, model);
  detail::separate_duplicates(pts);
  return PointConfiguration::create(std::move(pts), window, margin, model, seed);
}

namespace detail {

// Unit-intensity Ginibre kernel exp(pi (z conj(w) - |z|^2/2 - |w|^2/2)).
inline std::complex<double> ginibre_kernel(std::span<const double> z, std::span<const double> w) {
  std::complex<double> a(z[0], z[1]), b(w[0], w[1]);
  return std::exp(M_PI * (a * std::conj(b) - 0.5 * std::norm(a) - 0.5 * std::norm(b)));
}

}  // namespace detail

inline double joint_intensity(const ModelSpec& model, const PointSet& pts) {
  require(!pts.empty(), errc::invalid_argument, "joint intensity needs at least one point");
  if (std::holds_alternative<Poisson>(model)) return 1.0;
  require(std::holds_alternative<Ginibre>(model), errc::intensity_unavailable,
          "intensity unavailable for " + model_name(model));
  require(pts.dim() == 2, errc::dimension_mismatch, "Ginibre intensity needs planar points");
  const auto k = static_cast<Eigen::Index>(pts.size());
  if (PointConfiguration::has_duplicates(pts)) return 0.0;
  if (k == 1) return 1.0;
  if (k == 2) return -std::expm1(-M_PI * dist2(pts[0], pts[1]));
  Eigen::MatrixXcd K(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) K(i, j) = detail::ginibre_kernel(pts[i], pts[j]);
  return std::max(0.0, K.partialPivLu().determinant().real());
}

struct Ball {
  std::vector<double> center;
  double radius = 0;

  bool contains(std::span<const double> p) const { return dist2(p, center) <= radius * radius; }
};

inline bool ball_in_window(const Ball& b, const Window& w, double margin = 0) {
  const double h = w.half() + margin;
  for (double c : b.center)
    if (c - b.radius < -h || c + b.radius > h) return false;
  return true;
}

inline EstimateRecord estimate_void(const ModelSpec& model, const Window& window,
                                    const Ball& region, std::size_t replicates,
                                    std::uint64_t seed) {
  require(replicates >= 1, errc::invalid_argument, "replicates must be >= 1");
  require(region.center.size() == static_cast<std::size_t>(window.d), errc::dimension_mismatch,
          "region and window differ in dimension");
  require(region.radius >= 0, errc::invalid_argument, "region radius must be >= 0");
  require(ball_in_window(region, window), errc::geometry, "region escapes the sampled domain");
  EstimateRecord rec;
  rec.statistic = "void";
  rec.model = model_name(model);
  rec.n = window.n;
  rec.r = region.radius;
  rec.replicates = replicates;
  rec.seed = seed;
  std::vector<char> empty(replicates, 1);
  if (region.radius > 0) {
    parallel_for(replicates, [&](std::size_t i) {
      auto cfg = sample(model, window, 0.0, stream_seed(seed, i));
      const auto& pts = cfg.points();
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (region.contains(pts[j])) {
          empty[i] = 0;
          break;
        }
    });
  }
  std::size_t hits = std::count(empty.begin(), empty.end(), 1);
  double p = static_cast<double>(hits) / replicates;
  rec.mean = p;
  rec.variance = replicates > 1 ? p * (1 - p) * replicates / (replicates - 1.0) : 0.0;
  auto [lo, hi] = wilson_interval(hits, replicates);
  rec.ci_low = lo;
  rec.ci_high = hi;
  rec.ci_half_width = (hi - lo) / 2;
  return rec;
}

// Union of include balls minus union of exclude balls.
struct Region {
  std::vector<Ball> include;
  std::vector<Ball> exclude;

  bool contains(std::span<const double> p) const {
    bool in = false;
    for (const auto& b : include)
      if (b.contains(p)) {
        in = true;
        break;
      }
    if (!in) return false;
    for (const auto& b : exclude)
      if (b.contains(p)) return false;
    return true;
  }
};

inline Region annulus(std::vector<double> centre, double inner, double outer) {
  Region r;
  r.include.push_back({centre, outer});
  if (inner > 0) r.exclude.push_back({std::move(centre), inner});
  return r;
}

// A statistic of the point counts in a list of regions.
struct CountFunctional {
  std::string name;
  std::vector<Region> regions;
  std::function<double(std::span<const std::size_t>)> value;

  static CountFunctional count(Region r) {
    return {"count", {std::move(r)}, [](std::span<const std::size_t> c) { return double(c[0]); }};
  }
  static CountFunctional void_indicator(Region r) {
    return {"void", {std::move(r)}, [](std::span<const std::size_t> c) { return c[0] == 0 ? 1.0 : 0.0; }};
  }
};

struct PalmEstimate {
  EstimateRecord palm;
  EstimateRecord unconditional;
  std::size_t accepted = 0;
  double acceptance_rate = 0;
};

namespace detail {

// A ball disjoint from the region: fully inside an excluded ball, or away
// from every included ball.
inline bool ball_disjoint(const Ball& b, const Region& r) {
  for (const auto& e : r.exclude)
    if (dist(b.center, e.center) + b.radius <= e.radius) return true;
  for (const auto& i : r.include)
    if (dist(b.center, i.center) < b.radius + i.radius) return false;
  return true;
}

}  // namespace detail

// Rejection estimate of a reduced Palm expectation: replicates count only when
// every eps-ball around an anchor holds a point; those points are not part of
// any region by construction.
inline PalmEstimate estimate_palm_functional(const ModelSpec& model, const Window& window,
                                             const PointSet& anchors, double eps,
                                             const CountFunctional& functional,
                                             std::size_t replicates, std::uint64_t seed) {
  require(eps > 0, errc::invalid_argument, "eps must be positive");
  require(replicates >= 1, errc::invalid_argument, "replicates must be >= 1");
  require(!PointConfiguration::has_duplicates(anchors), errc::invalid_argument,
          "anchors must be distinct");
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    Ball b{{anchors[a].begin(), anchors[a].end()}, eps};
    require(ball_in_window(b, window), errc::geometry, "anchor ball escapes the sampled domain");
    for (const auto& r : functional.regions)
      require(detail::ball_disjoint(b, r), errc::geometry,
              "functional region meets an anchor eps-ball");
  }
  for (const auto& r : functional.regions)
    for (const auto& b : r.include)
      require(ball_in_window(b, window), errc::geometry, "region escapes the sampled domain");

  std::vector<double> values(replicates);
  std::vector<char> accepted(replicates, 0);
  parallel_for(replicates, [&](std::size_t i) {
    auto cfg = sample(model, window, 0.0, stream_seed(seed, i));
    const auto& pts = cfg.points();
    std::vector<std::size_t> counts(functional.regions.size(), 0);
    std::vector<char> hit(anchors.size(), 0);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      for (std::size_t a = 0; a < anchors.size(); ++a)
        if (dist2(pts[j], anchors[a]) <= eps * eps) hit[a] = 1;
      for (std::size_t r = 0; r < counts.size(); ++r)
        if (functional.regions[r].contains(pts[j])) ++counts[r];
    }
    values[i] = functional.value(counts);
    accepted[i] = std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
  });
  std::vector<double> conditioned;
  for (std::size_t i = 0; i < replicates; ++i)
    if (accepted[i]) conditioned.push_back(values[i]);
  PalmEstimate out;
  out.accepted = conditioned.size();
  out.acceptance_rate = static_cast<double>(out.accepted) / replicates;
  if (conditioned.empty()) {
    std::ostringstream s;
    s << "insufficient conditioning mass: acceptance rate " << out.acceptance_rate << " over "
      << replicates << " replicates";
    fail(errc::insufficient_conditioning, s.str());
  }
  auto fill = [&](EstimateRecord& rec, const std::vector<double>& xs, const std::string& id) {
    auto s = summarize(xs);
    rec.statistic = id;
    rec.model = model_name(model);
    rec.n = window.n;
    rec.r = eps;
    rec.replicates = xs.size();
    rec.mean = s.mean;
    rec.variance = s.variance;
    rec.ci_half_width = s.ci_half_width();
    rec.seed = seed;
  };
  fill(out.palm, conditioned, "palm:" + functional.name);
  out.palm.accepted = out.accepted;
  fill(out.unconditional, values, functional.name);
  return out;
}

}  // namespace rgc
