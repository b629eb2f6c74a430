#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "rgc/complexes.hpp"
#include "rgc/geograph.hpp"
#include "rgc/homology.hpp"
#include "rgc/morse.hpp"
#include "rgc/parallel.hpp"
#include "rgc/patterns.hpp"
#include "rgc/pointproc.hpp"
#include "rgc/random.hpp"
#include "rgc/stats.hpp"

namespace rgc {

enum class Regime { sparse, thermodynamic, connectivity };

inline std::string regime_name(Regime r) {
  switch (r) {
    case Regime::sparse: return "sparse";
    case Regime::thermodynamic: return "thermodynamic";
    case Regime::connectivity: return "connectivity";
  }
  return "?";
}

inline Regime parse_regime(const std::string& s) {
  if (s == "sparse") return Regime::sparse;
  if (s == "thermodynamic") return Regime::thermodynamic;
  if (s == "connectivity") return Regime::connectivity;
  fail(errc::config, "unknown regime '" + s + "'");
}

// r_n as an explicit list (one per n), c n^-a, beta^(1/d), or c (log n)^p.
struct RadiusRule {
  enum class Kind { list, power, thermodynamic, logarithmic } kind = Kind::list;
  std::vector<double> values;  // list
  double c = 1;                // power, logarithmic
  double a = 0;                // power exponent
  double beta = 1;             // thermodynamic
  double p = 0.5;              // logarithmic exponent

  static RadiusRule list(std::vector<double> v) { return {Kind::list, std::move(v)}; }
  static RadiusRule power(double c, double a) {
    RadiusRule r;
    r.kind = Kind::power;
    r.c = c;
    r.a = a;
    return r;
  }
  static RadiusRule thermodynamic(double beta) {
    RadiusRule r;
    r.kind = Kind::thermodynamic;
    r.beta = beta;
    return r;
  }
  static RadiusRule logarithmic(double c, double p = 0.5) {
    RadiusRule r;
    r.kind = Kind::logarithmic;
    r.c = c;
    r.p = p;
    return r;
  }

  double radius(double n, int d, std::size_t index) const {
    switch (kind) {
      case Kind::list:
        require(index < values.size(), errc::config, "radius list shorter than the n grid");
        return values[index];
      case Kind::power: return c * std::pow(n, -a);
      case Kind::thermodynamic: return std::pow(beta, 1.0 / d);
      case Kind::logarithmic: return c * std::pow(std::log(n), p);
    }
    return 0;
  }

  // Whether the rule is compatible with the regime tag.
  bool fits(Regime g) const {
    switch (g) {
      case Regime::sparse: return kind == Kind::list || (kind == Kind::power && a > 0);
      case Regime::thermodynamic: return kind == Kind::list || kind == Kind::thermodynamic;
      case Regime::connectivity: return kind == Kind::list || kind == Kind::logarithmic;
    }
    return false;
  }
};

// Parsed statistic identifier. Accepted forms:
//   G:<graph>  J:<graph>  Jt:<graph>  G>0:<graph>
//   C:<complex>  Cs:<complex>  Cst:<complex>
//   betti_cech:<k>  betti_rips:<k>  N:<k>  chi  chi_cech  cover
struct Statistic {
  std::string id;
  std::string kind;
  std::string arg;
  GraphPattern graph;
  ComplexPattern complex;
  int index = 0;

  static Statistic parse(const std::string& id, const PatternCatalog& cat) {
    Statistic s;
    s.id = id;
    auto colon = id.find(':');
    s.kind = id.substr(0, colon);
    s.arg = colon == std::string::npos ? "" : id.substr(colon + 1);
    auto need_arg = [&] { require(!s.arg.empty(), errc::config, "statistic '" + id + "' needs an argument"); };
    auto as_index = [&] {
      need_arg();
      require(std::all_of(s.arg.begin(), s.arg.end(), ::isdigit), errc::config,
              "statistic '" + id + "' needs an integer index");
      s.index = std::stoi(s.arg);
    };
    if (s.kind == "G" || s.kind == "J" || s.kind == "Jt" || s.kind == "G>0") {
      need_arg();
      s.graph = cat.graph(s.arg);
    } else if (s.kind == "C" || s.kind == "Cs" || s.kind == "Cst") {
      need_arg();
      s.complex = cat.complex(s.arg);
    } else if (s.kind == "betti_cech" || s.kind == "betti_rips" || s.kind == "N") {
      as_index();
    } else if (s.kind == "chi" || s.kind == "chi_cech" || s.kind == "cover") {
      require(s.arg.empty(), errc::config, "statistic '" + id + "' takes no argument");
    } else {
      fail(errc::config, "unknown statistic '" + id + "'");
    }
    return s;
  }

  // Ambient margin this statistic needs at radius r.
  double margin(double r) const {
    if (kind == "Jt") return (graph.k + 1) * r;
    if (kind == "Cst") return (complex.k + 1) * r;
    return 0.0;
  }
};

namespace detail {

// All cubes of side r/(4 sqrt d), on the lattice through the origin, that lie
// inside the window hold a point.
inline bool cubes_covered(const PointConfiguration& cfg, double r) {
  const int d = cfg.dim();
  const double half = cfg.window().half();
  if (r <= 0) return cfg.window().n == 0;
  const double s = r / (4 * std::sqrt(static_cast<double>(d)));
  const long lo = static_cast<long>(std::ceil(-half / s - 1e-12));
  const long hi = static_cast<long>(std::floor(half / s + 1e-12)) - 1;  // last cube start index
  if (hi < lo) return true;  // no cube fits inside the window
  const double per_axis = static_cast<double>(hi - lo + 1);
  const double total = std::pow(per_axis, d);
  if (total > static_cast<double>(cfg.window_count())) return false;
  std::unordered_set<long long> hit;
  for (auto id : cfg.window_ids()) {
    auto p = cfg.points()[id];
    long long key = 0;
    bool inside = true;
    for (int c = d - 1; c >= 0; --c) {
      long q = static_cast<long>(std::floor(p[c] / s));
      if (q < lo || q > hi) {
        inside = false;
        break;
      }
      key = key * static_cast<long long>(per_axis) + (q - lo);
    }
    if (inside) hit.insert(key);
  }
  return static_cast<double>(hit.size()) == total;
}

// Number of connected components of the window graph at r. Connectivity is
// first tried at 2x the covering bound when that is smaller, which suffices
// because the graph only gains edges as r grows.
inline long long components_at(const PointConfiguration& cfg, double r) {
  const double cover = covering_radius_bound(cfg.points(), cfg.window_ids(), cfg.window());
  if (2 * cover < r) {
    auto g = build_graph(cfg, 2 * cover, false);
    auto n = static_cast<long long>(connected_components(g).size());
    if (n == 1) return 1;
  }
  return static_cast<long long>(connected_components(build_graph(cfg, r, false)).size());
}

}  // namespace detail

// Thrown for replicates that must be excluded rather than failing a run.
inline bool excludable(const error& e) {
  return e.code() == errc::degenerate || e.code() == errc::insufficient_conditioning;
}

// Value of a statistic on one configuration at radius r. Cech quantities use
// parameter eps = r; N_k and chi use critical value r; chi_cech is the Euler
// characteristic of the Cech complex at eps = r.
inline double evaluate(const Statistic& s, const PointConfiguration& cfg, double r) {
  const int d = cfg.dim();
  if (s.kind == "G") return static_cast<double>(count_subgraphs(cfg, r, s.graph));
  if (s.kind == "G>0") return count_subgraphs(cfg, r, s.graph) > 0 ? 1.0 : 0.0;
  if (s.kind == "J") return static_cast<double>(count_components(cfg, r, s.graph, CountMode::interior));
  if (s.kind == "Jt") return static_cast<double>(count_components(cfg, r, s.graph, CountMode::ambient));
  if (s.kind == "C")
    return static_cast<double>(count_subcomplexes(cfg, r, s.complex, false, CountMode::interior));
  if (s.kind == "Cs")
    return static_cast<double>(count_subcomplexes(cfg, r, s.complex, true, CountMode::interior));
  if (s.kind == "Cst")
    return static_cast<double>(count_subcomplexes(cfg, r, s.complex, true, CountMode::ambient));
  if (s.kind == "betti_cech" || s.kind == "betti_rips") {
    if (s.index == 0) return static_cast<double>(detail::components_at(cfg, r));
    if (s.kind == "betti_cech" && s.index >= d) return 0.0;
    auto cx = s.kind == "betti_cech" ? build_cech(cfg, r, s.index + 1) : build_rips(cfg, r, s.index + 1);
    return static_cast<double>(betti_numbers(cx)[s.index]);
  }
  if (s.kind == "N" || s.kind == "chi" || s.kind == "chi_cech") {
    const double value = s.kind == "chi_cech" ? r / 2 : r;
    const int top = s.kind == "N" ? s.index : d;
    require(top <= d, errc::config, "critical index exceeds the dimension");
    auto cp = critical_points(cfg, value, top);
    if (cp.degenerate > 0) fail(errc::degenerate, "degenerate subsets in critical point search");
    return s.kind == "N" ? static_cast<double>(cp[top]) : static_cast<double>(morse_euler(cp));
  }
  if (s.kind == "cover") return detail::cubes_covered(cfg, r) ? 1.0 : 0.0;
  fail(errc::config, "unknown statistic '" + s.id + "'");
}

struct ExperimentPlan {
  ModelSpec model = Poisson{};
  int d = 2;
  Regime regime = Regime::sparse;
  RadiusRule radius;
  std::vector<double> n_grid;
  std::vector<std::string> statistics;
  std::size_t replicates = 50;
  std::uint64_t seed = 0;
  double max_excluded = 0.05;

  void validate() const {
    require(replicates >= 1, errc::config, "replicates must be >= 1");
    require(!n_grid.empty(), errc::config, "n grid is empty");
    require(!statistics.empty(), errc::config, "no statistics requested");
    require(radius.fits(regime), errc::config,
            "radius rule does not match the " + regime_name(regime) + " regime");
    for (double n : n_grid) require(n > 0, errc::config, "window volumes must be positive");
    if (planar_only(model)) require(d == 2, errc::config, model_name(model) + " is planar only");
  }
};

// Per-(n, statistic) replicate values; NaN marks an excluded replicate.
struct ReplicateTable {
  struct Cell {
    double n = 0;
    double r = 0;
    std::string statistic;
    std::vector<double> values;
    std::size_t excluded = 0;
    std::vector<double> kept() const {
      std::vector<double> v;
      for (double x : values)
        if (!std::isnan(x)) v.push_back(x);
      return v;
    }
  };
  std::vector<Cell> cells;
  std::vector<std::string> log;  // exclusion notices
};

inline std::uint64_t grid_seed(std::uint64_t master, std::size_t n_index) {
  return stream_seed(master, 0x9e37u + n_index);
}

inline ReplicateTable collect(const ExperimentPlan& plan, const PatternCatalog& cat = {}) {
  plan.validate();
  std::vector<Statistic> stats;
  for (const auto& id : plan.statistics) stats.push_back(Statistic::parse(id, cat));
  ReplicateTable table;
  for (std::size_t j = 0; j < plan.n_grid.size(); ++j) {
    const double n = plan.n_grid[j];
    const double r = plan.radius.radius(n, plan.d, j);
    require(r > 0 && std::isfinite(r), errc::config, "radius rule gives a nonpositive radius");
    double margin = 0;
    for (const auto& s : stats) margin = std::max(margin, s.margin(r));
    std::vector<std::vector<double>> values(stats.size(), std::vector<double>(plan.replicates));
    const auto seed = grid_seed(plan.seed, j);
    parallel_for(plan.replicates, [&](std::size_t i) {
      auto cfg = sample(plan.model, Window(plan.d, n), margin, stream_seed(seed, i));
      for (std::size_t s = 0; s < stats.size(); ++s) {
        try {
          values[s][i] = evaluate(stats[s], cfg, r);
        } catch (const error& e) {
          if (!excludable(e)) throw;
          values[s][i] = std::numeric_limits<double>::quiet_NaN();
        }
      }
    });
    for (std::size_t s = 0; s < stats.size(); ++s) {
      ReplicateTable::Cell cell{n, r, stats[s].id, std::move(values[s]), 0};
      cell.excluded = static_cast<std::size_t>(
          std::count_if(cell.values.begin(), cell.values.end(), [](double x) { return std::isnan(x); }));
      if (cell.excluded) {
        table.log.push_back("n=" + std::to_string(n) + " " + cell.statistic + ": excluded " +
                            std::to_string(cell.excluded) + " of " + std::to_string(plan.replicates));
        require(cell.excluded <= plan.max_excluded * plan.replicates, errc::excluded_replicates,
                "more than 5% of replicates excluded for " + cell.statistic);
      }
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

inline EstimateRecord summarize_cell(const ReplicateTable::Cell& c, const ExperimentPlan& plan) {
  auto kept = c.kept();
  auto s = summarize(kept);
  EstimateRecord rec;
  rec.statistic = c.statistic;
  rec.model = model_name(plan.model);
  rec.n = c.n;
  rec.r = c.r;
  rec.replicates = kept.size();
  rec.mean = s.mean;
  rec.variance = s.variance;
  rec.ci_half_width = s.ci_half_width();
  rec.seed = plan.seed;
  rec.excluded = c.excluded;
  return rec;
}

inline std::vector<EstimateRecord> run(const ExperimentPlan& plan, const PatternCatalog& cat = {},
                                       ReplicateTable* table_out = nullptr) {
  auto table = collect(plan, cat);
  std::vector<EstimateRecord> out;
  for (const auto& c : table.cells) out.push_back(summarize_cell(c, plan));
  if (table_out) *table_out = std::move(table);
  return out;
}

// ---- variance ratio ----------------------------------------------------------

struct RatioPoint {
  double n = 0;
  double mean = 0;
  double variance = 0;
  double ratio = std::numeric_limits<double>::quiet_NaN();  // NaN when mean is 0
  double ci_low = std::numeric_limits<double>::quiet_NaN();
  double ci_high = std::numeric_limits<double>::quiet_NaN();
  bool defined() const { return !std::isnan(ratio); }
};

struct RatioSeries {
  std::string statistic;
  std::vector<RatioPoint> points;
  // Theil-Sen slope of the ratio against log n, with a bootstrap 95% interval.
  double trend = std::numeric_limits<double>::quiet_NaN();
  double trend_low = std::numeric_limits<double>::quiet_NaN();
  double trend_high = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline double var_over_mean(std::span<const double> v) {
  auto s = summarize(v);
  return s.mean > 0 ? s.variance / s.mean : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

inline RatioSeries variance_ratio(const ReplicateTable& table, const std::string& statistic,
                                  std::uint64_t seed, std::size_t bootstrap = 2000) {
  RatioSeries out;
  out.statistic = statistic;
  std::vector<std::vector<double>> samples;
  for (const auto& c : table.cells) {
    if (c.statistic != statistic) continue;
    auto v = c.kept();
    RatioPoint p;
    p.n = c.n;
    auto s = summarize(v);
    p.mean = s.mean;
    p.variance = s.variance;
    p.ratio = detail::var_over_mean(v);
    samples.push_back(std::move(v));
    out.points.push_back(p);
  }
  require(!out.points.empty(), errc::invalid_argument, "statistic '" + statistic + "' not in table");
  auto rng = make_engine(seed);
  std::vector<std::vector<double>> boot(out.points.size());
  std::vector<double> slopes;
  std::vector<double> x;
  for (const auto& p : out.points) x.push_back(std::log(p.n));
  for (std::size_t b = 0; b < bootstrap; ++b) {
    std::vector<double> ratios(out.points.size());
    bool ok = true;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      const auto& v = samples[j];
      if (v.size() < 2) {
        ok = false;
        continue;
      }
      std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
      std::vector<double> rs(v.size());
      for (auto& y : rs) y = v[pick(rng)];
      ratios[j] = detail::var_over_mean(rs);
      if (std::isnan(ratios[j])) ok = false;
      else boot[j].push_back(ratios[j]);
    }
    if (ok && x.size() >= 2) slopes.push_back(theil_sen_slope(x, ratios));
  }
  for (std::size_t j = 0; j < out.points.size(); ++j) {
    if (!out.points[j].defined() || boot[j].size() < 10) continue;
    out.points[j].ci_low = quantile(boot[j], 0.025);
    out.points[j].ci_high = quantile(boot[j], 0.975);
  }
  bool all = std::all_of(out.points.begin(), out.points.end(), [](const auto& p) { return p.defined(); });
  if (all && x.size() >= 2) {
    std::vector<double> y;
    for (const auto& p : out.points) y.push_back(p.ratio);
    out.trend = theil_sen_slope(x, y);
    if (slopes.size() >= 10) {
      out.trend_low = quantile(slopes, 0.025);
      out.trend_high = quantile(slopes, 0.975);
    }
  }
  return out;
}

// ---- coverage ------------------------------------------------------------------

struct CoverageResult {
  double n = 0;
  double r = 0;
  std::size_t replicates = 0;
  std::size_t covered = 0;      // every r/(4 sqrt d) cube in the window is occupied
  std::size_t connected = 0;    // beta_0 = 1
  std::size_t acyclic = 0;      // beta_k = 0 for k >= 1
  std::size_t euler_one = 0;    // chi = 1
  std::size_t contractible_like = 0;  // all three consequences together
  std::size_t joint = 0;              // coverage and all consequences
  double coverage_frequency() const { return replicates ? double(covered) / replicates : 0.0; }
  double consequence_frequency() const { return replicates ? double(contractible_like) / replicates : 0.0; }
};

// Coverage sufficient condition and its consequences for the Cech complex at
// parameter r. In the plane beta_1 = beta_0 - chi since beta_2 vanishes.
inline CoverageResult coverage_experiment(const ModelSpec& model, int d, double n, double r,
                                          std::size_t replicates, std::uint64_t seed) {
  require(replicates >= 1, errc::invalid_argument, "replicates must be >= 1");
  require(r >= 0, errc::invalid_argument, "radius must be >= 0");
  CoverageResult out;
  out.n = n;
  out.r = r;
  out.replicates = replicates;
  std::vector<std::array<char, 4>> flags(replicates);
  parallel_for(replicates, [&](std::size_t i) {
    auto cfg = sample(model, Window(d, n), 0.0, stream_seed(seed, i));
    auto& f = flags[i];
    f = {0, 0, 0, 0};
    f[0] = detail::cubes_covered(cfg, r);
    if (r <= 0 || cfg.window_count() == 0) return;
    const long long b0 = detail::components_at(cfg, r);
    long long chi;
    bool acyclic;
    if (d == 2) {
      auto cp = critical_points(cfg, r / 2, d);
      chi = morse_euler(cp);
      acyclic = b0 - chi == 0;
    } else {
      auto cx = build_cech(cfg, r, d);
      auto b = betti_numbers(cx);
      chi = euler_characteristic(cx);
      acyclic = true;
      for (int k = 1; k < d; ++k) acyclic = acyclic && b[k] == 0;
    }
    f[1] = b0 == 1;
    f[2] = acyclic;
    f[3] = chi == 1;
  });
  for (const auto& f : flags) {
    out.covered += f[0];
    out.connected += f[1];
    out.acyclic += f[2];
    out.euler_one += f[3];
    out.contractible_like += f[1] && f[2] && f[3];
    out.joint += f[0] && f[1] && f[2] && f[3];
  }
  return out;
}

// Smallest C (on a 1/100 grid) for which the union bound over the cube
// lattice, (4 sqrt d)^d n / r^d * exp(-(r / (4 sqrt d))^d), is at most
// `failure` with r = C (log n)^(1/d).
inline double calibrate_connectivity_constant(int d, double n, double failure = 0.05) {
  const double k = 4 * std::sqrt(static_cast<double>(d));
  for (double c = 0.01;; c += 0.01) {
    const double r = c * std::pow(std::log(n), 1.0 / d);
    const double cubes = std::pow(k / r, d) * n;
    const double bound = cubes * std::exp(-std::pow(r / k, d));
    if (bound <= failure) return c;
    require(c < 1e4, errc::invalid_argument, "calibration did not converge");
  }
}

// ---- barcodes -----------------------------------------------------------------

struct BarcodeSummary {
  std::string model;
  std::size_t replicates = 0;
  Summary birth;   // per-replicate mean H_1 birth
  Summary onset;   // per-replicate earliest H_1 birth
  Summary death;   // per-replicate mean finite H_1 death
  Summary count;   // per-replicate number of H_1 bars
  std::size_t empty_replicates = 0;  // replicates without H_1 bars
  Barcode example;                   // first replicate's barcode
};

inline std::vector<BarcodeSummary> barcode_comparison(const std::vector<ModelSpec>& models, double n,
                                                      int max_dim, double eps_max,
                                                      std::size_t replicates, std::uint64_t seed,
                                                      int homology_dim = 1) {
  require(max_dim >= homology_dim + 1, errc::invalid_argument, "max_dim must exceed the homology degree");
  std::vector<BarcodeSummary> out;
  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto& model = models[m];
    BarcodeSummary s;
    s.model = model_name(model);
    s.replicates = replicates;
    std::vector<double> births(replicates, std::numeric_limits<double>::quiet_NaN()),
        deaths(replicates, std::numeric_limits<double>::quiet_NaN()), counts(replicates, 0),
        onsets(replicates, std::numeric_limits<double>::quiet_NaN());
    std::vector<Barcode> first(1);
    const auto mseed = stream_seed(seed, 0x5bdu + m);
    parallel_for(replicates, [&](std::size_t i) {
      auto cfg = sample(model, Window(2, n), 0.0, stream_seed(mseed, i));
      auto bc = persistence(rips_filtration(cfg, max_dim, eps_max));
      auto bars = bc.in_dim(homology_dim);
      counts[i] = static_cast<double>(bars.size());
      if (!bars.empty()) {
        double b = 0, dsum = 0;
        std::size_t finite = 0;
        for (const auto& bar : bars) {
          b += bar.birth;
          if (!bar.essential()) {
            dsum += bar.death;
            ++finite;
          }
        }
        births[i] = b / bars.size();
        onsets[i] = bars.front().birth;
        if (finite) deaths[i] = dsum / finite;
      }
      if (i == 0) first[0] = std::move(bc);
    });
    std::vector<double> kb, kd, ko;
    for (std::size_t i = 0; i < replicates; ++i) {
      if (!std::isnan(onsets[i])) ko.push_back(onsets[i]);
      if (!std::isnan(births[i])) kb.push_back(births[i]);
      else ++s.empty_replicates;
      if (!std::isnan(deaths[i])) kd.push_back(deaths[i]);
    }
    s.birth = summarize(kb);
    s.onset = summarize(ko);
    s.death = summarize(kd);
    s.count = summarize(counts);
    s.example = std::move(first[0]);
    s.example.source = s.model;
    out.push_back(std::move(s));
  }
  return out;
}

// ---- Euler characteristic ----------------------------------------------------------

struct EulerPoint {
  double n = 0;
  double r = 0;
  EstimateRecord chi_over_n;
};

inline std::vector<EulerPoint> euler_convergence(const ModelSpec& model, int d, Regime regime,
                                                 const RadiusRule& rule, const std::vector<double>& n_grid,
                                                 std::size_t replicates, std::uint64_t seed) {
  ExperimentPlan plan;
  plan.model = model;
  plan.d = d;
  plan.regime = regime;
  plan.radius = rule;
  plan.n_grid = n_grid;
  plan.statistics = {"chi"};
  plan.replicates = replicates;
  plan.seed = seed;
  ReplicateTable table;
  auto recs = run(plan, {}, &table);
  std::vector<EulerPoint> out;
  for (std::size_t j = 0; j < recs.size(); ++j) {
    EulerPoint p;
    p.n = recs[j].n;
    p.r = recs[j].r;
    std::vector<double> scaled;
    for (double v : table.cells[j].kept()) scaled.push_back(v / p.n);
    auto s = summarize(scaled);
    p.chi_over_n = recs[j];
    p.chi_over_n.statistic = "chi/n";
    p.chi_over_n.mean = s.mean;
    p.chi_over_n.variance = s.variance;
    p.chi_over_n.ci_half_width = s.ci_half_width();
    out.push_back(p);
  }
  return out;
}

}  // namespace rgc
