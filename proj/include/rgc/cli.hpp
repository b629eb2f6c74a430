// Configuration parsing and dispatch for the `rgc` command-line tool.
#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rgc/experiments.hpp"
#include "rgc/io.hpp"
#include "rgc/morse.hpp"

namespace rgc::cli {

using json = nlohmann::ordered_json;

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"sample", "complex", "betti", "persist", "morse", "limits", "experiment"};
  return c;
}

struct LimitsSpec {
  std::string constant = "mu0";  // mu0 | mu_beta | gamma_beta | nu_k
  std::string pattern = "edge";
  bool complex_pattern = false;
  double beta = 0;
  int index = 1;
  std::size_t samples = 100000;
  SimulationBudget budget;
};

struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out = "rgc-out";
  ModelSpec model = Poisson{};
  int d = 2;
  double n = 100;
  double margin = 0;
  std::string points;  // explicit point file instead of sampling
  double r = 1;
  int max_dim = 2;
  ComplexKind kind = ComplexKind::rips;
  double eps_max = 2;
  CountMode mode = CountMode::interior;
  std::string patterns;
  PatternCatalog catalog;
  LimitsSpec limits;
  ExperimentPlan plan;
  json resolved;  // every setting after defaults and overrides
};

namespace detail {

inline std::string type_name(const json& j) { return j.type_name(); }

// Reads keys of one JSON object, records the resolved value of each, and
// reports keys that nothing consumed.
class Reader {
 public:
  Reader(const json& in, json& out, std::string path) : in_(in), out_(out), path_(std::move(path)) {
    require(in.is_object(), errc::config, where("") + "expected an object, got " + type_name(in));
    out_ = json::object();
  }

  bool has(const std::string& key) const { return in_.contains(key); }
  std::string where(const std::string& key) const { return "key '" + path_ + key + "': "; }

  template <class T>
  T get(const std::string& key, const T& fallback) {
    used_.insert(key);
    if (!in_.contains(key)) {
      out_[key] = fallback;
      return fallback;
    }
    T v = convert<T>(key, in_.at(key));
    out_[key] = v;
    return v;
  }

  template <class T>
  T need(const std::string& key, const std::string& message) {
    require(in_.contains(key), errc::config, message);
    return get<T>(key, T{});
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return in_.at(key);
  }
  json& out(const std::string& key) { return out_[key]; }
  std::string child(const std::string& key) const { return path_ + key + "."; }

  void forbid(const std::string& key, const std::string& why) {
    require(!in_.contains(key), errc::config, where(key) + why);
  }

  void finish() const {
    for (auto it = in_.begin(); it != in_.end(); ++it)
      require(used_.count(it.key()) > 0, errc::config, "unknown key '" + path_ + it.key() + "'");
  }

 private:
  template <class T>
  T convert(const std::string& key, const json& v) const {
    try {
      if constexpr (std::is_same_v<T, std::uint64_t>) {
        require(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0), errc::config,
                where(key) + "expected a nonnegative integer");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        require(v.is_number_integer(), errc::config, where(key) + "expected an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        require(v.is_number(), errc::config, where(key) + "expected a number");
      }
      return v.get<T>();
    } catch (const json::exception&) {
      fail(errc::config, where(key) + "unexpected " + type_name(v));
    }
  }

  const json& in_;
  json& out_;
  std::string path_;
  std::set<std::string> used_;
};

inline Replication parse_replication(const std::string& s, const std::string& where) {
  if (s == "constant") return Replication::constant;
  if (s == "binomial") return Replication::binomial;
  if (s == "hypergeometric") return Replication::hypergeometric;
  if (s == "negative_binomial") return Replication::negative_binomial;
  if (s == "geometric") return Replication::geometric;
  fail(errc::config, where + "unknown replication law '" + s + "'");
}

inline ModelSpec parse_model(const json& in, json& out, const std::string& path, int d) {
  if (in.is_string()) return parse_model(json{{"kind", in}}, out, path, d);
  Reader r(in, out, path);
  const auto kind = r.need<std::string>("kind", "key '" + path + "kind' required");
  ModelSpec m;
  if (kind == "poisson") {
    m = Poisson{};
  } else if (kind == "ginibre") {
    m = Ginibre{};
  } else if (kind == "gef") {
    m = GefZeros{};
  } else if (kind == "cox") {
    m = CoxCluster{r.get<double>("cluster_radius", 0.5), r.get<int>("per_cluster", 4)};
  } else if (kind == "cox_matched") {
    m = cox_matched(r.get<double>("beta", 1.0), d);
  } else if (kind == "lattice") {
    PerturbedLattice p;
    p.law.kind = parse_replication(r.get<std::string>("law", "constant"), r.where("law"));
    p.law.trials = r.get<int>("trials", p.law.trials);
    p.law.population = r.get<int>("population", p.law.population);
    p.law.successes = r.get<int>("successes", p.law.successes);
    p.law.draws = r.get<int>("draws", p.law.draws);
    p.law.shape = r.get<double>("shape", p.law.shape);
    p.shift_origin = r.get<bool>("shift_origin", true);
    p.law.validate();
    m = p;
  } else {
    fail(errc::config, r.where("kind") + "unknown model '" + kind + "'");
  }
  r.finish();
  require(!planar_only(m) || d == 2, errc::config, model_name(m) + " requires d = 2");
  return m;
}

inline RadiusRule parse_radius(const json& in, json& out, const std::string& path) {
  Reader r(in, out, path);
  const auto rule = r.need<std::string>("rule", "key '" + path + "rule' required");
  RadiusRule rr;
  if (rule == "list") rr = RadiusRule::list(r.need<std::vector<double>>("values", r.where("values") + "required"));
  else if (rule == "power") rr = RadiusRule::power(r.get<double>("c", 1.0), r.need<double>("a", r.where("a") + "required"));
  else if (rule == "thermodynamic") rr = RadiusRule::thermodynamic(r.get<double>("beta", 1.0));
  else if (rule == "logarithmic") rr = RadiusRule::logarithmic(r.need<double>("c", r.where("c") + "required"), r.get<double>("p", 0.5));
  else fail(errc::config, r.where("rule") + "unknown radius rule '" + rule + "'");
  r.finish();
  return rr;
}

inline ComplexKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "rips") return ComplexKind::rips;
  if (s == "cech") return ComplexKind::cech;
  fail(errc::config, where + "expected 'rips' or 'cech'");
}

}  // namespace detail

// Line-numbered JSON parse; comments are allowed.
inline json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    const auto upto = text.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(e.byte, text.size()));
    const auto line = 1 + std::count(text.begin(), upto, '\n');
    std::string what = e.what();
    auto colon = what.find(": ");
    if (colon != std::string::npos) what = what.substr(colon + 2);
    fail(errc::config, source + " line " + std::to_string(line) + ": " + what);
  }
}

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::io, "cannot read config '" + path + "'");
  std::stringstream s;
  s << in.rdbuf();
  return parse_json(s.str(), path);
}

// Validates a raw config for `command` and fills every default.
inline RunConfig resolve(const std::string& command, const json& raw) {
  require(std::find(commands().begin(), commands().end(), command) != commands().end(), errc::config,
          "unknown command '" + command + "'");
  RunConfig c;
  c.command = command;
  json& res = c.resolved;
  detail::Reader r(raw, res, "");
  if (r.has("command")) {
    const auto declared = r.get<std::string>("command", command);
    require(declared == command, errc::config,
            "config is for '" + declared + "' but the command is '" + command + "'");
  }
  res["command"] = command;
  require(r.has("seed"), errc::config, "seed required");
  c.seed = r.get<std::uint64_t>("seed", 0);
  c.threads = r.get<unsigned>("threads", 1u);
  c.out = r.get<std::string>("out", c.out);
  c.d = r.get<int>("d", 2);
  require(c.d >= 1 && c.d <= 8, errc::config, "key 'd': dimension must lie in [1, 8]");
  c.patterns = r.get<std::string>("patterns", "");
  if (!c.patterns.empty()) c.catalog = PatternCatalog::load(c.patterns);

  const bool uses_points = command != "limits" && command != "experiment";
  if (uses_points) {
    c.points = r.get<std::string>("points", "");
    if (c.points.empty()) {
      c.model = r.has("model") ? detail::parse_model(r.raw("model"), r.out("model"), "model.", c.d)
                               : detail::parse_model(json("poisson"), r.out("model"), "model.", c.d);
      c.n = r.get<double>("n", c.n);
      require(c.n >= 0, errc::config, "key 'n': window volume must be >= 0");
    } else {
      r.forbid("model", "not allowed together with 'points'");
      r.forbid("n", "not allowed together with 'points'");
      c.model = Explicit{};
    }
    c.margin = r.get<double>("margin", 0.0);
    require(c.margin >= 0, errc::config, "key 'margin': must be >= 0");
  }
  if (command == "complex" || command == "betti") {
    c.r = r.get<double>("r", c.r);
    c.max_dim = r.get<int>("max_dim", c.max_dim);
    c.kind = detail::parse_kind(r.get<std::string>("complex", "rips"), r.where("complex"));
  }
  if (command == "persist") {
    c.max_dim = r.get<int>("max_dim", c.max_dim);
    c.eps_max = r.get<double>("eps_max", c.eps_max);
    c.kind = detail::parse_kind(r.get<std::string>("complex", "rips"), r.where("complex"));
  }
  if (command == "complex" || command == "betti" || command == "persist")
    require(c.max_dim >= 0 && c.max_dim <= max_face_dim, errc::config, "key 'max_dim': must lie in [0, 8]");
  if (command == "morse") {
    c.r = r.get<double>("r", c.r);
    const auto mode = r.get<std::string>("mode", "interior");
    require(mode == "interior" || mode == "ambient", errc::config, "key 'mode': expected 'interior' or 'ambient'");
    c.mode = mode == "ambient" ? CountMode::ambient : CountMode::interior;
  }
  if (command == "limits") {
    c.model = r.has("model") ? detail::parse_model(r.raw("model"), r.out("model"), "model.", c.d)
                             : detail::parse_model(json("poisson"), r.out("model"), "model.", c.d);
    json empty = json::object();
    const json& in = r.has("limits") ? r.raw("limits") : empty;
    detail::Reader l(in, r.out("limits"), "limits.");
    auto& L = c.limits;
    L.constant = l.get<std::string>("constant", L.constant);
    require(L.constant == "mu0" || L.constant == "mu_beta" || L.constant == "gamma_beta" || L.constant == "nu_k",
            errc::config, l.where("constant") + "expected mu0, mu_beta, gamma_beta or nu_k");
    if (L.constant == "nu_k") {
      L.index = l.get<int>("index", L.index);
    } else {
      L.pattern = l.get<std::string>("pattern", L.pattern);
      L.complex_pattern = l.get<bool>("complex_pattern", false);
      if (L.complex_pattern) c.catalog.complex(L.pattern);
      else c.catalog.graph(L.pattern);
    }
    if (L.constant != "mu0") L.beta = l.get<double>("beta", L.constant == "nu_k" ? 0.0 : 1.0);
    L.samples = l.get<std::size_t>("samples", L.samples);
    L.budget.n = l.get<double>("simulation_n", L.budget.n);
    L.budget.replicates = l.get<std::size_t>("simulation_replicates", L.budget.replicates);
    l.finish();
  }
  if (command == "experiment") {
    c.model = r.has("model") ? detail::parse_model(r.raw("model"), r.out("model"), "model.", c.d)
                             : detail::parse_model(json("poisson"), r.out("model"), "model.", c.d);
    require(r.has("experiment"), errc::config, "key 'experiment' required");
    detail::Reader e(r.raw("experiment"), r.out("experiment"), "experiment.");
    auto& P = c.plan;
    P.model = c.model;
    P.d = c.d;
    P.seed = c.seed;
    P.regime = parse_regime(e.get<std::string>("regime", "sparse"));
    require(e.has("radius"), errc::config, "key 'experiment.radius' required");
    P.radius = detail::parse_radius(e.raw("radius"), e.out("radius"), "experiment.radius.");
    P.n_grid = e.need<std::vector<double>>("n_grid", "key 'experiment.n_grid' required");
    P.statistics = e.need<std::vector<std::string>>("statistics", "key 'experiment.statistics' required");
    P.replicates = e.get<std::size_t>("replicates", P.replicates);
    P.max_excluded = e.get<double>("max_excluded", P.max_excluded);
    e.finish();
    for (const auto& s : P.statistics) Statistic::parse(s, c.catalog);
    P.validate();
  }
  r.finish();
  return c;
}

// ---- dispatch ---------------------------------------------------------------

class Outputs {
 public:
  explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::ofstream open(const std::string& name) {
    auto p = dir_ / name;
    std::ofstream f(p);
    require(f.good(), errc::io, "cannot write '" + p.string() + "'");
    created_.push_back(p);
    return f;
  }
  void remove_all() {
    std::error_code ec;
    for (const auto& p : created_) std::filesystem::remove(p, ec);
    created_.clear();
  }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> created_;
};

inline PointConfiguration input_configuration(const RunConfig& c) {
  if (!c.points.empty()) {
    std::ifstream in(c.points);
    require(in.good(), errc::io, "cannot read points '" + c.points + "'");
    return PointConfiguration::enclosing(read_points_csv(in, c.d), c.margin);
  }
  return sample(c.model, Window(c.d, c.n), c.margin, c.seed);
}

inline LimitConstant evaluate_limit(const RunConfig& c) {
  const auto& L = c.limits;
  if (L.constant == "nu_k") return nu_k(c.model, c.d, L.beta, L.index, L.samples, c.seed, L.budget);
  if (L.complex_pattern) {
    require(L.constant == "mu0", errc::config, "complex patterns support mu0 only");
    return mu0(c.catalog.complex(L.pattern), c.model, c.d, L.samples, c.seed);
  }
  const auto p = c.catalog.graph(L.pattern);
  if (L.constant == "mu0") return mu0(p, c.model, c.d, L.samples, c.seed);
  if (L.constant == "mu_beta") return mu_beta(p, c.model, c.d, L.beta, L.samples, c.seed, L.budget);
  return gamma_beta(p, c.model, c.d, L.beta, L.samples, c.seed, L.budget);
}

inline void execute(const RunConfig& c, Outputs& files, std::ostream& log) {
  const auto& cmd = c.command;
  if (cmd == "sample") {
    auto cfg = input_configuration(c);
    auto f = files.open("points.csv");
    write_points_csv(f, cfg);
    log << "points " << cfg.points().size() << " window " << cfg.window_count() << '\n';
  } else if (cmd == "complex" || cmd == "betti") {
    auto cfg = input_configuration(c);
    const PointSet pts = cfg.points().subset(cfg.window_ids());
    // Betti numbers up to max_dim need the faces one dimension higher.
    const int top = cmd == "betti" ? std::min(c.max_dim + 1, max_face_dim) : c.max_dim;
    auto k = build_complex(c.kind, pts, c.r, top);
    if (cmd == "complex") {
      auto f = files.open("complex.csv");
      write_complex(f, k, c.kind, pts);
    } else {
      auto b = betti_numbers(k);
      auto f = files.open("betti.csv");
      f << "kind,eps,dim,betti\n";
      for (int q = 0; q <= std::min(c.max_dim, top); ++q)
        f << complex_kind_name(c.kind) << ',' << fmt(c.r) << ',' << q << ',' << b.b[q] << '\n';
      log << "euler_characteristic " << euler_characteristic(k) << '\n';
    }
    for (int p = 0; p <= k.max_dim(); ++p) log << "faces dim " << p << ": " << k.count(p) << '\n';
  } else if (cmd == "persist") {
    auto cfg = input_configuration(c);
    auto f = build_filtration(c.kind, cfg.points().subset(cfg.window_ids()), c.max_dim, c.eps_max);
    auto bc = persistence(f);
    bc.source = model_name(c.model);
    // Top-dimensional cycles are never filled in a truncated filtration.
    std::erase_if(bc.bars, [&](const Bar& b) { return b.dim >= c.max_dim && c.max_dim > 0; });
    auto csv = files.open("barcode.csv");
    write_barcode_csv(csv, bc);
    auto svg = files.open("barcode.svg");
    write_barcode_svg(svg, bc, complex_kind_name(c.kind) + " " + bc.source);
    log << "simplices " << f.size() << " bars " << bc.bars.size() << '\n';
  } else if (cmd == "morse") {
    auto cfg = input_configuration(c);
    auto cp = critical_points(cfg, c.r, cfg.dim(), c.mode);
    auto f = files.open("critical_points.csv");
    write_critical_points_csv(f, cp);
    auto counts = files.open("morse_counts.csv");
    counts << "index,count\n";
    for (std::size_t k = 0; k < cp.counts.size(); ++k) counts << k << ',' << cp.counts[k] << '\n';
    log << "critical value " << fmt(c.r) << " matches cech parameter " << fmt(2 * c.r) << '\n';
    log << "morse_euler " << morse_euler(cp) << " degenerate " << cp.degenerate << " near_threshold "
        << cp.near_threshold << '\n';
  } else if (cmd == "limits") {
    auto v = evaluate_limit(c);
    auto f = files.open("limits.csv");
    write_limits_csv_header(f);
    write_limits_csv_row(f, v);
    log << "method " << v.method << '\n';
  } else if (cmd == "experiment") {
    ReplicateTable table;
    auto recs = run(c.plan, c.catalog, &table);
    auto f = files.open("estimates.csv");
    write_estimates_csv(f, recs);
    for (const auto& line : table.log) log << line << '\n';
  }
}

struct Outcome {
  int status = 0;
  std::string message;
};

// Runs one resolved command in its output directory. On failure the partial
// outputs are removed and error.json describes the failure.
inline Outcome dispatch(const RunConfig& c) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) return {1, "cannot create output directory '" + c.out + "': " + ec.message()};
  Outputs files(c.out);
  default_threads() = c.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : c.threads;
  std::ostringstream log;
  try {
    {
      auto rc = files.open("resolved-config.json");
      rc << c.resolved.dump(2) << '\n';
    }
    const auto start = std::chrono::steady_clock::now();
    log << "command " << c.command << " seed " << c.seed << " threads " << default_threads() << '\n';
    auto previous = warning_sink();
    warning_sink() = [&log, previous](const std::string& m) {
      log << "warning " << m << '\n';
      if (previous) previous(m);
    };
    struct Restore {
      std::function<void(const std::string&)> sink;
      ~Restore() { warning_sink() = sink; }
    } restore{previous};
    execute(c, files, log);
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    log << "seconds " << took.count() << '\n';
    auto f = files.open("run.log");
    f << log.str();
    return {0, ""};
  } catch (const error& e) {
    files.remove_all();
    std::ofstream err(fs::path(c.out) / "error.json");
    err << json{{"code", errc_name(e.code())}, {"message", e.what()}}.dump(2) << '\n';
    return {e.code() == errc::config ? 2 : 1, std::string(errc_name(e.code())) + ": " + e.what()};
  }
}

// Command-line entry point. Flags override keys from --config.
inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Random geometric complexes over point processes"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<double> r, n;
  for (const auto& name : commands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--r", r, "radius or complex parameter");
    sub->add_option("--n", n, "window volume");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  const std::string command = app.get_subcommands().front()->get_name();
  RunConfig cfg;
  try {
    json raw = config_path.empty() ? json::object() : load_json(config_path);
    require(raw.is_object(), errc::config, "config must be a JSON object");
    if (seed) raw["seed"] = *seed;
    if (threads) raw["threads"] = *threads;
    if (!out_dir.empty()) raw["out"] = out_dir;
    if (r) raw["r"] = *r;
    if (n) raw["n"] = *n;
    cfg = resolve(command, raw);
  } catch (const error& e) {
    err << "rgc: " << errc_name(e.code()) << ": " << e.what() << '\n';
    return 2;
  }
  auto o = dispatch(cfg);
  if (o.status != 0) err << "rgc: " << o.message << '\n';
  else out << cfg.out << '\n';
  return o.status;
}

}  // namespace rgc::cli
