#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rgc/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rgc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int s = rgc::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {s, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("rgc-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& text) {
    auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string out(const std::string& name) { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, MinimalSampleConfig) {
  auto cfg = file("s.json", R"({"model": "poisson", "n": 100, "seed": 7})");
  auto r = run_cli({"sample", "--config", cfg, "--out", out("o")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(out("o") + "/points.csv"));
  EXPECT_TRUE(fs::exists(out("o") + "/run.log"));
  auto resolved = rgc::cli::load_json(out("o") + "/resolved-config.json");
  EXPECT_EQ(resolved["seed"], 7);
  EXPECT_EQ(resolved["model"]["kind"], "poisson");
}

TEST_F(Cli, SeedRequired) {
  auto cfg = file("s.json", R"({"model": "poisson", "n": 100})");
  auto r = run_cli({"sample", "--config", cfg, "--out", out("o")});
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("seed required"), std::string::npos) << r.err;
}

TEST_F(Cli, FlagOverridesFileValue) {
  auto cfg = file("b.json", R"({"seed": 1, "n": 40, "r": 0.5})");
  auto r = run_cli({"betti", "--config", cfg, "--r", "0.05", "--out", out("o")});
  ASSERT_EQ(r.status, 0) << r.err;
  auto resolved = rgc::cli::load_json(out("o") + "/resolved-config.json");
  EXPECT_EQ(resolved["r"].get<double>(), 0.05);
}

TEST_F(Cli, UnknownKeysReportedByPath) {
  auto top = run_cli({"sample", "--config", file("a.json", R"({"seed": 1, "modle": "poisson"})"), "--out", out("o")});
  EXPECT_EQ(top.status, 2);
  EXPECT_NE(top.err.find("unknown key 'modle'"), std::string::npos) << top.err;
  auto nested = run_cli({"sample", "--config", file("b.json", R"({"seed": 1, "model": {"kind": "cox", "radius": 1}})"),
                         "--out", out("o")});
  EXPECT_NE(nested.err.find("unknown key 'model.radius'"), std::string::npos) << nested.err;
  auto misplaced = run_cli({"sample", "--config", file("c.json", R"({"seed": 1, "r": 1})"), "--out", out("o")});
  EXPECT_NE(misplaced.err.find("unknown key 'r'"), std::string::npos) << misplaced.err;
}

TEST_F(Cli, SyntaxErrorsCarryLineNumbers) {
  auto cfg = file("bad.json", "{\n  \"seed\": 1,\n  \"n\": 100,,\n}\n");
  auto r = run_cli({"sample", "--config", cfg, "--out", out("o")});
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(Cli, TypeAndPatternErrors) {
  auto t = run_cli({"sample", "--config", file("t.json", R"({"seed": 1, "n": "many"})"), "--out", out("o")});
  EXPECT_NE(t.err.find("key 'n'"), std::string::npos) << t.err;
  auto p = run_cli({"limits", "--config", file("p.json", R"({"seed": 1, "limits": {"pattern": "nonagon"}})"),
                    "--out", out("o")});
  EXPECT_EQ(p.status, 2);
  auto cmd = run_cli({"sample", "--config", file("c.json", R"({"seed": 1, "command": "betti"})"), "--out", out("o")});
  EXPECT_EQ(cmd.status, 2);
}

TEST_F(Cli, PersistSquareFixture) {
  auto cfg = file("p.json", std::string(R"({"seed": 1, "points": ")") + RGC_DATA_DIR +
                                R"(/fixtures/square.csv", "max_dim": 2, "eps_max": 3})");
  auto r = run_cli({"persist", "--config", cfg, "--out", out("o")});
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream csv(slurp(out("o") + "/barcode.csv"));
  std::string line;
  std::vector<std::string> h1;
  while (std::getline(csv, line))
    if (line.rfind("1,", 0) == 0) h1.push_back(line);
  ASSERT_EQ(h1.size(), 1u);
  EXPECT_EQ(h1[0], "1,1.4142135623730951,2");
  const auto svg = slurp(out("o") + "/barcode.svg");
  EXPECT_NE(svg.find(">H1<"), std::string::npos);
  EXPECT_EQ(svg.find(">H2<"), std::string::npos);  // no bars, no label
}

TEST_F(Cli, ExperimentSparseBettiZero) {
  auto cfg = file("e.json", R"({"seed": 42, "experiment": {"regime": "sparse",
      "radius": {"rule": "list", "values": [0.01]}, "n_grid": [10000],
      "statistics": ["betti_cech:0"], "replicates": 5}})");
  auto r = run_cli({"experiment", "--config", cfg, "--out", out("o")});
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream csv(slurp(out("o") + "/estimates.csv"));
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  std::vector<std::string> cells;
  std::istringstream rs(row);
  for (std::string c; std::getline(rs, c, ',');) cells.push_back(c);
  ASSERT_GE(cells.size(), 6u);
  EXPECT_EQ(cells[0], "betti_cech:0");
  const double ratio = std::stod(cells[5]) / 1e4;
  EXPECT_GE(ratio, 0.95);
  EXPECT_LE(ratio, 1.02);
}

TEST_F(Cli, ResolvedConfigRoundTripAndThreads) {
  auto cfg = file("e.json", R"({"seed": 5, "model": {"kind": "lattice", "law": "binomial"},
      "experiment": {"regime": "thermodynamic", "radius": {"rule": "thermodynamic", "beta": 1},
      "n_grid": [100, 200], "statistics": ["G:edge", "N:1", "betti_rips:1"], "replicates": 8}})");
  ASSERT_EQ(run_cli({"experiment", "--config", cfg, "--out", out("a")}).status, 0);
  ASSERT_EQ(run_cli({"experiment", "--config", out("a") + "/resolved-config.json", "--out", out("b"), "--threads", "3"})
                .status,
            0);
  EXPECT_EQ(slurp(out("a") + "/estimates.csv"), slurp(out("b") + "/estimates.csv"));
}

TEST_F(Cli, FailureLeavesOnlyErrorRecord) {
  auto cfg = file("l.json", R"({"seed": 1, "limits": {"samples": 10}})");
  auto r = run_cli({"limits", "--config", cfg, "--out", out("o")});
  EXPECT_EQ(r.status, 1);
  EXPECT_FALSE(fs::exists(out("o") + "/resolved-config.json"));
  EXPECT_FALSE(fs::exists(out("o") + "/limits.csv"));
  auto e = rgc::cli::load_json(out("o") + "/error.json");
  EXPECT_EQ(e["code"], "invalid_argument");
}

TEST_F(Cli, MorseAndComplexOutputs) {
  ASSERT_EQ(run_cli({"morse", "--seed", "2", "--n", "30", "--r", "0.6", "--out", out("m")}).status, 0);
  auto counts = slurp(out("m") + "/morse_counts.csv");
  EXPECT_EQ(counts.rfind("index,count\n0,", 0), 0u);
  EXPECT_NE(slurp(out("m") + "/run.log").find("cech parameter 1.2"), std::string::npos);
  ASSERT_EQ(run_cli({"complex", "--seed", "2", "--n", "30", "--r", "0.9", "--out", out("c")}).status, 0);
  EXPECT_FALSE(slurp(out("c") + "/complex.csv").empty());
}

TEST_F(Cli, UsageErrors) {
  EXPECT_NE(run_cli({}).status, 0);
  EXPECT_NE(run_cli({"sample", "--bogus", "1"}).status, 0);
}
