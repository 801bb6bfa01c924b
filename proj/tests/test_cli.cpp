#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cssball/cli.hpp"

using namespace cssball;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "cssball");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

cli::RunConfig parse(std::vector<std::string> args) {
  args.insert(args.begin(), "cssball");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::parse_config(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / "cssball_cli_test";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(ParseConfig, RootsFlags) {
  const auto c = parse({"roots", "--p", "2", "--omega", "0.05"});
  EXPECT_EQ(c.command, "roots");
  EXPECT_EQ(c.params.p, 2.0);
  EXPECT_EQ(c.params.omega, 0.05);
  EXPECT_EQ(c.format, "json");
}

TEST(ParseConfig, SolveFlags) {
  const auto c = parse({"solve", "--p", "2", "--omega", "0.05", "--radius", "80", "--nodes",
                        "3200", "--out", "run.json"});
  EXPECT_EQ(c.radius, 80.0);
  EXPECT_EQ(c.nodes.value(), 3200u);
  EXPECT_EQ(c.out, "run.json");
  EXPECT_EQ(c.tol(), 1e-8);
}

TEST(ParseConfig, ExponentOutsideWindowIsUsageError) {
  try {
    parse({"roots", "--p", "4"});
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("p outside (1,3)"), std::string::npos);
  }
  const auto r = run({"roots", "--p", "4"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("p outside (1,3)"), std::string::npos);
}

TEST(ParseConfig, OtherUsageErrors) {
  EXPECT_THROW(parse({"bogus"}), UsageError);
  EXPECT_THROW(parse({"roots", "--frobnicate", "1"}), UsageError);
  EXPECT_THROW(parse({"roots", "--omega", "-1"}), UsageError);
  EXPECT_THROW(parse({"scan", "--omega", "0.2"}), UsageError);
  EXPECT_THROW(parse({"scan", "--alpha", "0.3"}), UsageError);
  EXPECT_THROW(parse({"scan", "--nodes", "5"}), UsageError);
  EXPECT_THROW(parse({"roots", "--p", "2,2.5"}), UsageError);
  EXPECT_THROW(parse({"thresholds", "--p-min", "2.5", "--p-max", "2"}), UsageError);
  EXPECT_THROW(parse({"spectrum", "--branch", "k3"}), UsageError);
}

TEST(ParseConfig, ConfigFileAndOverride) {
  const fs::path cfg = scratch_dir() / "run.cfg";
  io::write_file(cfg, "p=2.2\nomega=0.07\nradius=50\n");
  const auto c = parse({"scan", "--config", cfg.string(), "--omega", "0.04"});
  EXPECT_EQ(c.params.p, 2.2);
  EXPECT_EQ(c.params.omega, 0.04);
  EXPECT_EQ(c.radius, 50.0);
}

TEST(ParseConfig, UnknownConfigKeyNamed) {
  const fs::path cfg = scratch_dir() / "bad.cfg";
  io::write_file(cfg, "p=2\nbogus_key=1\n");
  try {
    parse({"roots", "--config", cfg.string()});
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("bogus_key"), std::string::npos);
  }
}

TEST(ParseConfig, SweepLists) {
  const auto c = parse({"sweep", "--p", "2", "--omega", "0.03,0.05,0.08", "--radius", "40,80"});
  EXPECT_EQ(c.omega_list.size(), 3u);
  EXPECT_EQ(c.radius_list.size(), 2u);
}

TEST(Emit, ThresholdsCsv) {
  const auto r = run({"thresholds", "--p-min", "1.5", "--p-max", "2.5", "--samples", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.find('\r'), std::string::npos);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "p,m,omega0,omega1");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].substr(0, 2), "2,");
  EXPECT_NE(rows[1].find("0.10327955589886"), std::string::npos);  // 2/(5 sqrt 15)
}

TEST(Emit, DoublesRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 2.0 / (9.0 * std::sqrt(3.0)), 6.02214076e23, -1e-300}) {
    EXPECT_EQ(std::strtod(io::format_double(x).c_str(), nullptr), x);
  }
}

TEST(Emit, DeterministicOutput) {
  const auto a = run({"thresholds", "--samples", "7"});
  const auto b = run({"thresholds", "--samples", "7"});
  EXPECT_EQ(a.out, b.out);
  const auto c = run({"spectrum", "--nodes", "400", "--seed", "3"});
  const auto d = run({"spectrum", "--nodes", "400", "--seed", "3"});
  EXPECT_EQ(c.out, d.out);
}

TEST(Emit, RootsJson) {
  const auto r = run({"roots", "--p", "2", "--omega", "0.05"});
  ASSERT_EQ(r.code, 0);
  const auto j = io::json::parse(r.out);
  EXPECT_EQ(j["kind"], "pair");
  EXPECT_NEAR(j["k2"].get<double>(), 0.30477, 1e-5);
  const auto none = io::json::parse(run({"roots", "--omega", "0.2"}).out);
  EXPECT_EQ(none["kind"], "none");
  EXPECT_TRUE(none["k1"].is_null());
}

TEST(Emit, SpectrumJson) {
  const auto r = run({"spectrum", "--branch", "k0", "--nodes", "1000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::json::parse(r.out);
  EXPECT_TRUE(j["degenerate"].get<bool>());
  EXPECT_TRUE(j["eigenvalues"].is_array());
}

TEST(Emit, ScanCsvWithSummaryAndSvg) {
  const fs::path out = scratch_dir() / "scan.csv";
  const fs::path svg = scratch_dir() / "scan.svg";
  const auto r = run({"scan", "--radius", "40", "--samples", "16", "--out", out.string(), "--svg", svg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = io::read_file(out);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "rho,phi,model_phi");
  const auto j = io::json::parse(io::read_file(scratch_dir() / "scan.json"));
  EXPECT_TRUE(j.contains("rho_star"));
  EXPECT_NE(io::read_file(svg).find("<svg"), std::string::npos);
}

TEST(Emit, SolveJsonAndFieldRoundTrip) {
  const fs::path out = scratch_dir() / "solve.json";
  const auto r = run({"solve", "--radius", "30", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::json::parse(io::read_file(out));
  EXPECT_TRUE(j["converged"].get<bool>());
  EXPECT_TRUE(j["energy"].contains("nonlocal"));
  const fs::path field_csv = scratch_dir() / "solve.csv";
  const auto field = io::read_field_csv(field_csv);
  EXPECT_EQ(field.grid().n(), 1200u);
  // Re-emitting the parsed field reproduces the file byte for byte.
  EXPECT_EQ(io::to_csv(io::field_table(field)), io::read_file(field_csv));
}

TEST(Emit, FieldRoundTripIsExact) {
  const radial::Grid g(7.3, 333);
  radial::Vector u(g.size());
  for (std::size_t i = 0; i + 1 < g.size(); ++i) u[i] = std::sin(0.37 * static_cast<double>(i)) / 3.0;
  u.back() = 0.0;
  const radial::RadialField f(g, u);
  const auto back = io::field_from_csv(io::to_csv(io::field_table(f)), "mem");
  EXPECT_EQ(back.grid(), g);
  EXPECT_EQ(back.u(), f.u());
  EXPECT_EQ(back.H(), f.H());
  EXPECT_EQ(back.Tail(), f.Tail());
}

TEST(ExitCodes, NumericalFailure) {
  const auto r = run({"solve", "--radius", "30", "--max-iter", "1"});
  EXPECT_EQ(r.code, 3);
}

TEST(ExitCodes, IoFailure) {
  const auto r = run({"roots", "--out", "/nonexistent-dir/x.json"});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("/nonexistent-dir/x.json"), std::string::npos);
}

TEST(ExitCodes, BinaryEndToEnd) {
  const std::string cmd = std::string(CSSBALL_CLI_PATH) + " roots --p 4 2>/dev/null";
  const int status = std::system(cmd.c_str());
  ASSERT_NE(status, -1);
  EXPECT_EQ(WEXITSTATUS(status), 2);
  const std::string ok = std::string(CSSBALL_CLI_PATH) + " roots >/dev/null";
  EXPECT_EQ(WEXITSTATUS(std::system(ok.c_str())), 0);
}

TEST(Sweep, CsvRowsPerCell) {
  setenv("CSSBALL_THREADS", "2", 1);
  const auto r = run({"sweep", "--omega", "0.05,0.2", "--radius", "30"});
  unsetenv("CSSBALL_THREADS");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  EXPECT_EQ(n, 3);
  EXPECT_NE(r.out.find("omega above omega1"), std::string::npos);
}
