#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cpl/error.hpp"
#include "cpl/scenario.hpp"

namespace cpl {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("cpl_scenario_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioConfig with_dir(std::string text, const fs::path& dir) {
  auto cfg = parse_config(text);
  cfg.output_dir = dir.string();
  return cfg;
}

const char* kQuiet = R"(
[grid]
n = 32
[time]
dt = 0.01
t_end = 1
stride = 20
[initial]
ic = random:4:3
[diagnostics]
snapshots = true
)";

TEST(RunScenario, DiagnosticsOffEmitsTrajectoryOnly) {
  const auto dir = scratch("off");
  const auto m = run_scenario(with_dir(kQuiet, dir));
  ASSERT_TRUE(m.ok) << m.error;
  EXPECT_EQ(m.exit_code, 0);
  std::vector<std::string> paths;
  for (const auto& a : m.artifacts) paths.push_back(a.path);
  EXPECT_EQ(paths, (std::vector<std::string>{"trajectory.csv", "snapshots/000000.bin", "snapshots/000001.bin",
                                             "snapshots/000002.bin", "snapshots/000003.bin", "snapshots/000004.bin",
                                             "snapshots/000005.bin", "summary.txt"}));
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_EQ(slurp(dir / "trajectory.csv").substr(0, 17), "t,tau,sup,mean,l2");
  const auto s = read_snapshot(dir / "snapshots/000005.bin");
  EXPECT_EQ(s.t, 1.0);
  EXPECT_EQ(s.values.size(), 32u);
}

TEST(RunScenario, ManifestVerifiesAndDetectsDeletion) {
  const auto dir = scratch("verify");
  run_scenario(with_dir(kQuiet, dir));
  const auto m = manifest_from_json(slurp(dir / "manifest.json"));
  EXPECT_TRUE(verify_manifest(m, dir).empty());
  fs::remove(dir / "snapshots/000003.bin");
  EXPECT_EQ(verify_manifest(m, dir), std::vector<std::string>{"snapshots/000003.bin"});
}

TEST(RunScenario, RepeatedRunsAreByteIdentical) {
  const auto a = run_scenario(with_dir(kQuiet, scratch("rep_a")));
  const auto b = run_scenario(with_dir(kQuiet, scratch("rep_b")));
  ASSERT_EQ(a.artifacts.size(), b.artifacts.size());
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
    EXPECT_EQ(a.artifacts[i].path, b.artifacts[i].path);
    EXPECT_EQ(a.artifacts[i].sha256, b.artifacts[i].sha256) << a.artifacts[i].path;
  }
  EXPECT_EQ(a.config_hash, b.config_hash);
}

TEST(RunScenario, BlowupIsRecorded) {
  const auto dir = scratch("blowup");
  const auto m = run_scenario(with_dir(R"(
[grid]
n = 32
[time]
dt = 0.0001
t_end = 1
stride = 100
[nonlinearity]
C = 1
[initial]
ic = const:1
amplitude = 3
)", dir));
  EXPECT_FALSE(m.ok);
  EXPECT_EQ(m.exit_code, 3);
  EXPECT_EQ(m.error_kind, "blow-up");
  // u' = u^3 from 3 blows up at 1/18
  EXPECT_NEAR(m.error_time, 1.0 / 18.0, 2e-3);
  EXPECT_EQ(manifest_from_json(slurp(dir / "manifest.json")).error_kind, "blow-up");
}

TEST(RunScenario, AppendixGoldenRun) {
  const auto dir = scratch("appendix");
  const auto m = run_scenario(with_dir(R"(
[scenario]
name = appendix
[grid]
n = 64
[time]
dt = 0.001
t_end = 5
stride = 100
[forcing]
kind = appendix
[nonlinearity]
A = 1
B = 1
B_forcing = 1
[initial]
ic = sin
[diagnostics]
zeros = true
phase = true
spectrum = true
[spectrum]
window = 16
dt = 0.01
[solver]
zero_mean = true
)", dir));
  ASSERT_TRUE(m.ok) << m.error;
  for (const char* p : {"zeros.csv", "phase.csv", "spectrum.csv", "spectrum_dims.csv", "summary.txt"})
    EXPECT_NE(m.find(p), nullptr) << p;

  const auto f = QuasiPeriodicSignal::dyadic();
  const CircleGrid g(64);
  for (int i : {10, 30, 50}) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshots/%06d.bin", i);
    const auto s = read_snapshot(dir / name);
    const double amp = std::exp(f.integral(s.t));
    double err = 0.0;
    for (int j = 0; j < 64; ++j) err = std::max(err, std::abs(s.values[static_cast<std::size_t>(j)] - amp * std::sin(g.node(j) + s.t)));
    EXPECT_LE(err, 1e-6 * amp) << s.t;
  }
  const auto summary = slurp(dir / "summary.txt");
  EXPECT_NE(summary.find("verdict=c(t)~t"), std::string::npos) << summary;
  EXPECT_NE(summary.find("verdict=non-increasing"), std::string::npos);
  EXPECT_NE(summary.find("spectrum dims:"), std::string::npos);
}

TEST(ApplySeed, ReplacesRandomPresetsAndFrameSeed) {
  auto cfg = parse_config("[initial]\nic = random:1:4\n[zeros]\npartner = sin_2\n");
  apply_seed(cfg, 99);
  EXPECT_EQ(cfg.ic, "random:99:4");
  EXPECT_EQ(cfg.zeros.partner, "sin_2");
  EXPECT_EQ(cfg.spectrum.seed, 99u);
  EXPECT_NO_THROW(validate(cfg));
}

TEST(VerifyAppendix, BoundHoldsWithSeriesConstant) {
  const auto r = verify_appendix(20);
  // -2 + sum_j (cos(2^-j pi) - 1), summed to convergence in extended precision
  EXPECT_NEAR(r.constant, -3.394649802125165559, 1e-14);
  EXPECT_NEAR(r.bound, std::exp(-2.0 * std::numbers::pi - 2.0), 0.0);
  ASSERT_EQ(r.entries.size(), 20u);
  for (const auto& e : r.entries) {
    EXPECT_TRUE(e.holds);
    EXPECT_NEAR(e.F, r.constant, 1e-12) << e.n;
  }
  EXPECT_LE(r.max_deviation, 1e-12);
  EXPECT_TRUE(r.holds);
}

TEST(VerifyAppendix, RunningMinimumKeepsFalling) {
  const auto r = verify_appendix(20);
  ASSERT_EQ(r.windows.size(), 14u);
  EXPECT_LT(r.windows[13].min_F, r.windows[6].min_F);
  for (std::size_t i = 1; i < r.windows.size(); ++i) EXPECT_LE(r.windows[i].min_F, r.windows[i - 1].min_F);
  // fine-grid oracle values for the minimum of F over [0, 2^m]
  const double oracle[] = {-3.69, -5.56, -6.82, -8.42, -9.87, -11.39, -12.88, -14.39, -15.88, -17.38, -18.88, -20.38, -21.88};
  for (int m = 2; m <= 14; ++m) EXPECT_NEAR(r.windows[static_cast<std::size_t>(m - 1)].min_F, oracle[m - 2], 0.01) << m;
}

TEST(VerifyAppendix, EdgeCases) {
  const auto r = verify_appendix(0);
  EXPECT_TRUE(r.entries.empty());
  EXPECT_TRUE(r.windows.empty());
  EXPECT_TRUE(r.holds);
  EXPECT_THROW(verify_appendix(31), ValidationError);
  std::ostringstream os;
  write_report(os, verify_appendix(3));
  EXPECT_NE(os.str().find("verdict: bound holds"), std::string::npos);
}

}  // namespace
}  // namespace cpl
