#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "scenario.hpp"

namespace fs = std::filesystem;

namespace qmod::cli {
namespace {

const fs::path kScenarios = QMOD_SCENARIO_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Second line of a two-line CSV, keyed by the header.
std::map<std::string, std::string> record(const fs::path& csv) {
  std::istringstream in(slurp(csv));
  std::string head, row;
  std::getline(in, head);
  std::getline(in, row);
  std::map<std::string, std::string> out;
  std::istringstream h(head), r(row);
  std::string k, v;
  while (std::getline(h, k, ',') && std::getline(r, v, ',')) out[k] = v;
  return out;
}

std::map<std::string, std::string> manifest(const fs::path& dir) {
  std::istringstream in(slurp(dir / "manifest.txt"));
  std::map<std::string, std::string> out;
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("qmod_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = root_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path root_;
};

TEST_F(CliTest, RingBoundOfConformalIdentity) {
  RunOptions opt;
  opt.out_dir = root_ / "ring";
  const RunResult r = run_scenario(kScenarios / "ring_bound_plane.json", opt);
  ASSERT_EQ(r.code, kExitOk) << r.reason;
  const auto rec = record(root_ / "ring" / "ring_bound.csv");
  EXPECT_NEAR(std::stod(rec.at("ring_integral")), 1.0, 1e-8);
  EXPECT_NEAR(std::stod(rec.at("bound")), 2 * std::numbers::pi, 1e-7);
  EXPECT_TRUE(fs::exists(root_ / "ring" / "radial_profile.csv"));
}

TEST_F(CliTest, MassCheckOfZeroField) {
  RunOptions opt;
  opt.out_dir = root_ / "mass";
  const RunResult r = run_scenario(kScenarios / "mass_check_zero.json", opt);
  ASSERT_EQ(r.code, kExitOk) << r.reason;
  const auto rec = record(root_ / "mass" / "mass_check.csv");
  // integral of (1 + |x|^2)^{-2} over the unit disk is pi/2.
  EXPECT_NEAR(std::stod(rec.at("integral")), std::numbers::pi / 2, 1e-7);
  EXPECT_EQ(rec.at("satisfied"), "true");
}

TEST_F(CliTest, InvalidConfigWritesNothing) {
  RunOptions opt;
  opt.out_dir = root_ / "bad";
  try {
    run_scenario(kScenarios / "invalid_ring.json", opt);
    FAIL() << "expected a validation error";
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.code(), kExitValidation);
  }
  EXPECT_FALSE(fs::exists(root_ / "bad"));
  EXPECT_THROW(validate_scenario(kScenarios / "invalid_ring.json"), ScenarioError);
  EXPECT_NO_THROW(validate_scenario(kScenarios / "ring_bound_plane.json"));
}

TEST_F(CliTest, ValidationCatchesBadInputs) {
  const char* bad[] = {
      R"({"task": "nope", "n": 2})",
      R"({"task": "ring-bound", "n": 1, "field": {"type": "constant", "value": 1}, "ring": {"r1": 1, "r2": 2}})",
      R"({"task": "ring-bound", "n": 2, "p": 1, "field": {"type": "constant", "value": 1}, "ring": {"r1": 1, "r2": 2}})",
      R"({"task": "ring-bound", "n": 2, "field": {"type": "constant", "value": -1}, "ring": {"r1": 1, "r2": 2}})",
      R"({"task": "orlicz-curve", "n": 3, "p": 2.5, "gauge": {"type": "exp"}, "m0": 1, "r0": 1.5})",
      R"({"task": "diameter-certificate", "n": 2, "p": 2, "gauge": {"type": "exp"}, "m0": 1, "r0": 0.5})",
      R"({"task": "ring-bound", "n": 2, "field": {"type": "constant", "value": 1}, "ring": {"r1": 1, "r2": 2}, "tolerances": {"profile": "sloppy"}})",
      "{ not json",
  };
  int k = 0;
  for (const char* text : bad) {
    const fs::path cfg = write_config("bad" + std::to_string(k++) + ".json", text);
    try {
      validate_scenario(cfg);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ScenarioError& e) {
      EXPECT_EQ(e.code(), kExitValidation) << text;
    }
  }
  try {
    validate_scenario(root_ / "missing.json");
    ADD_FAILURE() << "accepted a missing file";
  } catch (const ScenarioError& e) {
    EXPECT_NE(e.code(), kExitOk);
  }
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  for (const char* name : {"orlicz_curve_exp.json", "epsilon_star_exp.json", "capacity_certificate_exp.json"}) {
    RunOptions a, b;
    a.out_dir = root_ / "a";
    b.out_dir = root_ / "b";
    const RunResult ra = run_scenario(kScenarios / name, a);
    const RunResult rb = run_scenario(kScenarios / name, b);
    ASSERT_EQ(ra.code, kExitOk) << name << ": " << ra.reason;
    ASSERT_EQ(ra.files.size(), rb.files.size());
    for (std::size_t i = 0; i < ra.files.size(); ++i) {
      EXPECT_EQ(slurp(ra.files[i]), slurp(rb.files[i])) << ra.files[i];
    }
    fs::remove_all(root_ / "a");
    fs::remove_all(root_ / "b");
  }
}

TEST_F(CliTest, MeasuredMeanBoundSitsBetweenBudgetBoundAndIntegral) {
  RunOptions opt;
  opt.out_dir = root_ / "om";
  ASSERT_EQ(run_scenario(kScenarios / "orlicz_measured_log_power.json", opt).code, kExitOk);
  std::istringstream in(slurp(root_ / "om" / "orlicz_measured.csv"));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> c;
    std::istringstream ls(line);
    for (std::string v; std::getline(ls, v, ',');) c.push_back(v);
    ASSERT_EQ(c.size(), 7u) << line;
    EXPECT_EQ(c[3], "true");
    const double budget = std::stod(c[4]), measured = std::stod(c[5]), integral = std::stod(c[6]);
    EXPECT_LE(budget, measured + 1e-12) << line;
    EXPECT_LE(measured, integral + 1e-9) << line;
    ++rows;
  }
  EXPECT_GT(rows, 20);
}

TEST_F(CliTest, CapacityIndependentOfJobs) {
  const fs::path cfg = write_config("cap.json", R"({
    "task": "capacity-oracle", "n": 2, "p": 2,
    "condenser": {"outer": {"type": "ball", "center": [0, 0], "radius": 2},
                  "inner": {"type": "ball", "center": [0, 0], "radius": 0.5}},
    "resolution": 32
  })");
  RunOptions one, four;
  one.out_dir = root_ / "j1";
  one.jobs = 1;
  four.out_dir = root_ / "j4";
  four.jobs = 4;
  ASSERT_EQ(run_scenario(cfg, one).code, kExitOk);
  ASSERT_EQ(run_scenario(cfg, four).code, kExitOk);
  EXPECT_EQ(slurp(root_ / "j1" / "capacity.csv"), slurp(root_ / "j4" / "capacity.csv"));
  EXPECT_EQ(slurp(root_ / "j1" / "potential.grid"), slurp(root_ / "j4" / "potential.grid"));
  EXPECT_EQ(manifest(root_ / "j4").at("jobs"), "4");
}

TEST_F(CliTest, ManifestRecordsRun) {
  RunOptions opt;
  opt.out_dir = root_ / "m";
  ASSERT_EQ(run_scenario(kScenarios / "ring_bound_plane.json", opt).code, kExitOk);
  const auto m = manifest(root_ / "m");
  EXPECT_EQ(m.at("tool"), "qmod");
  EXPECT_EQ(m.at("task"), "ring-bound");
  EXPECT_EQ(m.at("status"), "ok");
  EXPECT_EQ(m.at("exit_code"), "0");
  EXPECT_EQ(m.at("input.ring.r1"), "1");
  EXPECT_TRUE(m.count("seed"));
  EXPECT_TRUE(m.count("wall_seconds"));
  EXPECT_TRUE(m.count("started_utc"));
  EXPECT_EQ(m.at("tolerance_profile"), "default");
}

TEST_F(CliTest, ToleranceProfileFromEnvironment) {
  ::setenv("QMOD_TOLERANCE_PROFILE", "fast", 1);
  RunOptions opt;
  opt.out_dir = root_ / "fast";
  const RunResult r = run_scenario(kScenarios / "ring_bound_plane.json", opt);
  ::unsetenv("QMOD_TOLERANCE_PROFILE");
  ASSERT_EQ(r.code, kExitOk);
  const auto m = manifest(root_ / "fast");
  EXPECT_EQ(m.at("tolerance_profile"), "fast");
  EXPECT_EQ(m.at("tolerance.volume_rel_tol"), "1e-06");
  EXPECT_THROW(ToleranceProfile::named("sloppy"), std::invalid_argument);
}

TEST(CliFormat, ErrorLine) {
  EXPECT_EQ(format_error(kExitValidation, "bad ring"), "error code=2 kind=validation reason=bad ring");
}

#ifdef QMOD_CLI_PATH
TEST_F(CliTest, BinaryExitCodes) {
  const std::string exe = QMOD_CLI_PATH;
  auto run = [&](const std::string& args) {
    const int status = std::system((exe + " " + args + " > " + (root_ / "log.txt").string() + " 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  EXPECT_EQ(run("validate " + (kScenarios / "ring_bound_plane.json").string()), 0);
  EXPECT_EQ(run("run " + (kScenarios / "invalid_ring.json").string() + " --out " + (root_ / "x").string()), 2);
  EXPECT_NE(slurp(root_ / "log.txt").find("error code=2"), std::string::npos);
  EXPECT_FALSE(fs::exists(root_ / "x"));
  EXPECT_EQ(run("run " + (kScenarios / "ring_bound_plane.json").string() + " --out " + (root_ / "y").string()), 0);
  EXPECT_TRUE(fs::exists(root_ / "y" / "manifest.txt"));
  EXPECT_EQ(run("frobnicate"), 2);
}
#endif

}  // namespace
}  // namespace qmod::cli
