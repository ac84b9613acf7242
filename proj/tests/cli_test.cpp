// Copyright 2026 The BBM92 Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bbm92/cli.hpp"
#include "oracles.hpp"

namespace bbm92::cli {
namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

Table table_of(const Result& r) { return parse_csv(r.out); }

std::filesystem::path temp_dir() {
  const auto p = std::filesystem::temp_directory_path() / "bbm92_cli_test";
  std::filesystem::create_directories(p);
  return p;
}

TEST(GridSpec, ParsesInclusiveEndpoints) {
  const auto v = GridSpec::parse("0:0.25:6").values();
  ASSERT_EQ(v.size(), 6u);
  EXPECT_EQ(v.front(), 0.0);
  EXPECT_EQ(v.back(), 0.25);
  EXPECT_NEAR(v[1], 0.05, 1e-16);
  EXPECT_EQ(GridSpec::parse("0.1:0.1:1").values(), std::vector<double>{0.1});
  for (const char* bad : {"0:1", "0:1:0", "a:1:3", "0:1:2:3", "0:1:1", "0:1:3x"}) {
    EXPECT_THROW(GridSpec::parse(bad), InvalidArgument) << bad;
  }
}

TEST(Tau, ScalarZeroRow) {
  const auto r = call({"tau", "--delta", "0", "--eps", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "delta,eps,tau_closed,tau_numeric,tau_low,region\n0,0,0,0,0,a\n");
}

TEST(Tau, GridAtZeroErrorIsThreeDelta) {
  const auto r = call({"tau", "--delta-grid", "0:0.25:50", "--eps", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = table_of(r);
  ASSERT_EQ(t.rows.size(), 50u);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_NEAR(t.number(i, "tau_closed"), 3.0 * t.number(i, "delta"), 1e-11);
    EXPECT_NEAR(t.number(i, "tau_numeric"), 3.0 * t.number(i, "delta"), 1e-9);
    EXPECT_EQ(t.text(i, "region"), "a");
  }
}

TEST(Tau, ClosedMatchesNumericAndBruteForce) {
  const auto r = call({"tau", "--delta", "0.05", "--eps", "0.02"});
  ASSERT_EQ(r.code, 0);
  const Table t = table_of(r);
  EXPECT_NEAR(t.number(0, "tau_closed"), t.number(0, "tau_numeric"), 1e-5);
  EXPECT_NEAR(t.number(0, "tau_closed"), oracle::tau_brute(0.05, 0.02), 1e-6);
}

TEST(Tau, InfeasibleAndInvalidInputs) {
  EXPECT_EQ(call({"tau", "--delta", "0.3", "--eps", "0"}).code, kInfeasible);
  EXPECT_EQ(call({"tau", "--delta", "-0.1", "--eps", "0"}).code, kInvalidArgument);
  EXPECT_EQ(call({"tau", "--delta", "0.1", "--delta-grid", "0:0.1:2"}).code, kInvalidArgument);
  EXPECT_EQ(call({"tau", "--na", "1"}).code, kInvalidArgument);
  EXPECT_EQ(call({"tau", "--bogus", "1"}).code, kInvalidArgument);
  EXPECT_EQ(call({"frobnicate"}).code, kInvalidArgument);
  EXPECT_EQ(call({}).code, kInvalidArgument);
  EXPECT_EQ(call({"tau", "--format", "xml"}).code, kInvalidArgument);
  // Grid points outside the domain are reported, not fatal.
  const auto g = call({"tau", "--delta-grid", "0.2:0.3:3", "--eps", "0"});
  ASSERT_EQ(g.code, 0);
  EXPECT_EQ(table_of(g).text(2, "region"), "infeasible");
}

TEST(Keyrate, AnchorsAndMarkers) {
  const auto r = call({"keyrate", "--delta-grid", "0:0.25:26", "--eps-grid", "0:0.05:6"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = table_of(r);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(t.text(i, "conjectured_marker"), "CONJECTURED");
    const double d = t.number(i, "delta"), e = t.number(i, "eps");
    if (e == 0.0) EXPECT_NEAR(t.number(i, "r_key"), 1.0 - 4.0 * d, 1e-11);
    if (t.text(i, "region") != "infeasible" && !std::isnan(t.number(i, "r_upper"))) {
      EXPECT_GE(t.number(i, "r_upper"), t.number(i, "r_key") - 1e-9);
    }
  }
  const Table zero = table_of(call({"keyrate", "--delta", "0", "--eps", "0"}));
  EXPECT_EQ(zero.number(0, "r_key"), 1.0);
  EXPECT_EQ(zero.number(0, "r_upper"), 1.0);
  EXPECT_EQ(zero.number(0, "r_conjectured"), 1.0);
  EXPECT_EQ(call({"keyrate", "--delta", "0", "--eps", "0", "--f", "0.5"}).code, kInvalidArgument);
}

TEST(Tradeoff, Summaries) {
  const auto r12 = call({"tradeoff", "--na", "1", "--nb", "2"});
  ASSERT_EQ(r12.code, 0) << r12.err;
  const auto pos = r12.err.find("# max_abs_eps_minus_g: ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LE(std::stod(r12.err.substr(pos + 23)), 1e-5);

  const auto r13 = call({"tradeoff", "--na", "1", "--nb", "3"});
  ASSERT_EQ(r13.code, 0);
  EXPECT_NE(r13.err.find("# min_delta_m: 0.25\n"), std::string::npos);
  EXPECT_NEAR(table_of(r13).number(0, "min_delta_m"), 0.25, 1e-12);

  const auto r22 = call({"tradeoff", "--na", "2", "--nb", "2"});
  ASSERT_EQ(r22.code, 0);
  EXPECT_NE(r22.err.find("# points_below_g: 0\n"), std::string::npos);
  EXPECT_NE(r22.err.find("# random_states_outside_region: 0\n"), std::string::npos);

  EXPECT_EQ(call({"tradeoff", "--na", "0", "--nb", "2"}).code, kInvalidArgument);
}

TEST(Attack, PointsAndSweep) {
  for (auto [a, b] : {std::pair{"1", "0"}, std::pair{"0", "1"}}) {
    const auto r = call({"attack", "--alpha", a, "--beta", b});
    ASSERT_EQ(r.code, 0);
    const Table t = table_of(r);
    EXPECT_NEAR(t.number(0, "eve_accuracy"), 1.0, 1e-12);
    EXPECT_LE(t.number(0, "deviation"), 1e-12);
  }
  EXPECT_EQ(call({"attack", "--alpha", "0", "--beta", "0"}).code, kInvalidArgument);
  const auto s = call({"attack", "--sweep", "360"});
  ASSERT_EQ(s.code, 0);
  EXPECT_NE(s.err.find("# coverage_min_delta_m: 0\n"), std::string::npos);
  EXPECT_NE(s.err.find("# min_eve_accuracy: 1\n"), std::string::npos);
}

TEST(Simulate, SourcesAndSeedEcho) {
  const auto r = call({"simulate", "--source", "ideal", "--events", "20000", "--seed", "77"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = table_of(r);
  EXPECT_EQ(t.number(0, "seed"), 77.0);
  EXPECT_EQ(t.number(0, "delta_hat"), 0.0);
  EXPECT_EQ(t.number(0, "eps_hat"), 0.0);
  EXPECT_EQ(t.number(0, "r_key_sampled"), 1.0);
  EXPECT_EQ(t.text(0, "conjectured_marker"), "CONJECTURED");

  const Table w = table_of(call({"simulate", "--source", "werner:0.9", "--events", "200000"}));
  EXPECT_NEAR(w.number(0, "eps_hat"), 0.05, 5 * w.number(0, "se_eps"));

  const Table a = table_of(call({"simulate", "--source", "attack:1,0,0.3", "--events", "200000"}));
  EXPECT_NEAR(a.number(0, "delta_hat"), 0.05, 5 * a.number(0, "se_delta"));
  EXPECT_NEAR(a.number(0, "eps_hat"), 0.025, 5 * a.number(0, "se_eps"));

  for (const char* bad : {"werner", "werner:x", "attack:1,0", "ideal:3", "laser", "custom:/nonexistent.json"}) {
    EXPECT_EQ(call({"simulate", "--source", bad, "--events", "10"}).code, kInvalidArgument) << bad;
  }
}

TEST(Simulate, CustomSourceFile) {
  const auto path = temp_dir() / "source.json";
  std::ofstream(path) << R"({"vacuum_weight": 0.5, "components": [
      {"weight": 0.5, "n_a": 1, "n_b": 1, "state": [1, 0, 0, 1]}]})";
  const auto r = call({"simulate", "--source", "custom:" + path.string(), "--events", "50000"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(table_of(r).number(0, "eps_hat"), 0.0);
  std::ofstream(path) << R"({"components": [{"weight": 1.0, "n_a": 1, "n_b": 1,
      "density": [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1]]}]})";
  EXPECT_EQ(call({"simulate", "--source", "custom:" + path.string()}).code, kInvalidArgument);
  std::ofstream(path) << "{not json";
  EXPECT_EQ(call({"simulate", "--source", "custom:" + path.string()}).code, kInvalidArgument);
}

TEST(Output, JsonMetaCarriesFlags) {
  const auto r = call({"tau", "--delta", "0.05", "--eps", "0.02", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["meta"]["command"], "tau");
  EXPECT_EQ(j["meta"]["version"], BBM92_VERSION);
  EXPECT_EQ(j["meta"]["flags"]["delta"], 0.05);
  EXPECT_TRUE(j["meta"]["flags"].contains("resolution"));
  EXPECT_EQ(j["rows"][0]["region"], "a");
  EXPECT_TRUE(r.err.empty());
}

TEST(Output, Deterministic) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"simulate", "--source", "attack:0.6,0.8,0.2", "--events", "100000",
                                 "--seed", "5", "--format", "json"},
        std::vector<std::string>{"tradeoff", "--na", "2", "--nb", "3"},
        std::vector<std::string>{"keyrate", "--eps-grid", "0:0.1:3"}}) {
    const auto a = call(args), b = call(args);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.err, b.err);
  }
}

TEST(Output, ConfigFileAndOverrides) {
  const auto cfg = temp_dir() / "run.cfg";
  std::ofstream(cfg) << "# experiment\ndelta = 0.1\neps = 0.05\nformat = \"csv\"\n";
  const auto r = call({"tau", "--config", cfg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(table_of(r).number(0, "delta"), 0.1);
  const auto o = call({"tau", "--config", cfg.string(), "--delta", "0.02"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(table_of(o).number(0, "delta"), 0.02);
  EXPECT_EQ(table_of(o).number(0, "eps"), 0.05);
  std::ofstream(cfg) << "nb = 2\n";
  EXPECT_EQ(call({"tau", "--config", cfg.string()}).code, kInvalidArgument);
  std::ofstream(cfg) << "delta 0.1\n";
  EXPECT_EQ(call({"tau", "--config", cfg.string()}).code, kInvalidArgument);
  EXPECT_EQ(call({"tau", "--config", "/nonexistent.cfg"}).code, kInvalidArgument);
}

TEST(Output, OutFileHonoursOutputDirectory) {
  const auto dir = temp_dir() / "outdir";
  std::filesystem::create_directories(dir);
  ::setenv("BBM92_OUTPUT_DIR", dir.c_str(), 1);
  const auto r = call({"tau", "--delta", "0", "--eps", "0", "--out", "tau.csv"});
  ::unsetenv("BBM92_OUTPUT_DIR");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(dir / "tau.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "delta,eps,tau_closed,tau_numeric,tau_low,region\n0,0,0,0,0,a\n");
}

TEST(Selftest, AllChecksPass) {
  const auto r = call({"selftest"});
  ASSERT_EQ(r.code, 0) << r.out;
  const Table t = table_of(r);
  EXPECT_GE(t.rows.size(), 10u);
  for (std::size_t i = 0; i < t.rows.size(); ++i) EXPECT_EQ(t.text(i, "status"), "PASS");
}

int exit_code_of(const std::string& args) {
  const std::string cmd = std::string(BBM92_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Executable, ExitCodes) {
  EXPECT_EQ(exit_code_of("tau --delta 0 --eps 0"), 0);
  EXPECT_EQ(exit_code_of("tau --delta 0.3 --eps 0"), 3);
  EXPECT_EQ(exit_code_of("tau --delta abc"), 2);
  EXPECT_EQ(exit_code_of("--help"), 0);
  EXPECT_EQ(exit_code_of("--version"), 0);
}

}  // namespace
}  // namespace bbm92::cli
