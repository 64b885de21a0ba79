// Copyright 2026 The Authors.
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

#include "cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace groupinf::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "groupinf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) {
  const char* dir = std::getenv("GROUPINF_FIXTURES");
  return std::string(dir ? dir : "configs") + "/" + name;
}

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("groupinf_cli_" + name);
  std::ofstream(path) << text;
  return path.string();
}

TEST(Cli, NfeText) {
  const Result r = run({"nfe", "--m", "64", "--k", "4", "--rho", "0.5", "--steps", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("sizes=64,32,16,8,4,"), std::string::npos);
  EXPECT_NE(r.out.find("t_star=4\n"), std::string::npos);
  EXPECT_NE(r.out.find("nfe=184\n"), std::string::npos);
  EXPECT_NE(r.out.find("naive=1280\n"), std::string::npos);
  EXPECT_NE(r.out.find("savings=0.85625\n"), std::string::npos);
}

TEST(Cli, NfeJson) {
  const Result r =
      run({"nfe", "--m", "16", "--k", "4", "--rho", "1", "--steps", "3", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["nfe"], 48);
  EXPECT_TRUE(j["t_star"].is_null());
}

TEST(Cli, SolveFixture) {
  const Result r = run({"solve", fixture("three_candidates.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["indices"], Json::array({0, 1}));
  EXPECT_EQ(j["objective"], 8.0);
  const Result g = run({"solve", fixture("three_candidates.json"), "--lambda", "0",
                        "--strategy", "greedy"});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_EQ(Json::parse(g.out)["indices"], Json::array({0, 2}));
}

TEST(Cli, InferIsReproducible) {
  const Result a = run({"infer", fixture("default_run.json")});
  const Result b = run({"infer", fixture("default_run.json"), "--workers", "3"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const Json j = Json::parse(a.out);
  EXPECT_EQ(j["nfe_counted"], 184);
  EXPECT_EQ(j["final_indices"].size(), 4u);
}

TEST(Cli, InferWritesFiles) {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string out = (dir / "groupinf_cli_report.json").string();
  const std::string csv = (dir / "groupinf_cli_steps.csv").string();
  const Result r = run({"infer", fixture("default_run.json"), "--out", out, "--steps-csv", csv});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(csv);
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "step,pool_size,solved,strategy,selected");
}

TEST(Cli, SweepEmitsCsv) {
  const std::string spec = temp_file(
      "sweep.json",
      R"({"schema_version": 1, "base": {"m": 8, "k": 2, "steps": 3}, "axis": "m",
          "values": [2, 8], "seeds": [0, 1], "bootstrap_resamples": 50})");
  const Result r = run({"sweep", spec});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_sweep_csv(r.out).rows.size(), 4u);
}

TEST(Cli, Correlate) {
  const std::string cfg = temp_file(
      "corr.json", R"({"schema_version": 1, "m": 16, "k": 2, "rho": 1, "steps": 4})");
  const Result r = run({"correlate", cfg, "--pairs", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("step,t,unary_spearman,binary_spearman\n", 0), 0u);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"nfe", "--m", "2", "--k", "4", "--rho", "0.5", "--steps", "3"}).code, 1);
  EXPECT_EQ(run({"solve", "/nonexistent/scores.json"}).code, 1);
  const std::string bad = temp_file("bad.json", R"({"schema_version": 1, "m": 8, "mu": 3})");
  const Result r = run({"infer", bad});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("unknown key 'mu'"), std::string::npos) << r.err;
  EXPECT_EQ(run({"solve", fixture("three_candidates.json"), "--strategy", "anneal"}).code, 1);
  // Unwritable output is a runtime failure, not a usage error.
  EXPECT_EQ(run({"nfe", "--m", "8", "--k", "4", "--rho", "0.5", "--steps", "3", "--out",
                 "/nonexistent/dir/out.txt"})
                .code,
            2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

}  // namespace
}  // namespace groupinf::cli
