// Copyright 2026 The ABLQ Accounting Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ablq/cli.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "gtest/gtest.h"

namespace ablq {
namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult RunTool(std::vector<std::string> args) {
  args.insert(args.begin(), "ablq");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code =
      RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() /
          ("ablq_cli_test_" + std::to_string(::getpid()) + "_" + name))
      .string();
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(CliTest, DeltaDeterministic) {
  const CliResult r = RunTool({"delta", "--sampler", "deterministic", "--n",
                           "1024", "--b", "1024", "--steps", "1", "--sigma",
                           "1", "--epsilon", "0"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "delta=3.82924923e-01 bound=exact\n");
}

TEST(CliTest, DeltaPoissonCarriesBreakdown) {
  const CliResult r =
      RunTool({"delta", "--sampler", "poisson", "--n", "1000", "--b", "100",
           "--max-batch-size", "100", "--steps", "10", "--sigma", "1",
           "--epsilon", "1"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("bound=upper"), std::string::npos);
  EXPECT_NE(r.out.find("psi="), std::string::npos);
}

TEST(CliTest, ChooseMaxBatchVacuousBudget) {
  const CliResult r =
      RunTool({"choose-max-batch", "--n", "1000", "--b", "100", "--steps", "1",
           "--epsilon", "0", "--delta", "1", "--budget-fraction", "1"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, 6), "B=100 ");
}

TEST(CliTest, CalibrateAndEpsilon) {
  const CliResult sigma =
      RunTool({"calibrate-sigma", "--sampler", "deterministic", "--n", "10",
           "--b", "10", "--steps", "1", "--epsilon", "5.5959175171199916"});
  EXPECT_EQ(sigma.code, 0) << sigma.err;
  EXPECT_EQ(sigma.out.substr(0, 12), "sigma=1.0000");
  const CliResult eps = RunTool({"epsilon", "--sampler", "deterministic", "--n",
                             "10", "--b", "10", "--steps", "1", "--sigma",
                             "1"});
  EXPECT_EQ(eps.code, 0) << eps.err;
  EXPECT_EQ(eps.out.substr(0, 12), "epsilon=5.59");
  const CliResult lower =
      RunTool({"calibrate-sigma", "--sampler", "shuffle-persistent", "--n", "64",
           "--b", "4", "--steps", "16", "--epsilon", "1", "--delta", "1e-5"});
  EXPECT_EQ(lower.code, 0) << lower.err;
  EXPECT_NE(lower.out.find("bound=lower optimistic=true"), std::string::npos);
}

TEST(CliTest, FlagErrorsExitTwo) {
  EXPECT_EQ(RunTool({"delta", "--n", "5"}).code, 2);
  EXPECT_EQ(RunTool({"frobnicate"}).code, 2);
  EXPECT_EQ(RunTool({}).code, 2);
  const CliResult bad_sampler =
      RunTool({"delta", "--sampler", "nope", "--n", "4", "--b", "2", "--steps",
           "2", "--sigma", "1", "--epsilon", "1"});
  EXPECT_EQ(bad_sampler.code, 2);
  EXPECT_NE(bad_sampler.err.find("error: ParseError"), std::string::npos);
  const CliResult invalid =
      RunTool({"delta", "--sampler", "shuffle-dynamic", "--n", "10", "--b", "3",
           "--steps", "6", "--sigma", "1", "--epsilon", "1"});
  EXPECT_EQ(invalid.code, 2);
  EXPECT_NE(invalid.err.find("error: InvalidConfig"), std::string::npos);
}

TEST(CliTest, NumericalFailureExitsOne) {
  const CliResult r =
      RunTool({"calibrate-sigma", "--sampler", "deterministic", "--n", "10",
           "--b", "10", "--steps", "1", "--epsilon", "600000"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error: BracketFailure"), std::string::npos);
}

TEST(CliTest, HelpAndVersion) {
  EXPECT_EQ(RunTool({"--help"}).code, 0);
  const CliResult v = RunTool({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("0.1.0"), std::string::npos);
}

TEST(CliTest, SweepIsByteDeterministic) {
  const std::vector<std::string> args = {
      "sweep", "--axis", "epsilon", "--values", "1,2", "--n", "1024",
      "--b", "64", "--delta", "1e-6", "--samplers",
      "deterministic,poisson,shuffle-dynamic"};
  const CliResult a = RunTool(args);
  std::vector<std::string> threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  const CliResult b = RunTool(threaded);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("# ablq-accounting 0.1.0\n", 0), 0u);
  int rows = 0;
  for (char c : a.out) rows += c == '\n';
  EXPECT_EQ(rows, 2 + 6);
}

TEST(CliTest, SweepWritesFilesAndHonoursGridOverride) {
  const std::string csv = TempPath("sweep.csv");
  const std::string json = TempPath("sweep.json");
  ::setenv("ABLQ_GRID_STEP", "0.002", 1);
  const CliResult r =
      RunTool({"sweep", "--axis", "batch-size", "--values", "64", "--n", "1024",
           "--samplers", "poisson", "--out", csv, "--json", json});
  ::unsetenv("ABLQ_GRID_STEP");
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string text = ReadFile(csv);
  EXPECT_NE(text.find(",2.00000000e-03\n"), std::string::npos) << text;
  EXPECT_NE(ReadFile(json).find("\"points\""), std::string::npos);
  std::filesystem::remove(csv);
  std::filesystem::remove(json);
  ::setenv("ABLQ_GRID_STEP", "abc", 1);
  EXPECT_EQ(RunTool({"sweep", "--axis", "epsilon", "--values", "1"}).code, 2);
  ::unsetenv("ABLQ_GRID_STEP");
}

TEST(CliTest, SampleThenSimulate) {
  const std::string manifest = TempPath("manifest.txt");
  const std::string report = TempPath("report.json");
  const CliResult s =
      RunTool({"sample", "--kind", "poisson", "--n", "200", "--b", "20",
           "--max-batch-size", "25", "--steps", "30", "--seed", "9",
           "--shards", "4", "--out", manifest});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(ReadFile(manifest).substr(0, 48),
            "tps v1 n=200 b=20 B=25 T=30 seed=9 kind=poisson\n");
  const CliResult sim = RunTool({"simulate", "--manifest", manifest, "--sigma",
                             "0.5", "--report", report});
  ASSERT_EQ(sim.code, 0) << sim.err;
  EXPECT_NE(sim.out.find("final_accuracy="), std::string::npos);
  EXPECT_NE(ReadFile(report).find("\"loss\""), std::string::npos);

  const CliResult perm =
      RunTool({"sample", "--kind", "shuffle-dynamic", "--n", "20", "--b", "5",
           "--steps", "8", "--out", manifest});
  ASSERT_EQ(perm.code, 0) << perm.err;
  EXPECT_EQ(RunTool({"sample", "--kind", "poisson", "--n", "20", "--b", "5",
                 "--steps", "8", "--out", manifest})
                .code,
            2);
  std::filesystem::remove(manifest);
  std::filesystem::remove(report);
  EXPECT_EQ(RunTool({"simulate", "--manifest", manifest}).code, 2);
}

}  // namespace
}  // namespace ablq
