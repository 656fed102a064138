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

#include "cli.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chansel/dataio.h"
#include "json.hpp"

namespace chansel::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Outcome {
  int rc;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "chansel");
  std::ostringstream out, err;
  const int rc = run(args, out, err);
  return {rc, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ::unsetenv("CHANSEL_CACHE_DIR");
    dir_ = fs::temp_directory_path() /
           ("chansel-cli-" + std::string(::testing::UnitTest::GetInstance()
                                             ->current_test_info()
                                             ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override {
    ::unsetenv("CHANSEL_CACHE_DIR");
    fs::remove_all(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // 6 channels, channels 1 and 4 planted.
  std::string planted(double separation = 6.0, const std::string& channels = "6") {
    const std::string p = path("planted.ets");
    const Outcome r = run_cli({"synth", "--trials", "120", "--channels", channels, "--classes",
                           "2", "--informative", "1,4", "--separation",
                           std::to_string(separation), "--seed", "3", "--out", p});
    EXPECT_EQ(r.rc, 0) << r.err;
    return p;
  }

  fs::path dir_;
};

TEST_F(CliTest, EverySubcommandHasHelp) {
  for (const char* sub : {"synth", "convert", "select", "eval", "params"}) {
    const Outcome r = run_cli({sub, "--help"});
    EXPECT_EQ(r.rc, kExitOk) << sub;
    EXPECT_NE(r.out.find("--"), std::string::npos) << sub;
  }
  EXPECT_EQ(run_cli({}).rc, kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).rc, kExitUsage);
  EXPECT_EQ(run_cli({"params", "--channels", "many"}).rc, kExitUsage);
}

TEST_F(CliTest, SynthWritesReadableDeterministicFiles) {
  const Outcome a = run_cli({"synth", "--seed", "4", "--out", path("a.ets")});
  const Outcome b = run_cli({"synth", "--seed", "4", "--out", path("b.ets")});
  ASSERT_EQ(a.rc, 0) << a.err;
  ASSERT_EQ(b.rc, 0);
  EXPECT_EQ(slurp(path("a.ets")), slurp(path("b.ets")));
  const TrialSet t = read_ets_file(path("a.ets"));
  EXPECT_EQ(t.n_channels(), 22);
  EXPECT_EQ(t.n_trials(), 200);
  EXPECT_EQ(a.out, fingerprint(t) + "\n");
}

TEST_F(CliTest, SynthRejectsOneClass) {
  const Outcome r = run_cli({"synth", "--classes", "1", "--out", path("x.ets")});
  EXPECT_EQ(r.rc, kExitUsage);
  EXPECT_FALSE(r.err.empty());
  EXPECT_FALSE(fs::exists(path("x.ets")));
}

TEST_F(CliTest, ConvertMatchesDirectImport) {
  std::ofstream(path("toy.csv")) << "1,0.5,0.25,1,2\n2,-1,3.5,0,0\n";
  const Outcome r = run_cli({"convert", "--csv", path("toy.csv"), "--fs", "100", "--names",
                         "C3,C4", "--out", path("toy.ets")});
  ASSERT_EQ(r.rc, 0) << r.err;
  std::ifstream csv(path("toy.csv"));
  const TrialSet direct = import_csv(csv, 100.0, {"C3", "C4"});
  const TrialSet via = read_ets_file(path("toy.ets"));
  EXPECT_EQ(via, direct);
  EXPECT_EQ(via.n_trials(), 2);
  EXPECT_EQ(r.out, fingerprint(direct) + "\n");
}

TEST_F(CliTest, ConvertNamesTheRaggedRow) {
  std::ofstream(path("bad.csv")) << "1,0.5,0.25\n1,0.5\n";
  const Outcome r = run_cli({"convert", "--csv", path("bad.csv"), "--names", "A", "--out",
                         path("bad.ets")});
  EXPECT_EQ(r.rc, kExitUsage);
  EXPECT_NE(r.err.find("row 2"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("bad.ets")));
  EXPECT_EQ(run_cli({"convert", "--csv", path("missing.csv"), "--names", "A", "--out",
                     path("m.ets")})
                .rc,
            kExitIo);
}

TEST_F(CliTest, GreedyFindsPlantedChannels) {
  const std::string data = planted();
  const Outcome r = run_cli({"select", "--method", "greedy", "--dataset", data, "--out",
                         path("rep.json"), "--jobs", "2"});
  ASSERT_EQ(r.rc, 0) << r.err;
  const json rep = json::parse(slurp(path("rep.json")));
  const auto chosen = rep["selected"]["channels"].get<std::vector<int>>();
  EXPECT_NE(std::find(chosen.begin(), chosen.end(), 1), chosen.end());
  EXPECT_NE(std::find(chosen.begin(), chosen.end(), 4), chosen.end());
  EXPECT_EQ(rep["total_evaluations"], 21);
  EXPECT_EQ(rep["trace"]["steps"].size(), 6u);
  EXPECT_EQ(r.out.rfind("selected: ", 0), 0u);
  // Curve rows mirror the report's curve.
  std::istringstream curve(slurp(path("rep.curve.csv")));
  std::string line;
  std::getline(curve, line);
  EXPECT_EQ(line, "size,accuracy,subset");
  int rows = 0;
  while (std::getline(curve, line)) ++rows;
  EXPECT_EQ(rows, 6);
  EXPECT_EQ(rep["curve"].size(), 6u);
}

TEST_F(CliTest, TaskSelectionNeedsNoEvaluations) {
  const std::string data = planted(6.0, "22");
  const Outcome r = run_cli({"select", "--method", "task", "--dataset", data, "--names", "Cz",
                         "--out", path("task.json")});
  ASSERT_EQ(r.rc, 0) << r.err;
  const json rep = json::parse(slurp(path("task.json")));
  EXPECT_EQ(rep["selected"]["names"], json::array({"Cz"}));
  EXPECT_EQ(rep["total_evaluations"], 0);
  const Outcome e = run_cli({"select", "--method", "task", "--dataset", data, "--names", "Cz",
                         "--evaluate", "--out", path("task2.json")});
  ASSERT_EQ(e.rc, 0) << e.err;
  EXPECT_EQ(json::parse(slurp(path("task2.json")))["total_evaluations"], 1);
  EXPECT_EQ(run_cli({"select", "--method", "task", "--dataset", data, "--prefixes", "XX"}).rc,
            kExitUsage);
}

TEST_F(CliTest, ExhaustiveGuardExitsFive) {
  const std::string data = planted(6.0, "22");
  const Outcome r = run_cli({"select", "--method", "exhaustive", "--dataset", data, "--out",
                         path("ex.json")});
  EXPECT_EQ(r.rc, kExitGuard);
  EXPECT_FALSE(fs::exists(path("ex.json")));
}

TEST_F(CliTest, ExhaustiveAndRandomRunOnOracle) {
  const std::string data = planted();
  const Outcome ex = run_cli({"select", "--method", "exhaustive", "--dataset", data,
                          "--evaluator", "oracle", "--oracle-informative", "1,4", "--out",
                          path("ex.json")});
  ASSERT_EQ(ex.rc, 0) << ex.err;
  const json e = json::parse(slurp(path("ex.json")));
  EXPECT_EQ(e["selected"]["channels"], json::array({1, 4}));
  EXPECT_EQ(e["total_evaluations"], 63);
  const Outcome rnd = run_cli({"select", "--method", "random", "--dataset", data, "--evaluator",
                           "oracle", "--oracle-informative", "1,4", "--k", "200",
                           "--target-size", "2", "--score-mode", "occurrence_mean", "--out", path("rnd.json")});
  ASSERT_EQ(rnd.rc, 0) << rnd.err;
  const json w = json::parse(slurp(path("rnd.json")));
  EXPECT_EQ(w["selected"]["channels"], json::array({1, 4}));
  EXPECT_EQ(w["scores"].size(), 6u);
  EXPECT_EQ(w["ranking"].size(), 6u);
  EXPECT_EQ(run_cli({"select", "--method", "random", "--dataset", data}).rc, kExitUsage);
}

TEST_F(CliTest, EvalPrintsAccuracy) {
  const std::string data = planted(8.0);
  const Outcome r = run_cli({"eval", "--dataset", data, "--channels", "all"});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_GE(std::stod(r.out), 0.95);
  EXPECT_EQ(run_cli({"eval", "--dataset", data, "--channels", "0,9"}).rc, kExitUsage);
  EXPECT_EQ(run_cli({"eval", "--dataset", data, "--channels", "Q7"}).rc, kExitUsage);
  const Outcome named = run_cli({"eval", "--dataset", data, "--channels", "FC3,FC2"});
  const Outcome indexed = run_cli({"eval", "--dataset", data, "--channels", "1,4"});
  EXPECT_EQ(named.out, indexed.out);
}

TEST_F(CliTest, EvalUsesExternalEvaluator) {
  const std::string data = planted();
  const Outcome r = run_cli({"eval", "--dataset", data, "--channels", "0", "--evaluator",
                         "external", "--eval-cmd",
                         std::string(CHANSEL_FAKE_EVALUATOR) + " fixed 0.84"});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(r.out, "0.8400\n");
  const Outcome bad = run_cli({"eval", "--dataset", data, "--channels", "0", "--evaluator",
                           "external", "--eval-cmd",
                           std::string(CHANSEL_FAKE_EVALUATOR) + " range"});
  EXPECT_EQ(bad.rc, kExitEvaluator);
}

TEST_F(CliTest, EvaluatorFailureLeavesNoFiles) {
  const std::string data = planted();
  const Outcome r = run_cli({"select", "--method", "greedy", "--dataset", data, "--evaluator",
                         "external", "--eval-cmd",
                         std::string(CHANSEL_FAKE_EVALUATOR) + " error", "--out",
                         path("fail.json")});
  EXPECT_EQ(r.rc, kExitEvaluator);
  EXPECT_NE(r.err.find("boom"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("fail.json")));
  EXPECT_FALSE(fs::exists(path("fail.curve.csv")));
}

TEST_F(CliTest, DatasetErrorsExitThree) {
  EXPECT_EQ(run_cli({"eval", "--dataset", path("none.ets"), "--channels", "all"}).rc,
            kExitIo);
  std::ofstream(path("junk.ets")) << "JUNKJUNKJUNK";
  EXPECT_EQ(run_cli({"select", "--method", "greedy", "--dataset", path("junk.ets")}).rc,
            kExitIo);
}

TEST_F(CliTest, PersistentCacheSkipsBackendOnRerun) {
  const std::string data = planted();
  ::setenv("CHANSEL_CACHE_DIR", path("cache").c_str(), 1);
  for (const char* name : {"one.json", "two.json"}) {
    const Outcome r = run_cli({"select", "--method", "greedy", "--dataset", data, "--out",
                           path(name)});
    ASSERT_EQ(r.rc, 0) << r.err;
  }
  const json one = json::parse(slurp(path("one.json")));
  const json two = json::parse(slurp(path("two.json")));
  EXPECT_EQ(one["backend_calls"], 21);
  EXPECT_EQ(two["backend_calls"], 0);
  EXPECT_EQ(two["cache_hits"], 21);
  EXPECT_EQ(one["selected"], two["selected"]);
  EXPECT_TRUE(fs::exists(path("cache/evalcache.jsonl")));
}

TEST_F(CliTest, ReportsAreReproducible) {
  const std::string data = planted();
  for (const char* method : {"greedy", "random", "exhaustive"}) {
    std::vector<std::string> outs;
    for (const char* jobs : {"1", "3"}) {
      const std::string p = path(std::string(method) + jobs + ".json");
      const Outcome r = run_cli({"select", "--method", method, "--dataset", data, "--k", "40",
                             "--jobs", jobs, "--mask-timing", "--out", p});
      ASSERT_EQ(r.rc, 0) << r.err;
      outs.push_back(slurp(p));
    }
    EXPECT_EQ(outs[0], outs[1]) << method;
  }
}

TEST_F(CliTest, ParamsPrintsCount) {
  const Outcome full = run_cli({"params"});
  const Outcome reduced = run_cli({"params", "--channels", "14"});
  ASSERT_EQ(full.rc, 0);
  EXPECT_EQ(full.out, "3700 3.70k\n");
  EXPECT_EQ(std::stoll(full.out) - std::stoll(reduced.out), 128);
  EXPECT_EQ(run_cli({"params", "--samples", "16"}).rc, kExitUsage);
  EXPECT_EQ(run_cli({"params", "--count-mode", "all_batchnorm"}).out, "3780 3.78k\n");
}

}  // namespace
}  // namespace chansel::cli
