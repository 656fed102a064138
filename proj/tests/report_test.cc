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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "chansel/eegnet.h"
#include "chansel/error.h"
#include "chansel/evaluator.h"
#include "chansel/report.h"
#include "chansel/selectors.h"
#include "json.hpp"

namespace chansel {
namespace {

using json = nlohmann::json;

// Layer-by-layer count written out independently of the library formula.
std::int64_t layer_sum(const EegnetArch& a) {
  const int bn = a.count_mode == BatchNormCount::kAll ? 4 : 2;
  std::int64_t n = 0;
  n += static_cast<std::int64_t>(a.f1) * a.kern_len;         // temporal
  n += bn * a.f1;                                             // bn 1
  n += static_cast<std::int64_t>(a.channels) * a.f1 * a.depth;  // depthwise
  n += bn * a.f1 * a.depth;                                   // bn 2
  n += static_cast<std::int64_t>(a.sep_kern) * a.f1 * a.depth;  // separable depthwise
  n += static_cast<std::int64_t>(a.f1) * a.depth * a.f2;      // pointwise
  n += bn * a.f2;                                             // bn 3
  int t = a.samples / a.pool1;
  t /= a.pool2;
  n += static_cast<std::int64_t>(a.f2) * t * a.n_classes + a.n_classes;
  return n;
}

TEST(Eegnet, DefaultGeometryCount) {
  EXPECT_EQ(eegnet_param_count(EegnetArch{}), 3700);
  EegnetArch all;
  all.count_mode = BatchNormCount::kAll;
  EXPECT_EQ(eegnet_param_count(all), 3780);
}

TEST(Eegnet, MatchesLayerSumAcrossGeometries) {
  for (int c : {1, 3, 14, 22, 64}) {
    for (int t : {128, 500, 1125}) {
      for (int f1 : {4, 8}) {
        EegnetArch a;
        a.channels = c;
        a.samples = t;
        a.f1 = f1;
        for (auto mode : {BatchNormCount::kTrainableOnly, BatchNormCount::kAll}) {
          a.count_mode = mode;
          EXPECT_EQ(eegnet_param_count(a), layer_sum(a));
        }
      }
    }
  }
}

TEST(Eegnet, SlopeInChannelsIsFiltersTimesDepth) {
  EegnetArch a;
  for (int c = 1; c < 30; ++c) {
    a.channels = c;
    const auto lo = eegnet_param_count(a);
    a.channels = c + 1;
    EXPECT_EQ(eegnet_param_count(a) - lo, a.f1 * a.depth);
  }
  EegnetArch full;
  EegnetArch reduced;
  reduced.channels = 14;
  EXPECT_EQ(eegnet_param_count(full) - eegnet_param_count(reduced), 128);
}

TEST(Eegnet, RejectsImpossibleGeometry) {
  EegnetArch a;
  a.samples = 31;  // pool1 * pool2 = 32
  EXPECT_THROW(validate(a), Error);
  EXPECT_THROW(eegnet_param_count(a), Error);
  a = EegnetArch{};
  a.f2 = 0;
  EXPECT_THROW(validate(a), Error);
}

TEST(Eegnet, ThousandsRoundHalfUp) {
  EXPECT_EQ(format_thousands(2630), "2.63k");
  EXPECT_EQ(format_thousands(2500), "2.50k");
  EXPECT_EQ(format_thousands(128), "0.13k");
  EXPECT_EQ(format_thousands(125), "0.13k");
  EXPECT_EQ(format_thousands(124), "0.12k");
  EXPECT_EQ(format_thousands(3700), "3.70k");
  EXPECT_EQ(format_thousands(0), "0.00k");
  EXPECT_EQ(format_thousands(999995), "1000.00k");
}

RunReport sample_report() {
  OracleSpec spec;
  spec.informative = {0, 2};
  RunReport r;
  r.method = SearchMethod::kGreedy;
  r.config = {{"method", "greedy"}, {"seed", "0"}};
  r.dataset_digest = "abc";
  r.channel_names = {"C3", "Cz", "C4"};
  r.trace = greedy_forward_search([&](const ChannelSubset& s) { return evaluate_oracle(s, spec); }, 3);
  r.curve = accuracy_curve(r.trace);
  r.selected = r.trace.best().subset;
  r.total_evaluations = 6;
  r.backend_calls = 6;
  r.wall_time_ms = 1234;
  return r;
}

TEST(Report, IsStructuredAndConsistent) {
  const RunReport r = sample_report();
  const json j = json::parse(render_report(r, false));
  EXPECT_EQ(j["method"], "greedy");
  EXPECT_EQ(j["dataset_digest"], "abc");
  EXPECT_EQ(j["wall_time_ms"], 1234);
  EXPECT_EQ(j["total_evaluations"], 6);
  EXPECT_EQ(j["selected"]["channels"], json::array({0, 2}));
  EXPECT_EQ(j["selected"]["names"], json::array({"C3", "C4"}));
  const int best = j["trace"]["best_step"];
  EXPECT_EQ(j["trace"]["steps"][best]["channels"], j["selected"]["channels"]);
  EXPECT_EQ(j["trace"]["steps"].size(), 3u);
  EXPECT_EQ(j["config"]["seed"], "0");
}

TEST(Report, MaskingZeroesWallTime) {
  RunReport a = sample_report();
  RunReport b = sample_report();
  b.wall_time_ms = 99;
  EXPECT_NE(render_report(a, false), render_report(b, false));
  EXPECT_EQ(render_report(a, true), render_report(b, true));
  EXPECT_EQ(json::parse(render_report(a, true))["wall_time_ms"], 0);
}

TEST(Report, CurveCsvRowsFollowTheCurve) {
  const RunReport r = sample_report();
  const std::string csv = render_curve_csv(r.curve, r.channel_names);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "size,accuracy,subset");
  for (const auto& p : r.curve) {
    ASSERT_TRUE(std::getline(in, line));
    char acc[16];
    std::snprintf(acc, sizeof(acc), "%.4f", p.accuracy);
    EXPECT_EQ(line, std::to_string(p.size) + "," + acc + "," +
                        subset_names(p.subset, r.channel_names, "+"));
  }
  EXPECT_FALSE(std::getline(in, line));
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  EXPECT_EQ(subset_names(ChannelSubset::canonicalize({2, 0}, 3), r.channel_names, "+"),
            "C3+C4");
}

TEST(Report, AtomicWriteReplacesWholeFile) {
  const auto path = std::filesystem::temp_directory_path() / "chansel-atomic.txt";
  write_file_atomic(path, "first version, longer\n");
  write_file_atomic(path, "second\n");
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  EXPECT_EQ(s.str(), "second\n");
  std::filesystem::remove(path);
  EXPECT_THROW(write_file_atomic("/nonexistent-dir/x/y.txt", "z"), Error);
}

}  // namespace
}  // namespace chansel
