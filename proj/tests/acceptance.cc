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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any check fails.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chansel/core_model.h"
#include "chansel/dataio.h"
#include "chansel/eegnet.h"
#include "chansel/eval_cache.h"
#include "chansel/evaluator.h"
#include "chansel/selectors.h"
#include "cli.h"

namespace {

using namespace chansel;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check,
            double budget_s) {
  const auto t0 = Clock::now();
  Outcome out;
  try {
    out = check();
  } catch (const std::exception& e) {
    out = {false, std::string("threw: ") + e.what()};
  }
  const double took = seconds_since(t0);
  if (budget_s > 0 && took >= budget_s) {
    out.pass = false;
    out.detail += " (over time budget)";
  }
  if (!out.pass) ++failures;
  std::printf("%s %s: %s [%.2fs]\n", out.pass ? "PASS" : "FAIL", name.c_str(),
              out.detail.c_str(), took);
  std::fflush(stdout);
}

std::vector<ChannelIndex> planted_channels() { return {2, 5, 9, 13}; }

TrialSet recovery_dataset(std::uint64_t seed) {
  SynthSpec spec;
  spec.n_trials = 200;
  spec.n_channels = 16;
  spec.n_classes = 2;
  spec.informative_channels = planted_channels();
  spec.separation = 6.0;
  return synth(spec, seed);
}

int count_planted(const ChannelSubset& s) {
  int n = 0;
  for (ChannelIndex i : planted_channels()) n += s.contains(i) ? 1 : 0;
  return n;
}

Outcome score_oracle_equivalence() {
  std::mt19937_64 rng(20260101);
  int mismatches = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const int c = std::uniform_int_distribution<int>(1, 12)(rng);
    const int k = std::uniform_int_distribution<int>(1, 20)(rng);
    std::vector<SubsetMask> masks;
    std::vector<double> weights;
    for (int j = 0; j < k; ++j) {
      std::vector<std::uint8_t> bits(c);
      do {
        for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
      } while (std::count(bits.begin(), bits.end(), 1) == 0);
      masks.emplace_back(bits);
      weights.push_back(std::uniform_real_distribution<double>(0, 1)(rng));
    }
    const ScoreVector got = score_channels(masks, weights, ScoreMode::kRawSum);
    for (int i = 0; i < c; ++i) {
      double v = 0.0;
      for (int j = 0; j < k; ++j) {
        v += static_cast<double>(masks[j].bits()[i]) * weights[j];
      }
      if (std::bit_cast<std::uint64_t>(v) !=
          std::bit_cast<std::uint64_t>(got.scores.at(i))) {
        ++mismatches;
      }
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatching scores over 100 instances"};
}

Outcome exhaustive_greedy_dominance() {
  std::mt19937_64 rng(7);
  int violations = 0, unique = 0, disagreements = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const int c = std::uniform_int_distribution<int>(3, 8)(rng);
    OracleSpec spec;
    for (int i = 0; i < c; ++i) {
      if (rng() % 3 == 0) spec.informative.push_back(i);
    }
    spec.base = std::uniform_real_distribution<double>(0.25, 0.6)(rng);
    spec.gain = std::uniform_real_distribution<double>(0.01, 0.2)(rng);
    spec.penalty = std::uniform_real_distribution<double>(0.0, 0.05)(rng);
    const EvaluateFn eval = [&](const ChannelSubset& s) { return evaluate_oracle(s, spec); };
    const SelectionTrace ex = exhaustive_search(eval, c);
    const SelectionTrace gr = greedy_forward_search(eval, c);
    for (const auto& g : gr.steps) {
      const auto& e = ex.steps.at(g.subset.size() - 1);
      if (e.subset.size() != g.subset.size() || e.accuracy < g.accuracy) ++violations;
    }
    // Brute-force uniqueness of the optimum.
    double best = -1.0;
    int n_best = 0;
    for (std::uint32_t m = 1; m < (1u << c); ++m) {
      std::vector<ChannelIndex> idx;
      for (int i = 0; i < c; ++i) {
        if (m >> i & 1u) idx.push_back(i);
      }
      const double a = evaluate_oracle(ChannelSubset::canonicalize(idx, c), spec).accuracy;
      if (a > best) {
        best = a;
        n_best = 1;
      } else if (a == best) {
        ++n_best;
      }
    }
    if (n_best == 1) {
      ++unique;
      if (ex.best().subset != gr.best().subset) ++disagreements;
    }
  }
  std::ostringstream d;
  d << violations << " dominance violations; " << disagreements << " of " << unique
    << " unique optima disagree";
  return {violations == 0 && disagreements == 0, d.str()};
}

Outcome greedy_recovery() {
  int ok = 0;
  std::ostringstream d;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto trials = std::make_shared<const TrialSet>(recovery_dataset(seed));
    BuiltinEvaluator eval(trials, BuiltinEvalConfig{});
    const SelectionTrace t = greedy_forward_search(
        [&](const ChannelSubset& s) { return eval.evaluate(s, 0); }, trials->n_channels());
    const int hits = count_planted(t.steps.at(3).subset);
    ok += hits >= 3 ? 1 : 0;
    d << (seed > 1 ? "," : "") << hits;
  }
  return {ok >= 4, "planted in step-4 subset per seed: " + d.str() + " (" +
                       std::to_string(ok) + "/5 seeds with >= 3)"};
}

Outcome weighted_random_ranking(ScoreMode mode) {
  int ok = 0;
  std::ostringstream d;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto trials = std::make_shared<const TrialSet>(recovery_dataset(seed));
    BuiltinEvaluator eval(trials, BuiltinEvalConfig{});
    WeightedRandomConfig cfg;
    cfg.k = 200;
    cfg.p_include = 0.5;
    cfg.seed = seed;
    cfg.score_mode = mode;
    const auto r = weighted_random_search(
        [&](const ChannelSubset& s) { return eval.evaluate(s, 0); },
        trials->n_channels(), cfg);
    std::vector<ChannelIndex> top(r.ranking.begin(), r.ranking.begin() + 8);
    const int hits = count_planted(ChannelSubset::canonicalize(top, trials->n_channels()));
    ok += hits == 4 ? 1 : 0;
    d << (seed > 1 ? "," : "") << hits;
  }
  return {ok >= 4, "planted in top 8 per seed: " + d.str() + " (" + std::to_string(ok) +
                       "/5 seeds with all 4)"};
}

Outcome chance_control(int n_classes) {
  SynthSpec spec;
  spec.n_trials = 200;
  spec.n_channels = 16;
  spec.n_classes = n_classes;
  spec.informative_channels = planted_channels();
  spec.separation = 6.0;
  const TrialSet base = synth(spec, 11);
  std::vector<ClassId> labels = base.labels();
  std::mt19937_64 rng(99);
  std::shuffle(labels.begin(), labels.end(), rng);
  auto trials = std::make_shared<const TrialSet>(base.with_labels(labels));
  BuiltinEvaluator eval(trials, BuiltinEvalConfig{});
  double sum = 0.0;
  for (int draw = 0; draw < 20; ++draw) {
    std::vector<ChannelIndex> idx;
    for (int i = 0; i < spec.n_channels; ++i) {
      if (rng() & 1u) idx.push_back(i);
    }
    if (idx.empty()) idx.push_back(static_cast<int>(rng() % spec.n_channels));
    sum += eval.evaluate(ChannelSubset::canonicalize(idx, spec.n_channels), 0).accuracy;
  }
  const double mean = sum / 20.0;
  const double chance = 1.0 / n_classes;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "K=%d mean accuracy %.4f, chance %.4f", n_classes,
                mean, chance);
  return {std::abs(mean - chance) <= 0.15, buf};
}

Outcome parameter_arithmetic() {
  EegnetArch full;
  EegnetArch reduced;
  reduced.channels = 14;
  const std::int64_t a = eegnet_param_count(full);
  const std::int64_t b = eegnet_param_count(reduced);
  // Reference counts 2.63k and 2.50k.
  const double shown_drop = 2.63 - 2.50;
  const double drop_k = std::round(static_cast<double>(a - b) / 10.0) / 100.0;
  std::ostringstream d;
  d << "count(22)-count(14) = " << (a - b) << " = " << format_thousands(a - b)
    << "; reference drop 0.13k";
  return {a - b == 128 && format_thousands(a - b) == "0.13k" &&
              std::abs(drop_k - shown_drop) < 0.005,
          d.str()};
}

class CountingEvaluator : public SubsetEvaluator {
 public:
  explicit CountingEvaluator(OracleSpec spec) : inner_(std::move(spec)) {}
  std::string id() const override { return inner_.id(); }
  EvalResult evaluate(const ChannelSubset& s, std::uint64_t seed) override {
    ++calls;
    return inner_.evaluate(s, seed);
  }
  std::atomic<int> calls{0};

 private:
  OracleEvaluator inner_;
};

Outcome greedy_call_count() {
  OracleSpec spec;
  spec.informative = {1, 4, 6};
  auto backend = std::make_shared<CountingEvaluator>(spec);
  auto cache = std::make_shared<EvalCache>();
  const auto run = [&] {
    CachedEvaluator eval(backend, cache, "oracle-c10");
    greedy_forward_search([&](const ChannelSubset& s) { return eval.evaluate(s, 0); }, 10);
  };
  run();
  const int cold = backend->calls;
  run();
  const int warm = backend->calls - cold;
  return {cold == 55 && warm == 0,
          "cold " + std::to_string(cold) + " backend calls, warm " + std::to_string(warm)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism(const std::filesystem::path& dir) {
  unsetenv("CHANSEL_CACHE_DIR");
  std::ostringstream out, err;
  const std::string data = (dir / "det.ets").string();
  if (cli::run({"chansel", "synth", "--trials", "120", "--channels", "10", "--classes", "2",
                "--informative", "1,4", "--separation", "4", "--seed", "5", "--out", data},
               out, err) != 0) {
    return {false, "synth failed: " + err.str()};
  }
  std::vector<std::string> reports;
  for (const char* jobs : {"1", "8"}) {
    const std::string path = (dir / ("det-" + std::string(jobs) + ".json")).string();
    const int rc = cli::run({"chansel", "select", "--method", "greedy", "--dataset", data,
                             "--jobs", jobs, "--mask-timing", "--out", path},
                            out, err);
    if (rc != 0) return {false, "select failed: " + err.str()};
    reports.push_back(slurp(path) + slurp(std::filesystem::path(path).replace_extension(".curve.csv")));
  }
  return {reports[0] == reports[1] && !reports[0].empty(),
          reports[0] == reports[1] ? "--jobs 1 and --jobs 8 reports are byte-identical"
                                   : "reports differ"};
}

float random_sample(std::mt19937_64& rng) {
  switch (rng() % 6) {
    case 0:
      return -0.0f;
    case 1: {  // subnormal
      const std::uint32_t mant = static_cast<std::uint32_t>(rng() % 0x7fffffu) + 1u;
      return std::bit_cast<float>(mant | static_cast<std::uint32_t>((rng() & 1u) << 31));
    }
    case 2: {  // any finite bit pattern
      std::uint32_t bits;
      do {
        bits = static_cast<std::uint32_t>(rng());
      } while (((bits >> 23) & 0xffu) == 0xffu);
      return std::bit_cast<float>(bits);
    }
    default:
      return std::normal_distribution<float>(0.0f, 10.0f)(rng);
  }
}

Outcome ets_round_trip() {
  std::mt19937_64 rng(4242);
  int failed = 0;
  for (int inst = 0; inst < 1000; ++inst) {
    const int n_ch = 1 + static_cast<int>(rng() % 6);
    const int n_t = 1 + static_cast<int>(rng() % 40);
    const int k = 1 + static_cast<int>(rng() % 4);
    const int n_tr = k + static_cast<int>(rng() % 6);
    std::vector<std::string> names;
    for (int c = 0; c < n_ch; ++c) names.push_back("ch\"" + std::to_string(c) + "\\é");
    const double fs = std::uniform_real_distribution<double>(1.0, 2000.0)(rng);
    std::vector<float> samples(static_cast<std::size_t>(n_tr) * n_ch * n_t);
    for (auto& s : samples) s = random_sample(rng);
    std::vector<ClassId> labels(n_tr);
    for (int t = 0; t < n_tr; ++t) labels[t] = t < k ? t + 1 : 1 + static_cast<int>(rng() % k);
    std::shuffle(labels.begin(), labels.end(), rng);
    const TrialSet trials(Montage(names, fs), n_t, samples, labels, k);
    std::stringstream buf;
    write_ets(trials, buf);
    const TrialSet back = read_ets(buf);
    if (!(back == trials)) ++failed;
  }
  return {failed == 0, std::to_string(failed) + " of 1000 trial sets changed"};
}

}  // namespace

int main() {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("chansel-acceptance-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);

  report("score_channels raw_sum equals brute-force sum", score_oracle_equivalence, 1.0);
  report("exhaustive dominates greedy on oracle instances", exhaustive_greedy_dominance, 5.0);
  report("greedy recovers planted channels", greedy_recovery, 120.0);
  report("weighted-random ranks planted channels in top 8",
         [] { return weighted_random_ranking(ScoreMode::kRawSum); }, 120.0);
  report("permuted labels give chance accuracy (K=2)", [] { return chance_control(2); }, 0);
  report("permuted labels give chance accuracy (K=4)", [] { return chance_control(4); }, 0);
  report("EEGNet parameter drop 22 to 14 channels", parameter_arithmetic, 1.0);
  report("greedy backend calls with cold and warm cache", greedy_call_count, 0);
  report("select report identical across --jobs", [&] { return determinism(dir); }, 0);
  report("ETS write/read is bit-exact", ets_round_trip, 0);

  // Informational only: the occurrence-normalised score on the same data.
  const Outcome info = weighted_random_ranking(ScoreMode::kOccurrenceMean);
  std::printf("INFO weighted-random ranking with occurrence_mean: %s\n", info.detail.c_str());

  std::filesystem::remove_all(dir);
  std::printf("%d check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
