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

// Channel-subset search strategies.
//
// All selectors take the evaluator as a plain function so any backend (with
// or without a cache) plugs in. Candidate evaluations within one step may run
// concurrently; the winner is chosen afterwards with a fixed reduction
// (highest accuracy, ties to the smallest channel index / lexicographically
// smallest subset), so results do not depend on completion order.

#ifndef CHANSEL_SELECTORS_H_
#define CHANSEL_SELECTORS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chansel/core_model.h"

namespace chansel {

using EvaluateFn = std::function<EvalResult(const ChannelSubset&)>;

inline constexpr int kExhaustiveGuard = 20;
// 2^30 subsets is far past anything practical; beyond it the enumeration
// counter would need a wider type anyway.
inline constexpr int kExhaustiveHardLimit = 30;

// Evaluates all 2^c - 1 non-empty subsets. Step s-1 of the trace is the best
// subset of size s (ties: lexicographically smallest). Throws
// kTooManyChannels when c > max_channels; evaluator errors propagate.
SelectionTrace exhaustive_search(const EvaluateFn& evaluate, int c,
                                 int max_channels = kExhaustiveGuard,
                                 int jobs = 1);

// Forward selection: grow the kept subset by the single best channel until
// all c channels are in. Evaluates c + (c-1) + ... + 1 candidates. If a
// candidate fails, returns the steps completed so far with `error` set.
SelectionTrace greedy_forward_search(const EvaluateFn& evaluate, int c,
                                     int jobs = 1);

enum class ScoreMode {
  kRawSum,          // v_i = sum_j p_ji w_j
  kOccurrenceMean,  // the same sum divided by max(1, sum_j p_ji)
};

struct WeightedRandomConfig {
  int k = 0;
  double p_include = 0.5;
  std::uint64_t seed = 0;
  std::optional<int> target_size;
  ScoreMode score_mode = ScoreMode::kRawSum;
};

inline constexpr int kTableThreeTargetSize = 14;
inline constexpr int kMaxZeroMaskRedraws = 1000;

void validate(const WeightedRandomConfig& cfg, int c);

// k masks with independent Bernoulli(p_include) bits. All-zero draws are
// redrawn; kDegenerateSampling after kMaxZeroMaskRedraws in a row.
std::vector<SubsetMask> sample_masks(const WeightedRandomConfig& cfg, int c);

// Sums in mask order. Throws kLengthMismatch, kWidthMismatch, or
// kConfigInvalid for weights outside [0, 1].
ScoreVector score_channels(std::span<const SubsetMask> masks,
                           std::span<const double> weights,
                           ScoreMode mode = ScoreMode::kRawSum);

// Channel indices by descending score, ties to the smaller index.
std::vector<ChannelIndex> rank_channels(const ScoreVector& scores);

struct WeightedRandomResult {
  ScoreVector scores;
  std::vector<ChannelIndex> ranking;
  std::vector<SubsetMask> masks;
  // The k sampled evaluations, plus the top-target_size subset when requested.
  SelectionTrace trace;
  std::optional<ChannelSubset> selected;
};

WeightedRandomResult weighted_random_search(const EvaluateFn& evaluate, int c,
                                            const WeightedRandomConfig& cfg,
                                            int jobs = 1);

struct RegionSpec {
  std::vector<std::string> row_prefixes = {"FC", "C", "CP"};
  std::vector<std::string> explicit_names;
};

// Row of a 10-20 label: its leading letters, minus a trailing midline 'z'
// ("FCz" -> "FC", "C3" -> "C", "Cz" -> "C", "POz" -> "PO").
std::string electrode_row(std::string_view label);

// Throws kEmptyRegion, kUnknownName, or kConfigInvalid for an empty spec.
ChannelSubset task_based_subset(const Montage& montage, const RegionSpec& region);

struct CurvePoint {
  int size = 0;
  double accuracy = 0.0;
  ChannelSubset subset;  // first trace subset reaching `accuracy` at `size`
};

// Best accuracy per distinct subset size, sizes ascending.
std::vector<CurvePoint> accuracy_curve(const SelectionTrace& trace);

}  // namespace chansel

#endif  // CHANSEL_SELECTORS_H_
