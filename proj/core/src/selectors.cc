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

#include "chansel/selectors.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "chansel/error.h"
#include "chansel/parallel.h"

namespace chansel {
namespace {

using Mask = std::uint64_t;

ChannelSubset subset_from_bits(Mask bits, int c) {
  std::vector<ChannelIndex> members;
  for (int i = 0; i < c; ++i) {
    if (bits & (Mask{1} << i)) members.push_back(i);
  }
  return ChannelSubset::canonicalize(members, c);
}

// Lexicographic order of the sorted index lists encoded by two masks.
bool lex_less(Mask a, Mask b) {
  if (a == b) return false;
  const int j = std::countr_zero(a ^ b);
  const Mask above = j + 1 < 64 ? ~((Mask{1} << (j + 1)) - 1) : 0;
  if (a & (Mask{1} << j)) {
    // a continues with j, b with something larger or nothing.
    return (b & above) != 0;
  }
  return (a & above) == 0;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

SelectionTrace exhaustive_search(const EvaluateFn& evaluate, int c,
                                 int max_channels, int jobs) {
  if (c < 1) throw Error(ErrorCode::kConfigInvalid, "need at least one channel");
  if (c > max_channels || c > kExhaustiveHardLimit) {
    throw Error(ErrorCode::kTooManyChannels,
                std::to_string(c) + " channels exceeds the exhaustive-search "
                "guard of " + std::to_string(std::min(max_channels, kExhaustiveHardLimit)));
  }
  const Mask total = (Mask{1} << c) - 1;
  std::vector<double> accuracy(total);
  parallel_for(static_cast<int>(total), jobs, [&](int i) {
    accuracy[i] = evaluate(subset_from_bits(static_cast<Mask>(i) + 1, c)).accuracy;
  });

  std::vector<Mask> best(c + 1, 0);
  for (Mask m = 1; m <= total; ++m) {
    const int s = std::popcount(m);
    const Mask cur = best[s];
    if (cur == 0 || accuracy[m - 1] > accuracy[cur - 1] ||
        (accuracy[m - 1] == accuracy[cur - 1] && lex_less(m, cur))) {
      best[s] = m;
    }
  }

  SelectionTrace trace;
  trace.method = SearchMethod::kExhaustive;
  for (int s = 1; s <= c; ++s) {
    trace.steps.push_back({subset_from_bits(best[s], c), accuracy[best[s] - 1],
                           static_cast<int>(binomial(c, s))});
  }
  trace.update_best_step();
  return trace;
}

SelectionTrace greedy_forward_search(const EvaluateFn& evaluate, int c,
                                     int jobs) {
  if (c < 1) throw Error(ErrorCode::kConfigInvalid, "need at least one channel");
  SelectionTrace trace;
  trace.method = SearchMethod::kGreedy;
  std::optional<ChannelSubset> kept;

  for (int step = 0; step < c; ++step) {
    std::vector<ChannelIndex> candidates;
    for (ChannelIndex i = 0; i < c; ++i) {
      if (!kept || !kept->contains(i)) candidates.push_back(i);
    }
    const int n = static_cast<int>(candidates.size());
    std::vector<double> accuracy(n);
    const auto extend = [&](ChannelIndex i) {
      return kept ? kept->with(i) : ChannelSubset::canonicalize({i}, c);
    };
    try {
      parallel_for(n, jobs, [&](int j) {
        accuracy[j] = evaluate(extend(candidates[j])).accuracy;
      });
    } catch (const std::exception& e) {
      trace.error = "step " + std::to_string(step + 1) + ": " + e.what();
      break;
    }
    // Candidates are in ascending channel order: first maximum wins ties.
    int best = 0;
    for (int j = 1; j < n; ++j) {
      if (accuracy[j] > accuracy[best]) best = j;
    }
    kept = extend(candidates[best]);
    trace.steps.push_back({*kept, accuracy[best], n});
  }
  trace.update_best_step();
  return trace;
}

void validate(const WeightedRandomConfig& cfg, int c) {
  if (cfg.k < 1) throw Error(ErrorCode::kConfigInvalid, "k must be >= 1");
  if (!(cfg.p_include > 0.0 && cfg.p_include < 1.0)) {
    throw Error(ErrorCode::kConfigInvalid, "p_include must lie in (0, 1)");
  }
  if (c < 1) throw Error(ErrorCode::kConfigInvalid, "need at least one channel");
  if (cfg.target_size && (*cfg.target_size < 1 || *cfg.target_size > c)) {
    throw Error(ErrorCode::kConfigInvalid,
                "target size " + std::to_string(*cfg.target_size) +
                    " outside [1, " + std::to_string(c) + "]");
  }
}

std::vector<SubsetMask> sample_masks(const WeightedRandomConfig& cfg, int c) {
  validate(cfg, c);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SubsetMask> masks;
  masks.reserve(cfg.k);
  std::vector<std::uint8_t> bits(c);
  for (int j = 0; j < cfg.k; ++j) {
    int zero_draws = 0;
    while (true) {
      bool any = false;
      for (int i = 0; i < c; ++i) {
        bits[i] = unit(rng) < cfg.p_include ? 1 : 0;
        any = any || bits[i];
      }
      if (any) break;
      if (++zero_draws >= kMaxZeroMaskRedraws) {
        throw Error(ErrorCode::kDegenerateSampling,
                    std::to_string(zero_draws) + " consecutive empty subsets");
      }
    }
    masks.emplace_back(bits);
  }
  return masks;
}

ScoreVector score_channels(std::span<const SubsetMask> masks,
                           std::span<const double> weights, ScoreMode mode) {
  if (masks.empty() || masks.size() != weights.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(masks.size()) + " masks vs " +
                    std::to_string(weights.size()) + " weights");
  }
  const int c = masks.front().width();
  for (const auto& m : masks) {
    if (m.width() != c) {
      throw Error(ErrorCode::kWidthMismatch,
                  "mask widths " + std::to_string(c) + " and " +
                      std::to_string(m.width()));
    }
  }
  for (double w : weights) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw Error(ErrorCode::kConfigInvalid, "weight outside [0, 1]");
    }
  }
  ScoreVector out;
  out.k_subsets = static_cast<int>(masks.size());
  out.scores.assign(c, 0.0);
  std::vector<int> occurrences(c, 0);
  for (std::size_t j = 0; j < masks.size(); ++j) {
    for (int i = 0; i < c; ++i) {
      if (masks[j].test(i)) {
        out.scores[i] += weights[j];
        ++occurrences[i];
      }
    }
  }
  if (mode == ScoreMode::kOccurrenceMean) {
    for (int i = 0; i < c; ++i) out.scores[i] /= std::max(1, occurrences[i]);
  }
  return out;
}

std::vector<ChannelIndex> rank_channels(const ScoreVector& scores) {
  std::vector<ChannelIndex> order(scores.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](ChannelIndex a, ChannelIndex b) {
    return scores.scores[a] > scores.scores[b];
  });
  return order;
}

WeightedRandomResult weighted_random_search(const EvaluateFn& evaluate, int c,
                                            const WeightedRandomConfig& cfg,
                                            int jobs) {
  WeightedRandomResult out;
  out.masks = sample_masks(cfg, c);
  const int k = static_cast<int>(out.masks.size());

  std::vector<std::optional<TraceStep>> steps(k);
  parallel_for(k, jobs, [&](int j) {
    ChannelSubset subset = subset_of(out.masks[j]);
    const double acc = evaluate(subset).accuracy;
    steps[j] = TraceStep{std::move(subset), acc, 1};
  });

  std::vector<double> weights;
  weights.reserve(k);
  out.trace.method = SearchMethod::kWeightedRandom;
  for (auto& s : steps) {
    weights.push_back(s->accuracy);
    out.trace.steps.push_back(std::move(*s));
  }
  out.scores = score_channels(out.masks, weights, cfg.score_mode);
  out.ranking = rank_channels(out.scores);

  if (cfg.target_size) {
    const std::vector<ChannelIndex> top(out.ranking.begin(),
                                        out.ranking.begin() + *cfg.target_size);
    ChannelSubset chosen = ChannelSubset::canonicalize(top, c);
    const double acc = evaluate(chosen).accuracy;
    out.trace.steps.push_back({chosen, acc, 1});
    out.selected = std::move(chosen);
  }
  out.trace.update_best_step();
  return out;
}

std::string electrode_row(std::string_view label) {
  std::size_t n = 0;
  while (n < label.size() && std::isalpha(static_cast<unsigned char>(label[n]))) ++n;
  if (n > 1 && (label[n - 1] == 'z' || label[n - 1] == 'Z')) --n;
  return std::string(label.substr(0, n));
}

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

ChannelSubset task_based_subset(const Montage& montage, const RegionSpec& region) {
  const auto& names = montage.channel_names();
  const int c = montage.n_channels();
  std::vector<ChannelIndex> members;

  if (!region.explicit_names.empty()) {
    for (const auto& wanted : region.explicit_names) {
      auto it = std::find_if(names.begin(), names.end(), [&](const std::string& n) {
        return iequals(n, wanted);
      });
      if (it == names.end()) {
        throw Error(ErrorCode::kUnknownName, wanted);
      }
      members.push_back(static_cast<ChannelIndex>(it - names.begin()));
    }
  } else {
    if (region.row_prefixes.empty()) {
      throw Error(ErrorCode::kConfigInvalid,
                  "region needs row prefixes or explicit names");
    }
    for (ChannelIndex i = 0; i < c; ++i) {
      const std::string row = electrode_row(names[i]);
      for (const auto& prefix : region.row_prefixes) {
        if (iequals(row, prefix)) {
          members.push_back(i);
          break;
        }
      }
    }
  }
  if (members.empty()) {
    throw Error(ErrorCode::kEmptyRegion, "no channel matches the region");
  }
  return ChannelSubset::canonicalize(members, c);
}

std::vector<CurvePoint> accuracy_curve(const SelectionTrace& trace) {
  std::map<int, std::size_t> best;  // size -> step index
  for (std::size_t s = 0; s < trace.steps.size(); ++s) {
    const int size = trace.steps[s].subset.size();
    auto it = best.find(size);
    if (it == best.end()) {
      best.emplace(size, s);
    } else if (trace.steps[s].accuracy > trace.steps[it->second].accuracy) {
      it->second = s;
    }
  }
  std::vector<CurvePoint> curve;
  for (const auto& [size, s] : best) {
    curve.push_back({size, trace.steps[s].accuracy, trace.steps[s].subset});
  }
  return curve;
}

}  // namespace chansel
