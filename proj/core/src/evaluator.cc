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

#include "chansel/evaluator.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numeric>

#include "chansel/error.h"
#include "chansel/folds.h"
#include "chansel/lda.h"

namespace chansel {
namespace {

std::string format_number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - start)
      .count();
}

EvalResult to_result(const ChannelSubset& subset, const CrossValidation& cv,
                     std::string id, std::uint64_t seed) {
  EvalResult r(subset);
  r.accuracy = static_cast<double>(cv.total_correct()) / cv.total();
  for (std::size_t f = 0; f < cv.correct.size(); ++f) {
    r.per_fold_accuracy.push_back(
        cv.fold_sizes[f] ? static_cast<double>(cv.correct[f]) / cv.fold_sizes[f]
                         : 0.0);
  }
  r.fold_sizes = cv.fold_sizes;
  r.evaluator_id = std::move(id);
  r.seed = seed;
  return r;
}

}  // namespace

std::vector<FrequencyBand> effective_bands(const BuiltinEvalConfig& cfg,
                                           double fs_hz) {
  bool fits = !cfg.bands.empty();
  for (const auto& b : cfg.bands) {
    if (!(b.low_hz >= 0.0) || !(b.low_hz < b.high_hz)) {
      throw Error(ErrorCode::kConfigInvalid,
                  "band [" + format_number(b.low_hz) + ", " +
                      format_number(b.high_hz) + ") is malformed");
    }
    if (!(b.high_hz < fs_hz / 2.0)) fits = false;
  }
  if (fits) return cfg.bands;
  if (cfg.bands.empty() || cfg.broadband_fallback) return {};
  throw Error(ErrorCode::kConfigInvalid,
              "bands exceed the Nyquist frequency " + format_number(fs_hz / 2.0) +
                  " Hz and broadband fallback is off");
}

void validate(const BuiltinEvalConfig& cfg, const TrialSet& trials) {
  if (cfg.n_folds < 2) {
    throw Error(ErrorCode::kConfigInvalid, "n_folds must be >= 2");
  }
  if (!(cfg.shrinkage_gamma >= 0.0 && cfg.shrinkage_gamma <= 1.0)) {
    throw Error(ErrorCode::kConfigInvalid, "shrinkage gamma must lie in [0, 1]");
  }
  const auto counts = trials.class_counts();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] < cfg.n_folds) {
      throw Error(ErrorCode::kClassTooSmall,
                  "class " + std::to_string(k + 1) + " has " +
                      std::to_string(counts[k]) + " trials for " +
                      std::to_string(cfg.n_folds) + " folds");
    }
  }
  effective_bands(cfg, trials.montage().fs_hz());
}

FeatureMatrix extract_features(const TrialSet& trials,
                               const BuiltinEvalConfig& cfg) {
  const auto bands = effective_bands(cfg, trials.montage().fs_hz());
  return band_power_features(trials, bands);
}

int CrossValidation::total_correct() const {
  return std::accumulate(correct.begin(), correct.end(), 0);
}

int CrossValidation::total() const {
  return std::accumulate(fold_sizes.begin(), fold_sizes.end(), 0);
}

CrossValidation cross_validate_lda(const FeatureMatrix& features,
                                   std::span<const ClassId> labels,
                                   int n_folds, double gamma,
                                   std::uint64_t seed) {
  const auto fold = stratified_folds(labels, n_folds, seed);
  CrossValidation cv;
  cv.correct.assign(n_folds, 0);
  cv.fold_sizes.assign(n_folds, 0);
  std::vector<int> train;
  train.reserve(labels.size());
  for (int f = 0; f < n_folds; ++f) {
    train.clear();
    for (int r = 0; r < features.rows; ++r) {
      if (fold[r] != f) train.push_back(r);
    }
    const LdaModel model = fit_shrinkage_lda(features, labels, gamma, train);
    for (int r = 0; r < features.rows; ++r) {
      if (fold[r] != f) continue;
      ++cv.fold_sizes[f];
      if (model.predict(features.row(r)) == labels[r]) ++cv.correct[f];
    }
  }
  return cv;
}

std::string builtin_evaluator_id(const BuiltinEvalConfig& cfg) {
  std::string id = "builtin-lda/folds=" + std::to_string(cfg.n_folds) +
                   "/gamma=" + format_number(cfg.shrinkage_gamma) + "/bands=";
  for (std::size_t b = 0; b < cfg.bands.size(); ++b) {
    if (b) id += ',';
    id += format_number(cfg.bands[b].low_hz) + "-" +
          format_number(cfg.bands[b].high_hz);
  }
  id += cfg.broadband_fallback ? "/fallback=on" : "/fallback=off";
  return id;
}

EvalResult evaluate_builtin(const TrialSet& trials, const ChannelSubset& subset,
                            const BuiltinEvalConfig& cfg, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  validate(cfg, trials);
  const TrialSet reduced = restrict(trials, subset);
  const FeatureMatrix features = extract_features(reduced, cfg);
  const auto cv = cross_validate_lda(features, reduced.labels(), cfg.n_folds,
                                     cfg.shrinkage_gamma, seed);
  EvalResult r = to_result(subset, cv, builtin_evaluator_id(cfg), seed);
  r.wall_time_ms = elapsed_ms(start);
  return r;
}

BuiltinEvaluator::BuiltinEvaluator(std::shared_ptr<const TrialSet> trials,
                                   BuiltinEvalConfig cfg)
    : trials_(std::move(trials)), cfg_(std::move(cfg)) {
  validate(cfg_, *trials_);
  const auto bands = effective_bands(cfg_, trials_->montage().fs_hz());
  features_per_channel_ = bands.empty() ? 1 : static_cast<int>(bands.size());
  features_ = band_power_features(*trials_, bands);
  id_ = builtin_evaluator_id(cfg_);
}

EvalResult BuiltinEvaluator::evaluate(const ChannelSubset& subset,
                                      std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  if (subset.min_channels() > trials_->n_channels()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "subset {" + subset.to_string() + "} exceeds " +
                    std::to_string(trials_->n_channels()) + " channels");
  }
  std::vector<int> columns;
  columns.reserve(subset.size() * features_per_channel_);
  for (ChannelIndex c : subset.indices()) {
    for (int b = 0; b < features_per_channel_; ++b) {
      columns.push_back(c * features_per_channel_ + b);
    }
  }
  const FeatureMatrix selected = features_.select_columns(columns);
  const auto cv = cross_validate_lda(selected, trials_->labels(), cfg_.n_folds,
                                     cfg_.shrinkage_gamma, seed);
  EvalResult r = to_result(subset, cv, id_, seed);
  r.wall_time_ms = elapsed_ms(start);
  return r;
}

void validate(const OracleSpec& spec) {
  if (!std::isfinite(spec.base) || !std::isfinite(spec.gain) ||
      !std::isfinite(spec.penalty)) {
    throw Error(ErrorCode::kConfigInvalid, "oracle parameters must be finite");
  }
  if (spec.gain < 0.0 || spec.penalty < 0.0) {
    throw Error(ErrorCode::kConfigInvalid, "oracle gain and penalty must be >= 0");
  }
  for (ChannelIndex c : spec.informative) {
    if (c < 0) throw Error(ErrorCode::kConfigInvalid, "negative informative channel");
  }
}

EvalResult evaluate_oracle(const ChannelSubset& subset, const OracleSpec& spec) {
  int hits = 0;
  for (ChannelIndex c : subset.indices()) {
    if (std::find(spec.informative.begin(), spec.informative.end(), c) !=
        spec.informative.end()) {
      ++hits;
    }
  }
  const int misses = subset.size() - hits;
  const double raw = spec.base + spec.gain * hits - spec.penalty * misses;
  EvalResult r(subset);
  r.accuracy = std::clamp(raw, 0.0, 1.0);
  r.evaluator_id = "oracle";
  return r;
}

OracleEvaluator::OracleEvaluator(OracleSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  std::sort(spec_.informative.begin(), spec_.informative.end());
  spec_.informative.erase(
      std::unique(spec_.informative.begin(), spec_.informative.end()),
      spec_.informative.end());
}

std::string OracleEvaluator::id() const {
  std::string id = "oracle/base=" + format_number(spec_.base) +
                   "/gain=" + format_number(spec_.gain) +
                   "/penalty=" + format_number(spec_.penalty) + "/informative=";
  for (std::size_t i = 0; i < spec_.informative.size(); ++i) {
    if (i) id += ',';
    id += std::to_string(spec_.informative[i]);
  }
  return id;
}

EvalResult OracleEvaluator::evaluate(const ChannelSubset& subset,
                                     std::uint64_t seed) {
  EvalResult r = evaluate_oracle(subset, spec_);
  r.evaluator_id = id();
  r.seed = seed;
  return r;
}

}  // namespace chansel
