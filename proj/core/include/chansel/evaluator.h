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

// Subset evaluators: everything that turns a channel subset into an accuracy.
//
// Three interchangeable backends implement SubsetEvaluator:
//   BuiltinEvaluator   cross-validated shrinkage LDA on DFT band powers
//   OracleEvaluator    closed-form accuracy, for exercising the selectors
//   ExternalEvaluator  a child process speaking the chansel-eval protocol
//                      (see external.h)
// CachedEvaluator (eval_cache.h) fronts any of them with a subset-keyed cache.

#ifndef CHANSEL_EVALUATOR_H_
#define CHANSEL_EVALUATOR_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "chansel/core_model.h"
#include "chansel/features.h"

namespace chansel {

class SubsetEvaluator {
 public:
  virtual ~SubsetEvaluator() = default;

  // Identifies the backend and every setting that affects its output; part of
  // the cache key.
  virtual std::string id() const = 0;

  // Must be safe to call concurrently.
  virtual EvalResult evaluate(const ChannelSubset& subset,
                              std::uint64_t seed) = 0;
};

struct BuiltinEvalConfig {
  int n_folds = 5;
  double shrinkage_gamma = 0.1;
  std::vector<FrequencyBand> bands = {{4, 8}, {8, 13}, {13, 30}};
  // Use one broadband log-variance feature per channel when the bands do not
  // fit below fs/2. When off, such a configuration is rejected.
  bool broadband_fallback = true;
};

// Bands actually used for a sampling rate: cfg.bands, or empty (broadband).
// Throws kConfigInvalid for malformed settings.
std::vector<FrequencyBand> effective_bands(const BuiltinEvalConfig& cfg,
                                           double fs_hz);

// Checks folds and gamma against a trial set. Throws kConfigInvalid or
// kClassTooSmall.
void validate(const BuiltinEvalConfig& cfg, const TrialSet& trials);

FeatureMatrix extract_features(const TrialSet& trials,
                               const BuiltinEvalConfig& cfg);

struct CrossValidation {
  std::vector<int> correct;     // per fold
  std::vector<int> fold_sizes;  // per fold
  int total_correct() const;
  int total() const;
};

// Fit on out-of-fold rows, score the in-fold rows, for every fold.
CrossValidation cross_validate_lda(const FeatureMatrix& features,
                                   std::span<const ClassId> labels,
                                   int n_folds, double gamma,
                                   std::uint64_t seed);

std::string builtin_evaluator_id(const BuiltinEvalConfig& cfg);

// restrict -> features -> stratified CV; accuracy is pooled correct / N.
EvalResult evaluate_builtin(const TrialSet& trials, const ChannelSubset& subset,
                            const BuiltinEvalConfig& cfg, std::uint64_t seed);

// Computes every channel's features once; a subset evaluation then only
// selects columns, which gives the same result as evaluate_builtin because
// features are per channel.
class BuiltinEvaluator : public SubsetEvaluator {
 public:
  BuiltinEvaluator(std::shared_ptr<const TrialSet> trials,
                   BuiltinEvalConfig cfg);

  std::string id() const override { return id_; }
  EvalResult evaluate(const ChannelSubset& subset, std::uint64_t seed) override;

  const FeatureMatrix& all_features() const { return features_; }

 private:
  std::shared_ptr<const TrialSet> trials_;
  BuiltinEvalConfig cfg_;
  int features_per_channel_;
  FeatureMatrix features_;
  std::string id_;
};

struct OracleSpec {
  std::vector<ChannelIndex> informative;
  double base = 0.5;
  double gain = 0.1;
  double penalty = 0.01;
};

void validate(const OracleSpec& spec);

// clamp01(base + gain * |S & I| - penalty * |S \ I|).
EvalResult evaluate_oracle(const ChannelSubset& subset, const OracleSpec& spec);

class OracleEvaluator : public SubsetEvaluator {
 public:
  explicit OracleEvaluator(OracleSpec spec);

  std::string id() const override;
  EvalResult evaluate(const ChannelSubset& subset, std::uint64_t seed) override;

 private:
  OracleSpec spec_;
};

}  // namespace chansel

#endif  // CHANSEL_EVALUATOR_H_
