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

// Domain types shared across the library: montages, trial sets, channel
// subsets and their membership masks, evaluation results and search traces.
//
// Channel indices are 0-based everywhere; montage labels carry the
// human-facing identity and are what reports print.

#ifndef CHANSEL_CORE_MODEL_H_
#define CHANSEL_CORE_MODEL_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chansel {

using ChannelIndex = int;
using ClassId = int;

class Montage {
 public:
  // Throws kInvalidMontage on empty/duplicate names or non-positive fs.
  Montage(std::vector<std::string> channel_names, double fs_hz);

  const std::vector<std::string>& channel_names() const { return names_; }
  const std::string& name(ChannelIndex i) const;
  double fs_hz() const { return fs_hz_; }
  int n_channels() const { return static_cast<int>(names_.size()); }

  friend bool operator==(const Montage&, const Montage&) = default;

 private:
  std::vector<std::string> names_;
  double fs_hz_;
};

// The 22-electrode 10-20 layout of the BCI Competition IV 2a recordings.
std::vector<std::string> bci_iv_2a_channel_names();

// Canonical subset: strictly increasing, non-empty list of channel indices.
class ChannelSubset {
 public:
  // Sorts and deduplicates. Throws kEmptySubset or kIndexOutOfRange.
  static ChannelSubset canonicalize(std::span<const ChannelIndex> indices,
                                    int n_channels);
  static ChannelSubset canonicalize(std::initializer_list<ChannelIndex> indices,
                                    int n_channels) {
    return canonicalize(std::span<const ChannelIndex>(indices.begin(),
                                                      indices.size()),
                        n_channels);
  }
  static ChannelSubset full(int n_channels);

  const std::vector<ChannelIndex>& indices() const { return indices_; }
  int size() const { return static_cast<int>(indices_.size()); }
  bool contains(ChannelIndex i) const;
  // Largest index + 1; the subset is valid for any montage at least this wide.
  int min_channels() const { return indices_.back() + 1; }

  // Returns this subset plus `i`. `i` must be absent.
  ChannelSubset with(ChannelIndex i) const;
  bool is_strict_subset_of(const ChannelSubset& other) const;

  // "1,3,4"
  std::string to_string() const;

  // Lexicographic on the index list.
  friend auto operator<=>(const ChannelSubset&, const ChannelSubset&) = default;
  friend bool operator==(const ChannelSubset&, const ChannelSubset&) = default;

 private:
  explicit ChannelSubset(std::vector<ChannelIndex> sorted)
      : indices_(std::move(sorted)) {}
  std::vector<ChannelIndex> indices_;
};

struct ChannelSubsetHash {
  std::size_t operator()(const ChannelSubset& s) const noexcept;
};

// One-hot membership vector over all C channels.
class SubsetMask {
 public:
  explicit SubsetMask(std::vector<std::uint8_t> bits);

  const std::vector<std::uint8_t>& bits() const { return bits_; }
  int width() const { return static_cast<int>(bits_.size()); }
  bool test(ChannelIndex i) const { return bits_[i] != 0; }
  int count() const;

  friend bool operator==(const SubsetMask&, const SubsetMask&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

SubsetMask mask_of(const ChannelSubset& subset, int n_channels);
// Throws kAllZeroMask when no bit is set.
ChannelSubset subset_of(const SubsetMask& mask);

// N labelled trials, each C x T, stored trial-major then channel-major.
class TrialSet {
 public:
  // Validates dimensions, labels in [1, K], every class present and all
  // samples finite.
  TrialSet(Montage montage, int n_samples, std::vector<float> samples,
           std::vector<ClassId> labels, int n_classes);

  const Montage& montage() const { return montage_; }
  int n_trials() const { return static_cast<int>(labels_.size()); }
  int n_channels() const { return montage_.n_channels(); }
  int n_samples() const { return n_samples_; }
  int n_classes() const { return n_classes_; }
  const std::vector<ClassId>& labels() const { return labels_; }
  const std::vector<float>& samples() const { return samples_; }

  std::span<const float> channel(int trial, ChannelIndex c) const {
    const std::size_t offset =
        (static_cast<std::size_t>(trial) * n_channels() + c) * n_samples_;
    return {samples_.data() + offset, static_cast<std::size_t>(n_samples_)};
  }
  float at(int trial, ChannelIndex c, int t) const { return channel(trial, c)[t]; }

  // Per-class trial counts, index k holds class k+1.
  std::vector<int> class_counts() const;

  // Same samples, different labels (validated).
  TrialSet with_labels(std::vector<ClassId> labels) const;

  // Bitwise equality of samples, not IEEE equality.
  friend bool operator==(const TrialSet& a, const TrialSet& b);

 private:
  Montage montage_;
  int n_samples_;
  std::vector<float> samples_;
  std::vector<ClassId> labels_;
  int n_classes_;
};

// R -> R': keeps the subset's channels in index order. Throws kIndexOutOfRange.
TrialSet restrict(const TrialSet& trials, const ChannelSubset& subset);

struct EvalResult {
  explicit EvalResult(ChannelSubset s) : subset(std::move(s)) {}

  ChannelSubset subset;
  double accuracy = 0.0;
  std::vector<double> per_fold_accuracy;
  // Trials scored in each fold; parallel to per_fold_accuracy when present.
  std::vector<int> fold_sizes;
  std::string evaluator_id;
  std::uint64_t seed = 0;
  std::int64_t wall_time_ms = 0;
};

struct ScoreVector {
  std::vector<double> scores;
  int k_subsets = 0;
};

enum class SearchMethod { kExhaustive, kGreedy, kWeightedRandom, kTaskBased };

std::string_view method_name(SearchMethod method);

struct TraceStep {
  ChannelSubset subset;
  double accuracy = 0.0;
  int candidates_evaluated = 0;
};

struct SelectionTrace {
  SearchMethod method = SearchMethod::kGreedy;
  std::vector<TraceStep> steps;
  int best_step = -1;
  // Set when the search stopped early; steps then hold the partial trace.
  std::optional<std::string> error;

  // First index of the maximum accuracy, or -1 when empty.
  void update_best_step();
  const TraceStep& best() const { return steps.at(best_step); }
};

}  // namespace chansel

#endif  // CHANSEL_CORE_MODEL_H_
