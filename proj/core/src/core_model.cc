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

#include "chansel/core_model.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <unordered_set>

#include "chansel/error.h"

namespace chansel {

Montage::Montage(std::vector<std::string> channel_names, double fs_hz)
    : names_(std::move(channel_names)), fs_hz_(fs_hz) {
  if (names_.empty()) {
    throw Error(ErrorCode::kInvalidMontage, "montage has no channels");
  }
  if (!(fs_hz_ > 0.0) || !std::isfinite(fs_hz_)) {
    throw Error(ErrorCode::kInvalidMontage, "sampling rate must be positive");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : names_) {
    if (name.empty()) {
      throw Error(ErrorCode::kInvalidMontage, "empty channel name");
    }
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::kInvalidMontage, "duplicate channel name " + name);
    }
  }
}

const std::string& Montage::name(ChannelIndex i) const {
  if (i < 0 || i >= n_channels()) {
    throw Error(ErrorCode::kIndexOutOfRange, std::to_string(i));
  }
  return names_[i];
}

std::vector<std::string> bci_iv_2a_channel_names() {
  return {"Fz",  "FC3", "FC1", "FCz", "FC2", "FC4", "C5",  "C3",
          "C1",  "Cz",  "C2",  "C4",  "C6",  "CP3", "CP1", "CPz",
          "CP2", "CP4", "P1",  "Pz",  "P2",  "POz"};
}

// ChannelSubset

ChannelSubset ChannelSubset::canonicalize(std::span<const ChannelIndex> indices,
                                          int n_channels) {
  if (indices.empty()) {
    throw Error(ErrorCode::kEmptySubset, "subset has no channels");
  }
  for (ChannelIndex i : indices) {
    if (i < 0 || i >= n_channels) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "channel " + std::to_string(i) + " not in [0, " +
                      std::to_string(n_channels) + ")");
    }
  }
  std::vector<ChannelIndex> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  return ChannelSubset(std::move(sorted));
}

ChannelSubset ChannelSubset::full(int n_channels) {
  if (n_channels < 1) {
    throw Error(ErrorCode::kEmptySubset, "no channels");
  }
  std::vector<ChannelIndex> all(n_channels);
  for (int i = 0; i < n_channels; ++i) all[i] = i;
  return ChannelSubset(std::move(all));
}

bool ChannelSubset::contains(ChannelIndex i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

ChannelSubset ChannelSubset::with(ChannelIndex i) const {
  std::vector<ChannelIndex> next = indices_;
  next.insert(std::lower_bound(next.begin(), next.end(), i), i);
  return ChannelSubset(std::move(next));
}

bool ChannelSubset::is_strict_subset_of(const ChannelSubset& other) const {
  return size() < other.size() &&
         std::includes(other.indices_.begin(), other.indices_.end(),
                       indices_.begin(), indices_.end());
}

std::string ChannelSubset::to_string() const {
  std::string out;
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(indices_[k]);
  }
  return out;
}

std::size_t ChannelSubsetHash::operator()(const ChannelSubset& s) const noexcept {
  // FNV-1a over the index list.
  std::uint64_t h = 1469598103934665603ULL;
  for (ChannelIndex i : s.indices()) {
    h ^= static_cast<std::uint64_t>(i) + 0x9e3779b97f4a7c15ULL;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

// SubsetMask

SubsetMask::SubsetMask(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) b = b ? 1 : 0;
}

int SubsetMask::count() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), 1));
}

SubsetMask mask_of(const ChannelSubset& subset, int n_channels) {
  if (subset.min_channels() > n_channels) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "subset {" + subset.to_string() + "} exceeds " +
                    std::to_string(n_channels) + " channels");
  }
  std::vector<std::uint8_t> bits(n_channels, 0);
  for (ChannelIndex i : subset.indices()) bits[i] = 1;
  return SubsetMask(std::move(bits));
}

ChannelSubset subset_of(const SubsetMask& mask) {
  std::vector<ChannelIndex> members;
  for (int i = 0; i < mask.width(); ++i) {
    if (mask.test(i)) members.push_back(i);
  }
  if (members.empty()) {
    throw Error(ErrorCode::kAllZeroMask, "mask selects no channel");
  }
  return ChannelSubset::canonicalize(members, mask.width());
}

// TrialSet

TrialSet::TrialSet(Montage montage, int n_samples, std::vector<float> samples,
                   std::vector<ClassId> labels, int n_classes)
    : montage_(std::move(montage)),
      n_samples_(n_samples),
      samples_(std::move(samples)),
      labels_(std::move(labels)),
      n_classes_(n_classes) {
  if (labels_.empty()) {
    throw Error(ErrorCode::kInvalidTrialSet, "no trials");
  }
  if (n_samples_ < 1) {
    throw Error(ErrorCode::kInvalidTrialSet, "no samples per trial");
  }
  if (n_classes_ < 1) {
    throw Error(ErrorCode::kInvalidTrialSet, "no classes");
  }
  const std::size_t expected = labels_.size() *
                               static_cast<std::size_t>(n_channels()) *
                               static_cast<std::size_t>(n_samples_);
  if (samples_.size() != expected) {
    throw Error(ErrorCode::kInvalidTrialSet,
                "expected " + std::to_string(expected) + " samples, got " +
                    std::to_string(samples_.size()));
  }
  std::vector<int> counts(n_classes_, 0);
  for (ClassId y : labels_) {
    if (y < 1 || y > n_classes_) {
      throw Error(ErrorCode::kBadLabel, "label " + std::to_string(y) +
                                            " outside [1, " +
                                            std::to_string(n_classes_) + "]");
    }
    ++counts[y - 1];
  }
  for (int k = 0; k < n_classes_; ++k) {
    if (counts[k] == 0) {
      throw Error(ErrorCode::kInvalidTrialSet,
                  "class " + std::to_string(k + 1) + " has no trials");
    }
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw Error(ErrorCode::kNonFiniteSample,
                  "sample " + std::to_string(i) + " is not finite");
    }
  }
}

std::vector<int> TrialSet::class_counts() const {
  std::vector<int> counts(n_classes_, 0);
  for (ClassId y : labels_) ++counts[y - 1];
  return counts;
}

TrialSet TrialSet::with_labels(std::vector<ClassId> labels) const {
  if (labels.size() != labels_.size()) {
    throw Error(ErrorCode::kInvalidTrialSet, "label count mismatch");
  }
  return TrialSet(montage_, n_samples_, samples_, std::move(labels), n_classes_);
}

bool operator==(const TrialSet& a, const TrialSet& b) {
  return a.montage_ == b.montage_ && a.n_samples_ == b.n_samples_ &&
         a.n_classes_ == b.n_classes_ && a.labels_ == b.labels_ &&
         a.samples_.size() == b.samples_.size() &&
         std::memcmp(a.samples_.data(), b.samples_.data(),
                     a.samples_.size() * sizeof(float)) == 0;
}

TrialSet restrict(const TrialSet& trials, const ChannelSubset& subset) {
  if (subset.min_channels() > trials.n_channels()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "subset {" + subset.to_string() + "} exceeds " +
                    std::to_string(trials.n_channels()) + " channels");
  }
  std::vector<std::string> names;
  names.reserve(subset.size());
  for (ChannelIndex c : subset.indices()) {
    names.push_back(trials.montage().name(c));
  }
  const std::size_t t = static_cast<std::size_t>(trials.n_samples());
  std::vector<float> samples;
  samples.reserve(trials.n_trials() * subset.size() * t);
  for (int n = 0; n < trials.n_trials(); ++n) {
    for (ChannelIndex c : subset.indices()) {
      auto row = trials.channel(n, c);
      samples.insert(samples.end(), row.begin(), row.end());
    }
  }
  return TrialSet(Montage(std::move(names), trials.montage().fs_hz()),
                  trials.n_samples(), std::move(samples), trials.labels(),
                  trials.n_classes());
}

std::string_view method_name(SearchMethod method) {
  switch (method) {
    case SearchMethod::kExhaustive: return "exhaustive";
    case SearchMethod::kGreedy: return "greedy";
    case SearchMethod::kWeightedRandom: return "weighted_random";
    case SearchMethod::kTaskBased: return "task_based";
  }
  return "unknown";
}

void SelectionTrace::update_best_step() {
  best_step = -1;
  for (int s = 0; s < static_cast<int>(steps.size()); ++s) {
    if (best_step < 0 || steps[s].accuracy > steps[best_step].accuracy) {
      best_step = s;
    }
  }
}

}  // namespace chansel
