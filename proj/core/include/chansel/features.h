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

#ifndef CHANSEL_FEATURES_H_
#define CHANSEL_FEATURES_H_

#include <span>
#include <vector>

#include "chansel/core_model.h"

namespace chansel {

inline constexpr double kLogFloor = 1e-12;

struct FrequencyBand {
  double low_hz;
  double high_hz;
  friend bool operator==(const FrequencyBand&, const FrequencyBand&) = default;
};

// Dense row-major matrix of per-trial features.
struct FeatureMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  std::span<const double> row(int r) const {
    return {values.data() + static_cast<std::size_t>(r) * cols,
            static_cast<std::size_t>(cols)};
  }
  double at(int r, int c) const {
    return values[static_cast<std::size_t>(r) * cols + c];
  }
  // Keeps only the listed columns, in the given order.
  FeatureMatrix select_columns(std::span<const int> columns) const;
};

// Band power of one channel: log(eps + sum_{k: low <= k*fs/T < high}
// |X(k)|^2 / T) over DFT bins k in [0, T/2].
double band_log_power(std::span<const float> x, double fs_hz,
                      const FrequencyBand& band);

// log(eps + unbiased sample variance).
double broadband_log_variance(std::span<const float> x);

// N x (C * B) features, column c * B + b for channel c and band b. With an
// empty band list, one broadband column per channel.
FeatureMatrix band_power_features(const TrialSet& trials,
                                  std::span<const FrequencyBand> bands);

}  // namespace chansel

#endif  // CHANSEL_FEATURES_H_
