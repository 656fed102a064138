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

#include "chansel/features.h"

#include <cmath>
#include <numbers>

namespace chansel {
namespace {

// cos/sin of 2*pi*m/T for m in [0, T).
struct Twiddles {
  explicit Twiddles(int t) : cos_(t), sin_(t) {
    for (int m = 0; m < t; ++m) {
      const double angle = 2.0 * std::numbers::pi * m / t;
      cos_[m] = std::cos(angle);
      sin_[m] = std::sin(angle);
    }
  }
  std::vector<double> cos_;
  std::vector<double> sin_;
};

std::vector<int> bins_in_band(int t, double fs_hz, const FrequencyBand& band) {
  std::vector<int> bins;
  for (int k = 0; k <= t / 2; ++k) {
    const double f = k * fs_hz / t;
    if (f >= band.low_hz && f < band.high_hz) bins.push_back(k);
  }
  return bins;
}

double band_energy(std::span<const float> x, std::span<const int> bins,
                   const Twiddles& tw) {
  const int t = static_cast<int>(x.size());
  double energy = 0.0;
  for (int k : bins) {
    double re = 0.0;
    double im = 0.0;
    int m = 0;  // (k * n) mod T, advanced incrementally
    for (int n = 0; n < t; ++n) {
      re += x[n] * tw.cos_[m];
      im -= x[n] * tw.sin_[m];
      m += k;
      if (m >= t) m -= t;
    }
    energy += (re * re + im * im) / t;
  }
  return energy;
}

}  // namespace

FeatureMatrix FeatureMatrix::select_columns(std::span<const int> columns) const {
  FeatureMatrix out;
  out.rows = rows;
  out.cols = static_cast<int>(columns.size());
  out.values.resize(static_cast<std::size_t>(out.rows) * out.cols);
  for (int r = 0; r < rows; ++r) {
    for (int j = 0; j < out.cols; ++j) {
      out.values[static_cast<std::size_t>(r) * out.cols + j] = at(r, columns[j]);
    }
  }
  return out;
}

double band_log_power(std::span<const float> x, double fs_hz,
                      const FrequencyBand& band) {
  const int t = static_cast<int>(x.size());
  const Twiddles tw(t);
  const auto bins = bins_in_band(t, fs_hz, band);
  return std::log(kLogFloor + band_energy(x, bins, tw));
}

double broadband_log_variance(std::span<const float> x) {
  const std::size_t t = x.size();
  if (t < 2) return std::log(kLogFloor);
  double mean = 0.0;
  for (float v : x) mean += v;
  mean /= static_cast<double>(t);
  double ss = 0.0;
  for (float v : x) ss += (v - mean) * (v - mean);
  return std::log(kLogFloor + ss / static_cast<double>(t - 1));
}

FeatureMatrix band_power_features(const TrialSet& trials,
                                  std::span<const FrequencyBand> bands) {
  const int n = trials.n_trials();
  const int c = trials.n_channels();
  const int t = trials.n_samples();
  const int per_channel = bands.empty() ? 1 : static_cast<int>(bands.size());

  FeatureMatrix out;
  out.rows = n;
  out.cols = c * per_channel;
  out.values.resize(static_cast<std::size_t>(n) * out.cols);

  if (bands.empty()) {
    for (int r = 0; r < n; ++r) {
      for (int ch = 0; ch < c; ++ch) {
        out.values[static_cast<std::size_t>(r) * out.cols + ch] =
            broadband_log_variance(trials.channel(r, ch));
      }
    }
    return out;
  }

  const Twiddles tw(t);
  std::vector<std::vector<int>> bins;
  for (const auto& band : bands) {
    bins.push_back(bins_in_band(t, trials.montage().fs_hz(), band));
  }
  for (int r = 0; r < n; ++r) {
    for (int ch = 0; ch < c; ++ch) {
      const auto x = trials.channel(r, ch);
      for (int b = 0; b < per_channel; ++b) {
        out.values[static_cast<std::size_t>(r) * out.cols + ch * per_channel + b] =
            std::log(kLogFloor + band_energy(x, bins[b], tw));
      }
    }
  }
  return out;
}

}  // namespace chansel
