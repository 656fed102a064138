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

// Trial-set file I/O and synthetic data.
//
// ETS layout (all integers little-endian):
//
//   "ETS1" | u32 header length | header (UTF-8 JSON object) | payload
//
// The header carries n_trials, n_channels, n_samples, fs_hz, channel_names,
// labels, dtype ("f32le") and layout ("trial-channel-time"). The payload is
// n_trials * n_channels * n_samples IEEE-754 binary32 values, trial-major,
// then channel-major, then time.

#ifndef CHANSEL_DATAIO_H_
#define CHANSEL_DATAIO_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chansel/core_model.h"

namespace chansel {

inline constexpr char kEtsMagic[4] = {'E', 'T', 'S', '1'};
inline constexpr const char* kEtsDtype = "f32le";
inline constexpr const char* kEtsLayout = "trial-channel-time";

struct EtsHeader {
  int n_trials = 0;
  int n_channels = 0;
  int n_samples = 0;
  double fs_hz = 0.0;
  std::vector<std::string> channel_names;
  std::vector<ClassId> labels;
  std::string dtype = kEtsDtype;
  std::string layout = kEtsLayout;
};

EtsHeader header_of(const TrialSet& trials);
std::string encode_header(const EtsHeader& header);
// Throws kHeaderParse.
EtsHeader decode_header(std::string_view text);

// Returns the number of bytes written. Throws kIoError.
std::size_t write_ets(const TrialSet& trials, std::ostream& sink);
TrialSet read_ets(std::istream& source);

// File variants. Writing goes to a sibling temp file renamed on success.
void write_ets_file(const TrialSet& trials, const std::filesystem::path& path);
TrialSet read_ets_file(const std::filesystem::path& path);

// One row per trial: label, then C*T values channel-major. Comma separated,
// spaces allowed, lines starting with '#' ignored.
TrialSet import_csv(std::istream& source, double fs_hz,
                    std::vector<std::string> channel_names);
// Writes values with shortest round-trip formatting.
void write_csv(const TrialSet& trials, std::ostream& sink);

struct SynthSpec {
  int n_trials = 200;
  int n_channels = 22;
  int n_samples = 250;
  int n_classes = 4;
  std::vector<ChannelIndex> informative_channels = {7, 9, 11};
  // Class offset per informative channel, in noise-sigma units.
  double separation = 2.0;
  double noise_sigma = 1.0;
  double fs_hz = 250.0;
  // Empty: the first n_channels labels of the BCI IV 2a montage when
  // n_channels <= 22, otherwise "E1".."En".
  std::vector<std::string> channel_names;
};

void validate(const SynthSpec& spec);

// Class y, informative channel:  mu(y) + sigma * g(y) * noise, with
//   mu(y)     = separation * sigma * (y - (K+1)/2)
//   log g(y)^2 = (mu(y) / sigma) * sqrt(2 / T)
// so the class shift in log-variance is `separation` standard errors of a
// full-band log-variance estimate. Other channels: sigma * noise.
// Trial t has class (t mod K) + 1. Throws kSpecInvalid.
TrialSet synth(const SynthSpec& spec, std::uint64_t seed);

// Lower-case hex SHA-256 of the ETS serialization.
std::string fingerprint(const TrialSet& trials);

}  // namespace chansel

#endif  // CHANSEL_DATAIO_H_
