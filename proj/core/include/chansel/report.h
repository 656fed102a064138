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

#ifndef CHANSEL_REPORT_H_
#define CHANSEL_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chansel/core_model.h"
#include "chansel/selectors.h"

namespace chansel {

struct RunReport {
  SearchMethod method = SearchMethod::kGreedy;
  // Flag echo, in insertion order.
  std::vector<std::pair<std::string, std::string>> config;
  std::string dataset_digest;
  std::vector<std::string> channel_names;
  SelectionTrace trace;
  std::vector<CurvePoint> curve;
  std::optional<ChannelSubset> selected;
  // Weighted random search only.
  std::optional<ScoreVector> scores;
  std::vector<ChannelIndex> ranking;
  std::uint64_t total_evaluations = 0;
  std::uint64_t backend_calls = 0;
  std::uint64_t cache_hits = 0;
  std::int64_t wall_time_ms = 0;
};

// Pretty-printed JSON, one field per line. With mask_timing every
// wall-time field is written as 0 so two runs can be compared byte for byte.
std::string render_report(const RunReport& report, bool mask_timing);

// "size,accuracy,subset" with accuracy to 4 decimals and the subset as
// channel names joined by '+', in channel-index order. LF line endings.
std::string render_curve_csv(const std::vector<CurvePoint>& curve,
                             const std::vector<std::string>& channel_names);

std::string subset_names(const ChannelSubset& subset,
                         const std::vector<std::string>& channel_names,
                         std::string_view separator);

// Writes to a sibling temp file and renames it over `path`. Throws kIoError.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

}  // namespace chansel

#endif  // CHANSEL_REPORT_H_
