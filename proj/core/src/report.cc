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

#include "chansel/report.h"

#include <cstdio>
#include <fstream>

#include "chansel/error.h"
#include "json.hpp"

namespace chansel {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json subset_json(const ChannelSubset& s,
                         const std::vector<std::string>& names) {
  ordered_json names_json = ordered_json::array();
  for (ChannelIndex i : s.indices()) names_json.push_back(names.at(i));
  return ordered_json{{"channels", s.indices()}, {"names", names_json}};
}

}  // namespace

std::string subset_names(const ChannelSubset& subset,
                         const std::vector<std::string>& channel_names,
                         std::string_view separator) {
  std::string out;
  for (std::size_t k = 0; k < subset.indices().size(); ++k) {
    if (k) out += separator;
    out += channel_names.at(subset.indices()[k]);
  }
  return out;
}

std::string render_report(const RunReport& r, bool mask_timing) {
  ordered_json doc;
  doc["method"] = std::string(method_name(r.method));
  ordered_json config = ordered_json::object();
  for (const auto& [k, v] : r.config) config[k] = v;
  doc["config"] = config;
  doc["dataset_digest"] = r.dataset_digest;
  doc["accuracy_convention"] = "fraction of correctly classified trials in [0,1]";
  doc["channel_names"] = r.channel_names;

  ordered_json steps = ordered_json::array();
  for (const auto& s : r.trace.steps) {
    ordered_json step = subset_json(s.subset, r.channel_names);
    step["size"] = s.subset.size();
    step["accuracy"] = s.accuracy;
    step["candidates_evaluated"] = s.candidates_evaluated;
    steps.push_back(step);
  }
  ordered_json trace;
  trace["best_step"] = r.trace.best_step;
  trace["steps"] = steps;
  if (r.trace.error) trace["error"] = *r.trace.error;
  doc["trace"] = trace;

  ordered_json curve = ordered_json::array();
  for (const auto& p : r.curve) {
    ordered_json row{{"size", p.size}, {"accuracy", p.accuracy}};
    row["subset"] = subset_json(p.subset, r.channel_names);
    curve.push_back(row);
  }
  doc["curve"] = curve;

  if (r.scores) {
    doc["scores"] = r.scores->scores;
    doc["k_subsets"] = r.scores->k_subsets;
    doc["ranking"] = r.ranking;
  }
  if (r.selected) {
    doc["selected"] = subset_json(*r.selected, r.channel_names);
  } else {
    doc["selected"] = nullptr;
  }
  doc["total_evaluations"] = r.total_evaluations;
  doc["backend_calls"] = r.backend_calls;
  doc["cache_hits"] = r.cache_hits;
  doc["wall_time_ms"] = mask_timing ? 0 : r.wall_time_ms;
  return doc.dump(2) + "\n";
}

std::string render_curve_csv(const std::vector<CurvePoint>& curve,
                             const std::vector<std::string>& channel_names) {
  std::string out = "size,accuracy,subset\n";
  char buf[64];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof(buf), "%d,%.4f,", p.size, p.accuracy);
    out += buf;
    out += subset_names(p.subset, channel_names, "+");
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIoError, "cannot rename to " + path.string());
  }
}

}  // namespace chansel
