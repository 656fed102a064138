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

#include "chansel/eval_cache.h"

#include <cstdlib>

#include "chansel/error.h"
#include "json.hpp"

namespace chansel {
namespace {

using json = nlohmann::json;

json key_json(const EvalCacheKey& key) {
  return json{{"evaluator_id", key.evaluator_id},
              {"dataset", key.dataset_digest},
              {"channels", key.subset.indices()},
              {"seed", key.seed}};
}

json result_json(const EvalResult& r) {
  json j{{"accuracy", r.accuracy},
         {"evaluator_id", r.evaluator_id},
         {"seed", r.seed},
         {"wall_time_ms", r.wall_time_ms}};
  if (!r.per_fold_accuracy.empty()) {
    j["per_fold_accuracy"] = r.per_fold_accuracy;
    j["fold_sizes"] = r.fold_sizes;
  }
  return j;
}

}  // namespace

std::string EvalCacheKey::encode() const { return key_json(*this).dump(); }

EvalCache::EvalCache(std::filesystem::path record_file)
    : record_file_(std::move(record_file)) {
  std::ifstream in(*record_file_);
  std::string line;
  while (std::getline(in, line)) {
    // An interrupted append can leave a torn last line; skip anything that
    // does not parse.
    const json rec = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (rec.is_discarded() || !rec.is_object()) continue;
    try {
      const json& k = rec.at("key");
      const json& v = rec.at("result");
      const auto channels = k.at("channels").get<std::vector<ChannelIndex>>();
      if (channels.empty()) continue;
      const int width = *std::max_element(channels.begin(), channels.end()) + 1;
      EvalCacheKey key{k.at("evaluator_id").get<std::string>(),
                       k.at("dataset").get<std::string>(),
                       ChannelSubset::canonicalize(channels, width),
                       k.at("seed").get<std::uint64_t>()};
      EvalResult r(key.subset);
      r.accuracy = v.at("accuracy").get<double>();
      r.evaluator_id = v.at("evaluator_id").get<std::string>();
      r.seed = v.at("seed").get<std::uint64_t>();
      r.wall_time_ms = v.value("wall_time_ms", std::int64_t{0});
      if (v.contains("per_fold_accuracy")) {
        r.per_fold_accuracy = v.at("per_fold_accuracy").get<std::vector<double>>();
        r.fold_sizes = v.at("fold_sizes").get<std::vector<int>>();
      }
      std::promise<EvalResult> p;
      p.set_value(std::move(r));
      entries_.emplace(key.encode(), p.get_future().share());
    } catch (const std::exception&) {
      continue;
    }
  }
}

std::optional<std::filesystem::path> EvalCache::record_file_from_env() {
  const char* dir = std::getenv("CHANSEL_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return std::nullopt;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  return std::filesystem::path(dir) / "evalcache.jsonl";
}

EvalResult EvalCache::get_or_compute(const EvalCacheKey& key,
                                     const std::function<EvalResult()>& compute) {
  const std::string encoded = key.encode();
  std::shared_future<EvalResult> existing;
  std::promise<EvalResult> promise;
  {
    std::lock_guard lock(mu_);
    auto it = entries_.find(encoded);
    if (it != entries_.end()) {
      existing = it->second;
    } else {
      entries_.emplace(encoded, promise.get_future().share());
    }
  }
  if (existing.valid()) {
    ++hits_;
    // Rethrows the owner's failure if it had one.
    return existing.get();
  }

  ++misses_;
  std::optional<EvalResult> r;
  try {
    r.emplace(compute());
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::lock_guard lock(mu_);
    entries_.erase(encoded);
    throw;
  }
  promise.set_value(*r);
  append_record(key, *r);
  return std::move(*r);
}

std::optional<EvalResult> EvalCache::find(const EvalCacheKey& key) const {
  std::shared_future<EvalResult> future;
  {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key.encode());
    if (it == entries_.end()) return std::nullopt;
    future = it->second;
  }
  try {
    return future.get();
  } catch (...) {
    return std::nullopt;
  }
}

std::size_t EvalCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

void EvalCache::append_record(const EvalCacheKey& key, const EvalResult& result) {
  if (!record_file_) return;
  const std::string line =
      json{{"key", key_json(key)}, {"result", result_json(result)}}.dump() + "\n";
  std::lock_guard lock(file_mu_);
  std::ofstream out(*record_file_, std::ios::app | std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIoError,
                "cannot append to cache file " + record_file_->string());
  }
  out << line;
  out.flush();
}

CachedEvaluator::CachedEvaluator(std::shared_ptr<SubsetEvaluator> backend,
                                 std::shared_ptr<EvalCache> cache,
                                 std::string dataset_digest)
    : backend_(std::move(backend)),
      cache_(cache ? std::move(cache) : std::make_shared<EvalCache>()),
      dataset_digest_(std::move(dataset_digest)),
      evaluator_id_(backend_->id()) {}

EvalResult CachedEvaluator::evaluate(const ChannelSubset& subset,
                                     std::uint64_t seed) {
  ++requests_;
  const EvalCacheKey key{evaluator_id_, dataset_digest_, subset, seed};
  return cache_->get_or_compute(key, [&] {
    ++backend_calls_;
    return backend_->evaluate(subset, seed);
  });
}

}  // namespace chansel
