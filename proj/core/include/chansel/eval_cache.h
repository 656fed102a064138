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

#ifndef CHANSEL_EVAL_CACHE_H_
#define CHANSEL_EVAL_CACHE_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "chansel/core_model.h"
#include "chansel/evaluator.h"

namespace chansel {

struct EvalCacheKey {
  std::string evaluator_id;
  std::string dataset_digest;
  ChannelSubset subset;
  std::uint64_t seed = 0;

  // Canonical text form; equal keys have equal strings and vice versa.
  std::string encode() const;
  friend bool operator==(const EvalCacheKey&, const EvalCacheKey&) = default;
};

// Subset-keyed memo table. A given key is computed at most once per process
// even under concurrent lookups: later callers wait for the first. Failures
// are handed to the callers already waiting and then forgotten, so the next
// lookup retries.
//
// With a record file, every newly computed result is appended as one JSON
// line and existing lines are loaded on construction.
class EvalCache {
 public:
  EvalCache() = default;
  explicit EvalCache(std::filesystem::path record_file);

  EvalCache(const EvalCache&) = delete;
  EvalCache& operator=(const EvalCache&) = delete;

  EvalResult get_or_compute(const EvalCacheKey& key,
                            const std::function<EvalResult()>& compute);

  std::optional<EvalResult> find(const EvalCacheKey& key) const;
  std::size_t size() const;
  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }

  // Records persisted under CHANSEL_CACHE_DIR, or nullopt when unset.
  static std::optional<std::filesystem::path> record_file_from_env();

 private:
  void append_record(const EvalCacheKey& key, const EvalResult& result);

  mutable std::mutex mu_;
  std::unordered_map<std::string, std::shared_future<EvalResult>> entries_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};

  std::mutex file_mu_;
  std::optional<std::filesystem::path> record_file_;
};

// A backend plus the cache and the dataset identity that complete its keys.
class CachedEvaluator {
 public:
  CachedEvaluator(std::shared_ptr<SubsetEvaluator> backend,
                  std::shared_ptr<EvalCache> cache, std::string dataset_digest);

  EvalResult evaluate(const ChannelSubset& subset, std::uint64_t seed);

  std::uint64_t requests() const { return requests_; }
  std::uint64_t backend_calls() const { return backend_calls_; }
  std::uint64_t cache_hits() const { return requests_ - backend_calls_; }
  const std::string& evaluator_id() const { return evaluator_id_; }

 private:
  std::shared_ptr<SubsetEvaluator> backend_;
  std::shared_ptr<EvalCache> cache_;
  std::string dataset_digest_;
  std::string evaluator_id_;
  std::atomic<std::uint64_t> requests_{0};
  std::atomic<std::uint64_t> backend_calls_{0};
};

}  // namespace chansel

#endif  // CHANSEL_EVAL_CACHE_H_
