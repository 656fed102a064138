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

#include "chansel/folds.h"

#include <algorithm>
#include <map>
#include <random>

#include "chansel/error.h"

namespace chansel {

std::vector<int> stratified_folds(std::span<const ClassId> labels, int n_folds,
                                  std::uint64_t seed) {
  if (n_folds < 2) {
    throw Error(ErrorCode::kConfigInvalid, "need at least 2 folds");
  }
  std::map<ClassId, std::vector<int>> members;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
    members[labels[i]].push_back(i);
  }
  for (const auto& [cls, rows] : members) {
    if (static_cast<int>(rows.size()) < n_folds) {
      throw Error(ErrorCode::kClassTooSmall,
                  "class " + std::to_string(cls) + " has " +
                      std::to_string(rows.size()) + " trials for " +
                      std::to_string(n_folds) + " folds");
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<int> fold(labels.size(), 0);
  int offset = 0;
  for (auto& [cls, rows] : members) {
    std::shuffle(rows.begin(), rows.end(), rng);
    for (int j = 0; j < static_cast<int>(rows.size()); ++j) {
      fold[rows[j]] = (offset + j) % n_folds;
    }
    offset = (offset + static_cast<int>(rows.size())) % n_folds;
  }
  return fold;
}

}  // namespace chansel
