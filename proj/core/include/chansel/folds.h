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

#ifndef CHANSEL_FOLDS_H_
#define CHANSEL_FOLDS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "chansel/core_model.h"

namespace chansel {

// Fold id in [0, n_folds) per trial. Each class is shuffled with `seed` and
// dealt round-robin, so per-class fold counts differ by at most one; the
// starting fold rotates between classes to even out total fold sizes.
// Throws kClassTooSmall when some class has fewer than n_folds members,
// kConfigInvalid when n_folds < 2.
std::vector<int> stratified_folds(std::span<const ClassId> labels, int n_folds,
                                  std::uint64_t seed);

}  // namespace chansel

#endif  // CHANSEL_FOLDS_H_
