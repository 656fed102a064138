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

// Parameter count of an EEGNet-style network as a function of the input
// channel count, used to quantify what channel selection saves.

#ifndef CHANSEL_EEGNET_H_
#define CHANSEL_EEGNET_H_

#include <cstdint>
#include <string>

namespace chansel {

enum class BatchNormCount {
  kTrainableOnly,  // gamma, beta: 2 per channel
  kAll,            // plus running mean and variance: 4 per channel
};

struct EegnetArch {
  int channels = 22;
  int samples = 1125;
  int f1 = 8;
  int depth = 2;
  int f2 = 16;
  int kern_len = 64;
  int sep_kern = 16;
  int pool1 = 4;
  int pool2 = 8;
  int n_classes = 4;
  BatchNormCount count_mode = BatchNormCount::kTrainableOnly;
};

// Throws Error(kConfigInvalid) on a non-positive count or
// pool1 * pool2 > samples.
void validate(const EegnetArch& arch);

//   f1*kern_len                       temporal conv (no bias)
// + bn(f1) + channels*f1*depth        depthwise spatial conv
// + bn(f1*depth)
// + sep_kern*f1*depth + f1*depth*f2   separable conv
// + bn(f2)
// + f2*floor(floor(samples/pool1)/pool2)*n_classes + n_classes   dense
std::int64_t eegnet_param_count(const EegnetArch& arch);

// count / 1000 rounded half-up to two decimals: 2630 -> "2.63k".
std::string format_thousands(std::int64_t count);

}  // namespace chansel

#endif  // CHANSEL_EEGNET_H_
