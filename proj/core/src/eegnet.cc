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

#include "chansel/eegnet.h"

#include <cstdio>

#include "chansel/error.h"

namespace chansel {

void validate(const EegnetArch& a) {
  const int counts[] = {a.channels, a.samples, a.f1,    a.depth,
                        a.f2,       a.kern_len, a.sep_kern, a.pool1,
                        a.pool2,    a.n_classes};
  for (int v : counts) {
    if (v < 1) throw Error(ErrorCode::kConfigInvalid, "all sizes must be >= 1");
  }
  if (static_cast<std::int64_t>(a.pool1) * a.pool2 > a.samples) {
    throw Error(ErrorCode::kConfigInvalid,
                "pool1 * pool2 = " + std::to_string(a.pool1 * a.pool2) +
                    " exceeds " + std::to_string(a.samples) + " samples");
  }
}

std::int64_t eegnet_param_count(const EegnetArch& a) {
  validate(a);
  const std::int64_t per_bn = a.count_mode == BatchNormCount::kAll ? 4 : 2;
  const auto bn = [&](std::int64_t m) { return per_bn * m; };
  const std::int64_t f1 = a.f1;
  const std::int64_t fd = f1 * a.depth;
  const std::int64_t pooled = (a.samples / a.pool1) / a.pool2;

  std::int64_t n = f1 * a.kern_len;
  n += bn(f1);
  n += static_cast<std::int64_t>(a.channels) * fd;
  n += bn(fd);
  n += a.sep_kern * fd;
  n += fd * a.f2;
  n += bn(a.f2);
  n += a.f2 * pooled * a.n_classes + a.n_classes;
  return n;
}

std::string format_thousands(std::int64_t count) {
  const bool negative = count < 0;
  const std::int64_t mag = negative ? -count : count;
  const std::int64_t hundredths = (mag + 5) / 10;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s%lld.%02lldk", negative ? "-" : "",
                static_cast<long long>(hundredths / 100),
                static_cast<long long>(hundredths % 100));
  return buf;
}

}  // namespace chansel
