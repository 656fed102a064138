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

// Linear discriminant analysis with the pooled covariance shrunk toward a
// scaled identity:
//
//   S_r = (1 - gamma) * S + gamma * (trace(S) / d) * I
//   score_k(x) = x' S_r^-1 mu_k - 0.5 mu_k' S_r^-1 mu_k + log(prior_k)
//
// Prediction is the arg max, ties going to the smallest class id.

#ifndef CHANSEL_LDA_H_
#define CHANSEL_LDA_H_

#include <span>
#include <vector>

#include "chansel/core_model.h"
#include "chansel/features.h"

namespace chansel {

struct LdaModel {
  int dim = 0;
  std::vector<ClassId> classes;  // ascending
  // classes.size() x dim, row-major: S_r^-1 mu_k.
  std::vector<double> weights;
  std::vector<double> bias;

  std::vector<double> scores(std::span<const double> x) const;
  ClassId predict(std::span<const double> x) const;
};

// Fits on the rows listed in `rows` (all rows when empty). Throws
// kConfigInvalid for fewer than two classes or gamma outside [0, 1], and
// kSingularCovariance when S_r cannot be factored.
LdaModel fit_shrinkage_lda(const FeatureMatrix& features,
                           std::span<const ClassId> labels, double gamma,
                           std::span<const int> rows = {});

}  // namespace chansel

#endif  // CHANSEL_LDA_H_
