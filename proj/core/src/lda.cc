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

#include "chansel/lda.h"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "chansel/error.h"

namespace chansel {

std::vector<double> LdaModel::scores(std::span<const double> x) const {
  std::vector<double> out(classes.size());
  for (std::size_t k = 0; k < classes.size(); ++k) {
    double s = bias[k];
    const double* w = weights.data() + k * dim;
    for (int j = 0; j < dim; ++j) s += w[j] * x[j];
    out[k] = s;
  }
  return out;
}

ClassId LdaModel::predict(std::span<const double> x) const {
  const auto s = scores(x);
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k] > s[best]) best = k;
  }
  return classes[best];
}

LdaModel fit_shrinkage_lda(const FeatureMatrix& features,
                           std::span<const ClassId> labels, double gamma,
                           std::span<const int> rows) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw Error(ErrorCode::kConfigInvalid, "gamma must lie in [0, 1]");
  }
  const int d = features.cols;
  if (d < 1) throw Error(ErrorCode::kConfigInvalid, "no features");

  std::vector<int> all;
  if (rows.empty()) {
    all.resize(features.rows);
    std::iota(all.begin(), all.end(), 0);
    rows = all;
  }

  std::map<ClassId, std::vector<int>> by_class;
  for (int r : rows) by_class[labels[r]].push_back(r);
  if (by_class.size() < 2) {
    throw Error(ErrorCode::kConfigInvalid, "training split has fewer than 2 classes");
  }
  const int n_classes = static_cast<int>(by_class.size());
  const int n = static_cast<int>(rows.size());

  Eigen::MatrixXd means(d, n_classes);
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
  std::vector<double> log_prior;
  LdaModel model;
  model.dim = d;
  int k = 0;
  for (const auto& [cls, members] : by_class) {
    model.classes.push_back(cls);
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
    for (int r : members) {
      mu += Eigen::Map<const Eigen::VectorXd>(features.row(r).data(), d);
    }
    mu /= static_cast<double>(members.size());
    for (int r : members) {
      const Eigen::VectorXd centered =
          Eigen::Map<const Eigen::VectorXd>(features.row(r).data(), d) - mu;
      scatter.noalias() += centered * centered.transpose();
    }
    means.col(k++) = mu;
    log_prior.push_back(std::log(static_cast<double>(members.size()) / n));
  }

  const int dof = n > n_classes ? n - n_classes : n;
  const Eigen::MatrixXd pooled = scatter / static_cast<double>(dof);
  double scale = pooled.trace() / d;
  // Features constant within every class: fall back to unit scale so the
  // shrunk covariance stays invertible for gamma > 0.
  if (!(scale > 0.0)) scale = 1.0;
  Eigen::MatrixXd shrunk = (1.0 - gamma) * pooled;
  shrunk.diagonal().array() += gamma * scale;

  Eigen::LLT<Eigen::MatrixXd> llt(shrunk);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-12)) {
    throw Error(ErrorCode::kSingularCovariance,
                "regularized covariance is not positive definite");
  }
  const Eigen::MatrixXd solved = llt.solve(means);  // d x K

  model.weights.resize(static_cast<std::size_t>(n_classes) * d);
  model.bias.resize(n_classes);
  for (int c = 0; c < n_classes; ++c) {
    for (int j = 0; j < d; ++j) model.weights[c * d + j] = solved(j, c);
    model.bias[c] = -0.5 * means.col(c).dot(solved.col(c)) + log_prior[c];
  }
  return model;
}

}  // namespace chansel
