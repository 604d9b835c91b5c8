//
// Copyright 2026 The dpfusion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dpfusion/fusion.hpp"

#include <string>

#include "dpfusion/error.hpp"
#include "dpfusion/log.hpp"

namespace dpfusion {
namespace {

FusionWeights SolveWeights(const Matrix& stacked, int n, int l) {
  const Matrix stack_eye = Matrix::Identity(n, n).replicate(l, 1);  // I_a
  const Matrix y = SolveLinear(stacked, stack_eye);                 // P^-1 I_a
  const Matrix info = Symmetrize(stack_eye.transpose() * y);
  const Matrix row = SolveLinear(info, y.transpose());
  FusionWeights w;
  for (int i = 0; i < l; ++i) w.blocks.push_back(row.middleCols(i * n, n));
  return w;
}

}  // namespace

Matrix FusionWeights::Row() const {
  if (blocks.empty()) return {};
  const auto n = blocks.front().rows();
  Matrix row(n, n * static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    row.middleCols(static_cast<Eigen::Index>(i) * n, n) = blocks[i];
  }
  return row;
}

FusionWeights ComputeFusionWeights(const Matrix& stacked, int state_dim,
                                   int num_sensors) {
  if (state_dim < 1 || num_sensors < 1) {
    throw InvalidInput("fusion weights need n_x >= 1 and L >= 1");
  }
  const int size = state_dim * num_sensors;
  if (stacked.rows() != size || stacked.cols() != size) {
    throw InvalidInput("stacked covariance must be " + std::to_string(size) +
                       "x" + std::to_string(size));
  }
  RequireSymmetric(stacked, "stacked covariance");
  try {
    return SolveWeights(stacked, state_dim, num_sensors);
  } catch (const SingularMatrix&) {
    const double jitter = 1e-10 * stacked.trace() / size;
    Warn("stacked covariance is singular; adding diagonal jitter " +
         std::to_string(jitter));
    Matrix bumped = stacked;
    bumped.diagonal().array() += jitter;
    FusionWeights w = SolveWeights(bumped, state_dim, num_sensors);
    w.jittered = true;
    return w;
  }
}

Matrix PerturbedStackedCov(const CovarianceEnsemble& ens, double q_a) {
  if (!(q_a >= 0.0)) throw InvalidInput("q_a must be >= 0");
  Matrix out = ens.stacked;
  out.diagonal().array() += q_a;
  return out;
}

Vector Fuse(const FusionWeights& w, const std::vector<Vector>& estimates) {
  if (static_cast<int>(estimates.size()) != w.num_sensors()) {
    throw InvalidInput("fuse: expected " + std::to_string(w.num_sensors()) +
                       " estimates");
  }
  Vector out = Vector::Zero(w.blocks.front().rows());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (estimates[i].size() != w.blocks[i].cols()) {
      throw InvalidInput("fuse: estimate dimension mismatch");
    }
    out += w.blocks[i] * estimates[i];
  }
  return out;
}

Matrix FusedCovariance(const FusionWeights& w, const Matrix& stacked) {
  const Matrix row = w.Row();
  if (row.cols() != stacked.rows() || stacked.rows() != stacked.cols()) {
    throw InvalidInput("fused covariance: dimension mismatch");
  }
  return Symmetrize(row * stacked * row.transpose());
}

}  // namespace dpfusion
