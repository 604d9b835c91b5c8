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

#ifndef DPFUSION_FUSION_HPP_
#define DPFUSION_FUSION_HPP_

#include <vector>

#include "dpfusion/local_estimator.hpp"
#include "dpfusion/matrix_core.hpp"

namespace dpfusion {

// Linear minimum-variance fusion weights [W_1 ... W_L]; sum_i W_i == I.
struct FusionWeights {
  std::vector<Matrix> blocks;
  // Set when the stacked covariance was singular and a diagonal jitter of
  // 1e-10 * trace / size had to be added before solving.
  bool jittered = false;

  int num_sensors() const { return static_cast<int>(blocks.size()); }
  // Horizontal concatenation [W_1 ... W_L].
  Matrix Row() const;
};

struct FusedResult {
  Vector estimate;
  Matrix covariance;
};

// W = (I_a^T P^-1 I_a)^-1 I_a^T P^-1 evaluated with linear solves.
// Throws SingularMatrix if P stays singular after one jitter attempt.
FusionWeights ComputeFusionWeights(const Matrix& stacked, int state_dim,
                                   int num_sensors);

// Stacked covariance of the perturbed local estimates: q_a I added to every
// diagonal block, off-diagonal blocks unchanged.
Matrix PerturbedStackedCov(const CovarianceEnsemble& ens, double q_a);

// sum_i W_i x_i.
Vector Fuse(const FusionWeights& w, const std::vector<Vector>& estimates);

// [W_1 ... W_L] P [W_1 ... W_L]^T.
Matrix FusedCovariance(const FusionWeights& w, const Matrix& stacked);

}  // namespace dpfusion

#endif  // DPFUSION_FUSION_HPP_
