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

#include "dpfusion/random.hpp"

#include <algorithm>
#include <cmath>

#include "dpfusion/error.hpp"

namespace dpfusion {

GaussianSampler::GaussianSampler(const Matrix& cov) {
  RequireSymmetric(cov, "noise covariance");
  const Matrix sym = Symmetrize(cov);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw InvalidInput("noise covariance eigendecomposition failed");
  }
  const Eigen::VectorXd ev = solver.eigenvalues();
  if (ev(0) < -1e-10 * std::max(1.0, std::abs(ev(ev.size() - 1)))) {
    throw InvalidInput("noise covariance is not non-negative definite");
  }
  const Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
  factor_ = solver.eigenvectors() * root.asDiagonal();
  zero_ = root.maxCoeff() == 0.0;
}

Vector GaussianSampler::Draw(RandomStream& rng) const {
  Vector z(factor_.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.StandardNormal();
  if (zero_) return Vector::Zero(factor_.rows());
  return factor_ * z;
}

}  // namespace dpfusion
