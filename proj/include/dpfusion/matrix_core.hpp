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

#ifndef DPFUSION_MATRIX_CORE_HPP_
#define DPFUSION_MATRIX_CORE_HPP_

#include <string_view>

#include <Eigen/Dense>

namespace dpfusion {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative asymmetry admitted by the symmetric routines:
// max|M - M^T| <= kSymmetryTolerance * max|M|.
inline constexpr double kSymmetryTolerance = 1e-10;

// Condition-number estimate above which a linear system is rejected.
inline constexpr double kMaxConditionEstimate = 1e12;

struct EigenExtremes {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

// Throws InvalidInput naming `what` if any entry is NaN or infinite, or if the
// matrix is empty.
void RequireFinite(const Matrix& m, std::string_view what);
void RequireFinite(const Vector& v, std::string_view what);

// Throws InvalidInput unless m is square and symmetric within
// kSymmetryTolerance.
void RequireSymmetric(const Matrix& m, std::string_view what);

bool IsSymmetric(const Matrix& m);

// (M + M^T) / 2.
Matrix Symmetrize(const Matrix& m);

double MaxAbsEntry(const Matrix& m);

// Largest absolute eigenvalue of a symmetric matrix, i.e. its 2-norm.
double SpectralNorm(const Matrix& m);

// Smallest and largest eigenvalue of a symmetric matrix.
EigenExtremes SymEigExtremes(const Matrix& m);

// Solves A X = B by pivoted LU. Throws SingularMatrix carrying the condition
// estimate when A is singular or its estimated condition exceeds
// kMaxConditionEstimate.
Matrix SolveLinear(const Matrix& a, const Matrix& b);

// Reciprocal-condition based estimate of cond_1(A); infinity when singular.
double ConditionEstimate(const Matrix& a);

// Number of singular values strictly above tol * sigma_max.
int NumericalRank(const Matrix& m, double tol);

// Max-entry residual between A^-1 - B^-1 and A^-1 (B - A) B^-1.
double InverseDifferenceIdentityResidual(const Matrix& a, const Matrix& b);

// log|P| for symmetric positive definite P, summed over log eigenvalues so
// small covariances do not underflow. Throws InvalidInput if P is not PD.
double LogDetSpd(const Matrix& p);

// Throws InvalidInput unless P is symmetric with lambda_min > 0.
void RequirePositiveDefinite(const Matrix& p, std::string_view what);

}  // namespace dpfusion

#endif  // DPFUSION_MATRIX_CORE_HPP_
