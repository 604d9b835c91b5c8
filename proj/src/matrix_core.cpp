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

#include "dpfusion/matrix_core.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dpfusion/error.hpp"

namespace dpfusion {
namespace {

std::string Dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

Eigen::VectorXd SymmetricEigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw InvalidInput("symmetric eigensolver failed to converge");
  }
  return solver.eigenvalues();  // ascending
}

}  // namespace

void RequireFinite(const Matrix& m, std::string_view what) {
  if (m.size() == 0) {
    throw InvalidInput(std::string(what) + ": empty matrix");
  }
  if (!m.allFinite()) {
    throw InvalidInput(std::string(what) + ": non-finite entry");
  }
}

void RequireFinite(const Vector& v, std::string_view what) {
  if (!v.allFinite()) {
    throw InvalidInput(std::string(what) + ": non-finite entry");
  }
}

bool IsSymmetric(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  const double scale = MaxAbsEntry(m);
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  return asym <= kSymmetryTolerance * scale;
}

void RequireSymmetric(const Matrix& m, std::string_view what) {
  RequireFinite(m, what);
  if (m.rows() != m.cols()) {
    throw InvalidInput(std::string(what) + ": expected square matrix, got " +
                       Dims(m));
  }
  if (!IsSymmetric(m)) {
    throw InvalidInput(std::string(what) + ": matrix is not symmetric");
  }
}

Matrix Symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double MaxAbsEntry(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double SpectralNorm(const Matrix& m) {
  RequireSymmetric(m, "spectral_norm");
  const Eigen::VectorXd ev = SymmetricEigenvalues(m);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

EigenExtremes SymEigExtremes(const Matrix& m) {
  RequireSymmetric(m, "sym_eig_extremes");
  const Eigen::VectorXd ev = SymmetricEigenvalues(m);
  return {ev(0), ev(ev.size() - 1)};
}

double ConditionEstimate(const Matrix& a) {
  if (a.rows() != a.cols() || a.size() == 0) {
    throw InvalidInput("condition estimate needs a square matrix, got " +
                       Dims(a));
  }
  if (MaxAbsEntry(a) == 0.0) return std::numeric_limits<double>::infinity();
  Eigen::PartialPivLU<Matrix> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > 0.0) || !std::isfinite(rcond)) {
    return std::numeric_limits<double>::infinity();
  }
  return 1.0 / rcond;
}

Matrix SolveLinear(const Matrix& a, const Matrix& b) {
  RequireFinite(a, "solve_linear A");
  RequireFinite(b, "solve_linear B");
  if (a.rows() != a.cols()) {
    throw InvalidInput("solve_linear: A must be square, got " + Dims(a));
  }
  if (b.rows() != a.rows()) {
    throw InvalidInput("solve_linear: A is " + Dims(a) + " but B is " +
                       Dims(b));
  }
  Eigen::PartialPivLU<Matrix> lu(a);
  const double rcond = MaxAbsEntry(a) == 0.0 ? 0.0 : lu.rcond();
  const double cond = (rcond > 0.0 && std::isfinite(rcond))
                          ? 1.0 / rcond
                          : std::numeric_limits<double>::infinity();
  if (!(cond < kMaxConditionEstimate)) {
    throw SingularMatrix(
        "solve_linear: matrix is singular or ill-conditioned (condition "
        "estimate " + std::to_string(cond) + ")",
        cond);
  }
  Matrix x = lu.solve(b);
  if (!x.allFinite()) {
    throw SingularMatrix("solve_linear: solution is not finite", cond);
  }
  return x;
}

int NumericalRank(const Matrix& m, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("numerical_rank: tol must be > 0");
  RequireFinite(m, "numerical_rank");
  Eigen::JacobiSVD<Matrix> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cutoff = tol * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return rank;
}

double InverseDifferenceIdentityResidual(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw InvalidInput("inverse identity: need square matrices of equal size");
  }
  const Matrix eye = Matrix::Identity(a.rows(), a.cols());
  const Matrix a_inv = SolveLinear(a, eye);
  const Matrix b_inv = SolveLinear(b, eye);
  const Matrix lhs = a_inv - b_inv;
  const Matrix rhs = a_inv * (b - a) * b_inv;
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

void RequirePositiveDefinite(const Matrix& p, std::string_view what) {
  RequireSymmetric(p, what);
  const EigenExtremes ext = SymEigExtremes(p);
  if (!(ext.lambda_min > 0.0)) {
    throw InvalidInput(std::string(what) +
                       ": covariance is not positive definite (lambda_min = " +
                       std::to_string(ext.lambda_min) + ")");
  }
}

double LogDetSpd(const Matrix& p) {
  RequireSymmetric(p, "log_det");
  const Eigen::VectorXd ev = SymmetricEigenvalues(p);
  if (!(ev(0) > 0.0)) {
    throw InvalidInput("log_det: covariance is not positive definite");
  }
  return ev.array().log().sum();
}

}  // namespace dpfusion
