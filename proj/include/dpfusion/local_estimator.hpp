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

#ifndef DPFUSION_LOCAL_ESTIMATOR_HPP_
#define DPFUSION_LOCAL_ESTIMATOR_HPP_

#include <vector>

#include "dpfusion/matrix_core.hpp"
#include "dpfusion/system_model.hpp"

namespace dpfusion {

struct SolverOptions {
  // Stop when the max-entry change of an iterate is at most
  // tol * max(1, max|P|).
  double tol = 1e-12;
  int max_iter = 100000;
};

// Steady-state Kalman filter of one sensor.
struct SteadySensorSolution {
  Matrix p_pred;  // steady prediction covariance
  Matrix gain;    // steady gain
  Matrix p_est;   // steady estimation covariance
  int iterations = 0;
  double riccati_residual = 0.0;
  // False if the iterate deltas stopped decreasing before reaching round-off.
  bool monotone = true;
};

struct CovarianceEnsemble {
  std::vector<SteadySensorSolution> per_sensor;
  // cross[i][j] is the steady cross covariance; cross[i][i] == p_est of i.
  std::vector<std::vector<Matrix>> cross;
  Matrix stacked;
  double max_cross_residual = 0.0;

  int state_dim() const { return static_cast<int>(stacked.rows()) / num_sensors(); }
  int num_sensors() const { return static_cast<int>(per_sensor.size()); }
  const Matrix& Block(int i, int j) const { return cross.at(i).at(j); }
};

// Right-hand side of the discrete Riccati equation at P for sensor i.
Matrix RiccatiMap(const SystemModel& m, int sensor, const Matrix& p_pred);

// Max-entry |P - RiccatiMap(P)|.
double RiccatiResidual(const SystemModel& m, int sensor, const Matrix& p_pred);

// Fixed-point iteration from P = B Q_w B^T. Throws ConvergenceFailure with the
// last residual when max_iter is exhausted or the iterate stops being finite.
SteadySensorSolution SolveRiccati(const SystemModel& m, int sensor,
                                  const SolverOptions& opts = {});

// One step of the estimation-error cross covariance recursion
//   P <- (I - K_i C_i)(A P A^T + B Q_w B^T)(I - K_j C_j)^T
//        + [i == j] K_i D_i Q_v_i D_i^T K_i^T.
// The last term vanishes for i != j because measurement noises are
// independent across sensors.
Matrix CrossCovMap(const SystemModel& m, int i, int j,
                   const SteadySensorSolution& sol_i,
                   const SteadySensorSolution& sol_j, const Matrix& p);

double CrossCovResidual(const SystemModel& m, int i, int j,
                        const SteadySensorSolution& sol_i,
                        const SteadySensorSolution& sol_j, const Matrix& p);

// Fixed point of CrossCovMap iterated from zero.
Matrix SolveCrossCov(const SystemModel& m, int i, int j,
                     const SteadySensorSolution& sol_i,
                     const SteadySensorSolution& sol_j,
                     const SolverOptions& opts = {});

CovarianceEnsemble AssembleEnsemble(const SystemModel& m,
                                    const SolverOptions& opts = {});

struct FilterState {
  int sensor = 0;
  Vector estimate;
};

// x_hat <- A x_hat + u + K (y - C (A x_hat + u)).
FilterState FilterStep(const FilterState& fs, const SteadySensorSolution& sol,
                       const SystemModel& m, const Vector& y, const Vector& u);

}  // namespace dpfusion

#endif  // DPFUSION_LOCAL_ESTIMATOR_HPP_
