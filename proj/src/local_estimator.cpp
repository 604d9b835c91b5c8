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

#include "dpfusion/local_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dpfusion/error.hpp"
#include "dpfusion/log.hpp"

namespace dpfusion {
namespace {

void RequireSensor(const SystemModel& m, int sensor) {
  if (sensor < 0 || sensor >= m.num_sensors()) {
    throw InvalidInput("sensor index " + std::to_string(sensor) +
                       " out of range");
  }
}

void RequireOptions(const SolverOptions& opts) {
  if (!(opts.tol > 0.0)) throw InvalidInput("solver tol must be > 0");
  if (opts.max_iter <= 0) throw InvalidInput("solver max_iter must be > 0");
}

double Scale(const Matrix& p) { return std::max(1.0, MaxAbsEntry(p)); }

// Steady gain K = P C^T (C P C^T + R)^{-1}.
Matrix SteadyGain(const SensorModel& s, const Matrix& p_pred) {
  const Matrix innovation =
      Symmetrize(s.c * p_pred * s.c.transpose() + s.EffectiveNoise());
  return SolveLinear(innovation, s.c * p_pred).transpose();
}

}  // namespace

Matrix RiccatiMap(const SystemModel& m, int sensor, const Matrix& p_pred) {
  RequireSensor(m, sensor);
  const SensorModel& s = m.sensors[sensor];
  const Matrix innovation =
      Symmetrize(s.c * p_pred * s.c.transpose() + s.EffectiveNoise());
  const Matrix cpa = s.c * p_pred * m.a.transpose();
  return m.a * p_pred * m.a.transpose() + m.ProcessNoise() -
         cpa.transpose() * SolveLinear(innovation, cpa);
}

double RiccatiResidual(const SystemModel& m, int sensor, const Matrix& p_pred) {
  return (p_pred - RiccatiMap(m, sensor, p_pred)).cwiseAbs().maxCoeff();
}

SteadySensorSolution SolveRiccati(const SystemModel& m, int sensor,
                                  const SolverOptions& opts) {
  CheckDimensions(m);
  RequireSensor(m, sensor);
  RequireOptions(opts);

  SteadySensorSolution sol;
  Matrix p = Symmetrize(m.ProcessNoise());
  double last_delta = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iter = 0;
  while (iter < opts.max_iter) {
    ++iter;
    const Matrix next = Symmetrize(RiccatiMap(m, sensor, p));
    if (!next.allFinite()) {
      throw ConvergenceFailure(
          "Riccati iteration diverged for sensor " + std::to_string(sensor + 1),
          last_delta, iter);
    }
    const double delta = (next - p).cwiseAbs().maxCoeff();
    const double floor = opts.tol * Scale(next);
    if (iter > 10 && delta > last_delta && delta > 100.0 * floor) {
      sol.monotone = false;
    }
    p = next;
    last_delta = delta;
    if (delta <= floor) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceFailure("Riccati iteration for sensor " +
                                 std::to_string(sensor + 1) +
                                 " did not converge in " +
                                 std::to_string(opts.max_iter) +
                                 " iterations (last change " +
                                 std::to_string(last_delta) + ")",
                             last_delta, iter);
  }

  if (!sol.monotone) {
    Warn("Riccati iterates for sensor " + std::to_string(sensor + 1) +
         " were not monotone after burn-in");
  }
  const SensorModel& s = m.sensors[sensor];
  sol.p_pred = p;
  sol.gain = SteadyGain(s, p);
  const Matrix eye = Matrix::Identity(m.state_dim(), m.state_dim());
  sol.p_est = Symmetrize((eye - sol.gain * s.c) * p);
  sol.iterations = iter;
  sol.riccati_residual = RiccatiResidual(m, sensor, p);
  return sol;
}

Matrix CrossCovMap(const SystemModel& m, int i, int j,
                   const SteadySensorSolution& sol_i,
                   const SteadySensorSolution& sol_j, const Matrix& p) {
  RequireSensor(m, i);
  RequireSensor(m, j);
  const Matrix eye = Matrix::Identity(m.state_dim(), m.state_dim());
  const Matrix left = eye - sol_i.gain * m.sensors[i].c;
  const Matrix right = eye - sol_j.gain * m.sensors[j].c;
  Matrix next = left * (m.a * p * m.a.transpose() + m.ProcessNoise()) *
                right.transpose();
  if (i == j) {
    next += sol_i.gain * m.sensors[i].EffectiveNoise() * sol_i.gain.transpose();
  }
  return next;
}

double CrossCovResidual(const SystemModel& m, int i, int j,
                        const SteadySensorSolution& sol_i,
                        const SteadySensorSolution& sol_j, const Matrix& p) {
  return (p - CrossCovMap(m, i, j, sol_i, sol_j, p)).cwiseAbs().maxCoeff();
}

Matrix SolveCrossCov(const SystemModel& m, int i, int j,
                     const SteadySensorSolution& sol_i,
                     const SteadySensorSolution& sol_j,
                     const SolverOptions& opts) {
  CheckDimensions(m);
  RequireOptions(opts);
  Matrix p = Matrix::Zero(m.state_dim(), m.state_dim());
  double delta = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    Matrix next = CrossCovMap(m, i, j, sol_i, sol_j, p);
    if (i == j) next = Symmetrize(next);
    if (!next.allFinite()) {
      throw ConvergenceFailure("cross covariance iteration diverged for pair (" +
                                   std::to_string(i + 1) + ", " +
                                   std::to_string(j + 1) + ")",
                               delta, iter);
    }
    delta = (next - p).cwiseAbs().maxCoeff();
    p = next;
    if (delta <= opts.tol * Scale(p)) return p;
  }
  throw ConvergenceFailure(
      "cross covariance iteration for pair (" + std::to_string(i + 1) + ", " +
          std::to_string(j + 1) + ") did not converge; (I - K C) A may not be "
          "stable (last change " + std::to_string(delta) + ")",
      delta, opts.max_iter);
}

CovarianceEnsemble AssembleEnsemble(const SystemModel& m,
                                    const SolverOptions& opts) {
  CheckDimensions(m);
  const int n = m.state_dim();
  const int l = m.num_sensors();
  CovarianceEnsemble ens;
  for (int i = 0; i < l; ++i) ens.per_sensor.push_back(SolveRiccati(m, i, opts));

  ens.cross.assign(l, std::vector<Matrix>(l));
  ens.stacked.resize(n * l, n * l);
  for (int i = 0; i < l; ++i) {
    ens.cross[i][i] = ens.per_sensor[i].p_est;
    for (int j = i + 1; j < l; ++j) {
      const Matrix pij =
          SolveCrossCov(m, i, j, ens.per_sensor[i], ens.per_sensor[j], opts);
      ens.max_cross_residual = std::max(
          ens.max_cross_residual,
          CrossCovResidual(m, i, j, ens.per_sensor[i], ens.per_sensor[j], pij));
      ens.cross[i][j] = pij;
      ens.cross[j][i] = pij.transpose();
    }
  }
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < l; ++j) {
      ens.stacked.block(i * n, j * n, n, n) = ens.cross[i][j];
    }
  }
  return ens;
}

FilterState FilterStep(const FilterState& fs, const SteadySensorSolution& sol,
                       const SystemModel& m, const Vector& y, const Vector& u) {
  const SensorModel& s = m.sensors.at(fs.sensor);
  const Vector predicted = m.a * fs.estimate + u;
  return {fs.sensor, predicted + sol.gain * (y - s.c * predicted)};
}

}  // namespace dpfusion
