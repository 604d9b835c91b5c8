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

#include "dpfusion/system_model.hpp"

#include <string>

#include "dpfusion/error.hpp"

namespace dpfusion {
namespace {

std::string SensorTag(int i, const char* field) {
  return "sensor " + std::to_string(i + 1) + " " + field;
}

bool IsPsd(const Matrix& m) {
  if (m.rows() != m.cols() || !IsSymmetric(m)) return false;
  return SymEigExtremes(m).lambda_min >= -kPsdTolerance;
}

}  // namespace

Vector SystemModel::InputAt(int /*step*/) const {
  if (input.size() == 0) return Vector::Zero(state_dim());
  return input;
}

Vector SystemModel::InitialState() const {
  if (initial_state.size() == 0) return Vector::Zero(state_dim());
  return initial_state;
}

void CheckDimensions(const SystemModel& m) {
  RequireFinite(m.a, "A");
  RequireFinite(m.b, "B");
  RequireFinite(m.q_w, "Q_w");
  const auto n = m.a.rows();
  if (m.a.cols() != n) throw InvalidInput("A must be square");
  if (m.b.rows() != n) {
    throw InvalidInput("B must have " + std::to_string(n) + " rows");
  }
  if (m.q_w.rows() != m.b.cols() || m.q_w.cols() != m.b.cols()) {
    throw InvalidInput("Q_w must be " + std::to_string(m.b.cols()) + "x" +
                       std::to_string(m.b.cols()) + " to match B");
  }
  if (m.sensors.empty()) throw InvalidInput("model has no sensors");
  for (int i = 0; i < m.num_sensors(); ++i) {
    const SensorModel& s = m.sensors[i];
    RequireFinite(s.c, SensorTag(i, "C"));
    RequireFinite(s.d, SensorTag(i, "D"));
    RequireFinite(s.q_v, SensorTag(i, "Q_v"));
    if (s.c.cols() != n) {
      throw InvalidInput(SensorTag(i, "C") + " must have " +
                         std::to_string(n) + " columns");
    }
    if (s.d.rows() != s.c.rows()) {
      throw InvalidInput(SensorTag(i, "D") + " must have as many rows as C");
    }
    if (s.q_v.rows() != s.d.cols() || s.q_v.cols() != s.d.cols()) {
      throw InvalidInput(SensorTag(i, "Q_v") + " must match the columns of D");
    }
  }
  if (m.input.size() != 0) {
    if (m.input.size() != n) {
      throw InvalidInput("input must have dimension " + std::to_string(n));
    }
    RequireFinite(m.input, "input");
  }
  if (m.initial_state.size() != 0) {
    if (m.initial_state.size() != n) {
      throw InvalidInput("initial_state must have dimension " +
                         std::to_string(n));
    }
    RequireFinite(m.initial_state, "initial_state");
  }
}

Matrix ControllabilityMatrix(const SystemModel& m) {
  const auto n = m.a.rows();
  const auto nw = m.b.cols();
  Matrix ctrb(n, n * nw);
  Matrix block = m.b;
  for (Eigen::Index k = 0; k < n; ++k) {
    ctrb.middleCols(k * nw, nw) = block;
    block = m.a * block;
  }
  return ctrb;
}

Matrix ObservabilityMatrix(const SystemModel& m) {
  const auto n = m.a.rows();
  Eigen::Index ny = 0;
  for (const SensorModel& s : m.sensors) ny += s.c.rows();
  Matrix stacked(ny, n);
  Eigen::Index row = 0;
  for (const SensorModel& s : m.sensors) {
    stacked.middleRows(row, s.c.rows()) = s.c;
    row += s.c.rows();
  }
  Matrix obsv(ny * n, n);
  Matrix block = stacked;
  for (Eigen::Index k = 0; k < n; ++k) {
    obsv.middleRows(k * ny, ny) = block;
    block = block * m.a;
  }
  return obsv;
}

ValidationReport ValidateModel(const SystemModel& m) {
  CheckDimensions(m);
  ValidationReport report;
  report.state_dim = m.state_dim();
  report.num_sensors = m.num_sensors();
  report.controllability_rank =
      NumericalRank(ControllabilityMatrix(m), kRankTolerance);
  report.observability_rank =
      NumericalRank(ObservabilityMatrix(m), kRankTolerance);
  report.process_noise_psd = IsPsd(m.q_w);

  bool ok = report.controllability_rank == m.state_dim() &&
            report.observability_rank == m.state_dim() &&
            report.process_noise_psd;
  if (report.controllability_rank != m.state_dim()) {
    report.issues.push_back("(A, B) is not controllable: rank " +
                            std::to_string(report.controllability_rank) +
                            " < " + std::to_string(m.state_dim()));
  }
  if (report.observability_rank != m.state_dim()) {
    report.issues.push_back("(A, C) is not observable: rank " +
                            std::to_string(report.observability_rank) + " < " +
                            std::to_string(m.state_dim()));
  }
  if (!report.process_noise_psd) {
    report.issues.push_back("Q_w is not symmetric non-negative definite");
  }
  for (int i = 0; i < m.num_sensors(); ++i) {
    const SensorModel& s = m.sensors[i];
    const bool psd = IsPsd(s.q_v);
    const bool full =
        NumericalRank(s.EffectiveNoise(), kRankTolerance) == s.output_dim() &&
        MaxAbsEntry(s.EffectiveNoise()) > 0.0;
    report.measurement_noise_psd.push_back(psd);
    report.effective_noise_full_rank.push_back(full);
    if (!psd) {
      report.issues.push_back(SensorTag(i, "Q_v") +
                              " is not symmetric non-negative definite");
    }
    if (!full) {
      report.issues.push_back(SensorTag(i, "D Q_v D^T") +
                              " is rank deficient");
    }
    ok = ok && psd && full;
  }
  report.accepted = ok;
  return report;
}

Plant::Plant(const SystemModel& model)
    : model_((CheckDimensions(model), model)),
      process_(model.ProcessNoise()) {
  measurement_.reserve(model.sensors.size());
  for (const SensorModel& s : model.sensors) {
    measurement_.emplace_back(s.q_v);
  }
}

Vector Plant::Step(const Vector& x, const Vector& u, RandomStream& rng) const {
  return model_.a * x + u + process_.Draw(rng);
}

Vector Plant::Measure(int sensor, const Vector& x, RandomStream& rng) const {
  const SensorModel& s = model_.sensors.at(sensor);
  return s.c * x + s.d * measurement_[sensor].Draw(rng);
}

Vector StepState(const SystemModel& m, const Vector& x, const Vector& u,
                 RandomStream& rng) {
  const GaussianSampler w(m.q_w);
  return m.a * x + u + m.b * w.Draw(rng);
}

Vector Measure(const SensorModel& s, const Vector& x, RandomStream& rng) {
  const GaussianSampler v(s.q_v);
  return s.c * x + s.d * v.Draw(rng);
}

TrajectorySample SimulateTrajectory(const SystemModel& m, int horizon,
                                    const RandomStream& rng) {
  if (horizon <= 0) throw InvalidInput("horizon must be positive");
  const Plant plant(m);
  RandomStream process = rng.Split(0);
  std::vector<RandomStream> sensor_streams;
  for (int i = 0; i < m.num_sensors(); ++i) {
    sensor_streams.push_back(rng.Split(1 + i));
  }
  TrajectorySample out;
  out.horizon = horizon;
  out.states.push_back(m.InitialState());
  out.measurements.resize(m.sensors.size());
  for (int k = 1; k <= horizon; ++k) {
    out.states.push_back(
        plant.Step(out.states.back(), m.InputAt(k), process));
    for (int i = 0; i < m.num_sensors(); ++i) {
      out.measurements[i].push_back(
          plant.Measure(i, out.states.back(), sensor_streams[i]));
    }
  }
  return out;
}

}  // namespace dpfusion
