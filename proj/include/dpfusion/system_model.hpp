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

#ifndef DPFUSION_SYSTEM_MODEL_HPP_
#define DPFUSION_SYSTEM_MODEL_HPP_

#include <string>
#include <vector>

#include "dpfusion/matrix_core.hpp"
#include "dpfusion/random.hpp"

namespace dpfusion {

// y_i = C x + D v,  v ~ N(0, Q_v).
struct SensorModel {
  Matrix c;
  Matrix d;
  Matrix q_v;

  int output_dim() const { return static_cast<int>(c.rows()); }
  // D Q_v D^T.
  Matrix EffectiveNoise() const { return d * q_v * d.transpose(); }
};

// x_{k+1} = A x_k + u_k + B w,  w ~ N(0, Q_w), observed by every sensor.
//
// `input` is the known deterministic drive u_k, held constant over time; an
// empty vector means u_k = 0. Plant and filters add the same u_k, so the
// estimation error dynamics and every covariance are independent of it.
struct SystemModel {
  Matrix a;
  Matrix b;
  Matrix q_w;
  std::vector<SensorModel> sensors;
  Vector input;
  Vector initial_state;

  int state_dim() const { return static_cast<int>(a.rows()); }
  int num_sensors() const { return static_cast<int>(sensors.size()); }
  // B Q_w B^T.
  Matrix ProcessNoise() const { return b * q_w * b.transpose(); }
  Vector InputAt(int step) const;
  Vector InitialState() const;
};

// Relative singular-value cutoff for the controllability and observability
// ranks.
inline constexpr double kRankTolerance = 1e-8;

// PSD acceptance for noise covariances: lambda_min >= -kPsdTolerance.
inline constexpr double kPsdTolerance = 1e-10;

struct ValidationReport {
  int state_dim = 0;
  int num_sensors = 0;
  int controllability_rank = 0;
  int observability_rank = 0;
  bool process_noise_psd = false;
  std::vector<bool> measurement_noise_psd;
  std::vector<bool> effective_noise_full_rank;
  bool accepted = false;
  std::vector<std::string> issues;
};

// Throws InvalidInput on any dimension mismatch or non-finite entry.
void CheckDimensions(const SystemModel& m);

ValidationReport ValidateModel(const SystemModel& m);

// [B AB ... A^{n-1}B] and [C; CA; ...; CA^{n-1}] with C the stacked
// observation matrix of all sensors.
Matrix ControllabilityMatrix(const SystemModel& m);
Matrix ObservabilityMatrix(const SystemModel& m);

// Caches the noise factors of a model so repeated draws do not refactor.
class Plant {
 public:
  explicit Plant(const SystemModel& model);

  // A x + u + B w.
  Vector Step(const Vector& x, const Vector& u, RandomStream& rng) const;
  // C_i x + D_i v_i.
  Vector Measure(int sensor, const Vector& x, RandomStream& rng) const;

  const SystemModel& model() const { return model_; }

 private:
  SystemModel model_;
  GaussianSampler process_;
  std::vector<GaussianSampler> measurement_;
};

Vector StepState(const SystemModel& m, const Vector& x, const Vector& u,
                 RandomStream& rng);
Vector Measure(const SensorModel& s, const Vector& x, RandomStream& rng);

struct TrajectorySample {
  int horizon = 0;
  std::vector<Vector> states;                     // x_0 .. x_K
  std::vector<std::vector<Vector>> measurements;  // [sensor][k - 1], k = 1..K
};

// Substreams: Split(0) drives the process noise, Split(1 + i) sensor i.
TrajectorySample SimulateTrajectory(const SystemModel& m, int horizon,
                                    const RandomStream& rng);

}  // namespace dpfusion

#endif  // DPFUSION_SYSTEM_MODEL_HPP_
