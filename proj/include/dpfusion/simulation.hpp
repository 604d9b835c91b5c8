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

#ifndef DPFUSION_SIMULATION_HPP_
#define DPFUSION_SIMULATION_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpfusion/fusion.hpp"
#include "dpfusion/local_estimator.hpp"
#include "dpfusion/privacy.hpp"
#include "dpfusion/system_model.hpp"

namespace dpfusion {

// Everything derived offline from a model and a budget.
struct Calibration {
  CovarianceEnsemble ensemble;
  SensitivityProfile profile;
  MechanismPlan plan;
  double applied_q_a = 0.0;  // plan.q_a unless overridden
  FusionWeights weights;             // clean local estimates
  FusionWeights perturbed_weights;   // local estimates + N(0, q_a I)
  Matrix fused_cov;
  Matrix perturbed_fused_cov;
};

// Runs the full offline pipeline: steady solutions, cross covariances,
// sensitivity, mechanism plan, and both weight sets. A forced q_a replaces the
// planned one everywhere downstream but leaves `plan` as computed.
Calibration Calibrate(const SystemModel& m, const PrivacyBudget& b,
                      const SolverOptions& solver, double zeta_margin,
                      std::optional<double> forced_q_a = std::nullopt);

struct Scenario {
  std::string name;
  SystemModel model;
  PrivacyBudget budget;
  SolverOptions solver;
  double zeta_margin = 0.0;
  std::optional<double> forced_q_a;
  MechanismPlan plan;
  int horizon = 200;
  int runs = 1000;
  int burn_in = 50;
  std::uint64_t master_seed = 42;
  int threads = 1;
  std::int64_t privacy_samples = 100000;  // 0 skips the privacy check
};

// Parameters of the blood-oxygen scenario. The drive constants (fio2, paco2
// and the physiological constants) only shift the known input u_k; every
// covariance, RMSE and privacy figure is independent of them.
struct OxygenParams {
  double shunt_fraction = 0.2;  // f, also the state transition
  double hemoglobin = 12.0;     // g/dL
  double p_atm = 760.0;         // mmHg
  double p_h2o = 47.0;          // mmHg
  double mu = 5.0;              // mL/dL
  double rq = 0.8;
  double fio2 = 0.4;            // u_k, fraction of inhaled oxygen
  double paco2 = 40.0;          // e_k, alveolar CO2 partial pressure (mmHg)
  double q_w = 0.4;
  std::vector<double> q_v = {0.6, 0.7};
  PrivacyBudget budget{0.8, 0.2};
};

// (1 - f)(1.34 Hb + 0.003 (P_atm - P_h2o) u + c2 e) - f mu with
// c2 = (1 - u (1 - RQ)) / RQ.
double OxygenDrive(const OxygenParams& p);

struct TrackingParams {
  double sampling_time = 1.0;
  double q_w = 0.1;
  std::vector<double> q_v = {0.2, 0.1};
  PrivacyBudget budget{0.9, 0.2};
};

SystemModel OxygenModel(const OxygenParams& p = {});
SystemModel TrackingModel(const TrackingParams& p = {});

// Fills scenario.plan from its model and budget.
void ResolvePlan(Scenario& s);

Scenario BuildOxygenScenario(const OxygenParams& p = {});
Scenario BuildTrackingScenario(const TrackingParams& p = {});

// RMSE across runs of one estimator.
struct RmseSeries {
  std::string name;
  std::vector<double> rmse;                    // per recorded step
  std::vector<std::vector<double>> component;  // [state component][step]
  std::vector<double> run_steady_mse;          // per run, over steady window
  double predicted_mse = 0.0;                  // trace of the analytic covariance
};

struct SimulationResult {
  std::vector<int> steps;  // burn_in + 1 .. horizon
  std::vector<RmseSeries> series;
  int steady_begin = 0;  // index into steps where the steady window starts
  std::optional<PrivacyReport> privacy;
  std::uint64_t master_seed = 0;
  int runs = 0;
  int horizon = 0;
  int burn_in = 0;
  double applied_q_a = 0.0;

  const RmseSeries& Series(const std::string& name) const;
};

// Independent trajectories with per-run substreams of master_seed. Series:
// local_1..local_L, fused, and perturbed_fused when the applied q_a > 0.
// RMSE at step k is sqrt(mean over runs of ||x_k - x_hat_k||^2). The result is
// bit-identical for a fixed seed regardless of thread count.
SimulationResult RunMonteCarlo(const Scenario& s, const Calibration& cal);
SimulationResult RunMonteCarlo(const Scenario& s);

struct SteadySummary {
  std::string name;
  double steady_rmse = 0.0;  // mean RMSE over the steady window
  double std_error = 0.0;    // Monte Carlo standard error of steady_rmse
  double steady_mse = 0.0;   // mean squared error over runs and window
  double predicted_mse = 0.0;
};

// Substream used by the empirical privacy check for a given master seed.
RandomStream PrivacyStream(std::uint64_t master_seed);

// Steady window: recorded steps in the last half of the horizon.
std::vector<SteadySummary> RmseSummary(const SimulationResult& r);

}  // namespace dpfusion

#endif  // DPFUSION_SIMULATION_HPP_
