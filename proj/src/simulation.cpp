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

#include "dpfusion/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "dpfusion/error.hpp"

namespace dpfusion {
namespace {

Matrix Scalar(double v) { return Matrix::Constant(1, 1, v); }

// Substream layout of one run: process noise, then one measurement and one
// perturbation channel per sensor; each channel is split again per step.
constexpr std::uint64_t kProcessChannel = 0;
std::uint64_t MeasurementChannel(int i) { return 1 + 2 * static_cast<std::uint64_t>(i); }
std::uint64_t PerturbationChannel(int i) { return 2 + 2 * static_cast<std::uint64_t>(i); }

void RequireScenario(const Scenario& s) {
  if (s.horizon <= 0) throw InvalidInput("horizon must be positive");
  if (s.runs <= 0) throw InvalidInput("runs must be positive");
  if (s.burn_in < 0 || s.burn_in >= s.horizon) {
    throw InvalidInput("burn_in must lie in [0, horizon)");
  }
}

}  // namespace

RandomStream PrivacyStream(std::uint64_t master_seed) {
  return RandomStream(master_seed).Split(~0ULL);
}

Calibration Calibrate(const SystemModel& m, const PrivacyBudget& b,
                      const SolverOptions& solver, double zeta_margin,
                      std::optional<double> forced_q_a) {
  const ValidationReport report = ValidateModel(m);
  if (!report.accepted) {
    std::string why = "model rejected";
    for (const std::string& issue : report.issues) why += "; " + issue;
    throw InvalidInput(why);
  }
  ValidateBudget(b, m.state_dim());
  if (forced_q_a && !(*forced_q_a >= 0.0)) {
    throw InvalidInput("forced q_a must be >= 0");
  }
  Calibration cal;
  cal.ensemble = AssembleEnsemble(m, solver);
  cal.profile = ComputeSensitivityProfile(cal.ensemble);
  cal.plan = PlanMechanism(cal.profile, b, m.state_dim(), zeta_margin);
  cal.applied_q_a = forced_q_a.value_or(cal.plan.q_a);
  const int n = m.state_dim();
  const int l = m.num_sensors();
  cal.weights = ComputeFusionWeights(cal.ensemble.stacked, n, l);
  const Matrix perturbed = PerturbedStackedCov(cal.ensemble, cal.applied_q_a);
  cal.perturbed_weights = ComputeFusionWeights(perturbed, n, l);
  cal.fused_cov = FusedCovariance(cal.weights, cal.ensemble.stacked);
  cal.perturbed_fused_cov = FusedCovariance(cal.perturbed_weights, perturbed);
  return cal;
}

double OxygenDrive(const OxygenParams& p) {
  const double c1 = p.p_atm - p.p_h2o;
  const double c2 = (1.0 - p.fio2 * (1.0 - p.rq)) / p.rq;
  return (1.0 - p.shunt_fraction) *
             (1.34 * p.hemoglobin + 0.003 * (c1 * p.fio2) + c2 * p.paco2) -
         p.shunt_fraction * p.mu;
}

SystemModel OxygenModel(const OxygenParams& p) {
  SystemModel m;
  m.a = Scalar(p.shunt_fraction);
  m.b = Scalar(1.0);
  m.q_w = Scalar(p.q_w);
  for (double qv : p.q_v) m.sensors.push_back({Scalar(1.0), Scalar(1.0), Scalar(qv)});
  const double drive = OxygenDrive(p);
  m.input = Vector::Constant(1, drive);
  // Start at the noise-free equilibrium of the drive.
  if (p.shunt_fraction != 1.0) {
    m.initial_state = Vector::Constant(1, drive / (1.0 - p.shunt_fraction));
  }
  return m;
}

SystemModel TrackingModel(const TrackingParams& p) {
  const double t = p.sampling_time;
  SystemModel m;
  m.a.resize(2, 2);
  m.a << 1.0, t, 0.0, 1.0;
  m.b.resize(2, 1);
  m.b << 0.5 * t * t, t;
  m.q_w = Scalar(p.q_w);
  Matrix c(1, 2);
  c << 1.0, 0.0;
  for (double qv : p.q_v) m.sensors.push_back({c, Scalar(1.0), Scalar(qv)});
  return m;
}

void ResolvePlan(Scenario& s) {
  s.plan = Calibrate(s.model, s.budget, s.solver, s.zeta_margin, s.forced_q_a)
               .plan;
}

Scenario BuildOxygenScenario(const OxygenParams& p) {
  Scenario s;
  s.name = "oxygen";
  s.model = OxygenModel(p);
  s.budget = p.budget;
  ResolvePlan(s);
  return s;
}

Scenario BuildTrackingScenario(const TrackingParams& p) {
  Scenario s;
  s.name = "tracking";
  s.model = TrackingModel(p);
  s.budget = p.budget;
  ResolvePlan(s);
  return s;
}

const RmseSeries& SimulationResult::Series(const std::string& name) const {
  for (const RmseSeries& s : series) {
    if (s.name == name) return s;
  }
  throw InvalidInput("no series named " + name);
}

SimulationResult RunMonteCarlo(const Scenario& s) {
  return RunMonteCarlo(
      s, Calibrate(s.model, s.budget, s.solver, s.zeta_margin, s.forced_q_a));
}

SimulationResult RunMonteCarlo(const Scenario& s, const Calibration& cal) {
  RequireScenario(s);
  const SystemModel& m = s.model;
  const int n = m.state_dim();
  const int l = m.num_sensors();
  const bool perturbed = cal.applied_q_a > 0.0;
  const int num_series = l + 1 + (perturbed ? 1 : 0);
  const int recorded = s.horizon - s.burn_in;
  const int steady_first_step = std::max(s.burn_in + 1, s.horizon / 2 + 1);
  const int steady_begin = steady_first_step - (s.burn_in + 1);
  const int steady_len = recorded - steady_begin;

  const Plant plant(m);
  std::vector<SteadySensorSolution> sols = cal.ensemble.per_sensor;

  // sq[run][series][step][component]
  const std::size_t per_run =
      static_cast<std::size_t>(num_series) * recorded * n;
  std::vector<double> sq(static_cast<std::size_t>(s.runs) * per_run, 0.0);
  auto at = [&](int run, int series, int step, int comp) -> double& {
    return sq[static_cast<std::size_t>(run) * per_run +
              (static_cast<std::size_t>(series) * recorded + step) * n + comp];
  };

  auto simulate_run = [&](int run) {
    const RandomStream run_stream =
        RandomStream(s.master_seed).Split(static_cast<std::uint64_t>(run));
    const RandomStream process = run_stream.Split(kProcessChannel);
    std::vector<RandomStream> meas, pert;
    for (int i = 0; i < l; ++i) {
      meas.push_back(run_stream.Split(MeasurementChannel(i)));
      pert.push_back(run_stream.Split(PerturbationChannel(i)));
    }
    Vector x = m.InitialState();
    std::vector<FilterState> filters;
    for (int i = 0; i < l; ++i) filters.push_back({i, Vector::Zero(n)});
    std::vector<Vector> clean(l), noisy(l);
    for (int k = 1; k <= s.horizon; ++k) {
      const Vector u = m.InputAt(k);
      RandomStream w = process.Split(static_cast<std::uint64_t>(k));
      x = plant.Step(x, u, w);
      for (int i = 0; i < l; ++i) {
        RandomStream v = meas[i].Split(static_cast<std::uint64_t>(k));
        const Vector y = plant.Measure(i, x, v);
        filters[i] = FilterStep(filters[i], sols[i], m, y, u);
        clean[i] = filters[i].estimate;
        if (perturbed) {
          RandomStream a = pert[i].Split(static_cast<std::uint64_t>(k));
          noisy[i] = PerturbEstimate(clean[i], cal.applied_q_a, a);
        }
      }
      if (k <= s.burn_in) continue;
      const int step = k - s.burn_in - 1;
      auto record = [&](int series, const Vector& estimate) {
        const Vector err = x - estimate;
        for (int c = 0; c < n; ++c) at(run, series, step, c) = err(c) * err(c);
      };
      for (int i = 0; i < l; ++i) record(i, clean[i]);
      record(l, Fuse(cal.weights, clean));
      if (perturbed) record(l + 1, Fuse(cal.perturbed_weights, noisy));
    }
  };

  const int threads = std::clamp(s.threads, 1, s.runs);
  if (threads == 1) {
    for (int r = 0; r < s.runs; ++r) simulate_run(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int r = next++; r < s.runs; r = next++) simulate_run(r);
      });
    }
  }

  SimulationResult result;
  result.master_seed = s.master_seed;
  result.runs = s.runs;
  result.horizon = s.horizon;
  result.burn_in = s.burn_in;
  result.applied_q_a = cal.applied_q_a;
  result.steady_begin = steady_begin;
  for (int k = s.burn_in + 1; k <= s.horizon; ++k) result.steps.push_back(k);

  std::vector<std::string> names;
  std::vector<double> predicted;
  for (int i = 0; i < l; ++i) {
    names.push_back("local_" + std::to_string(i + 1));
    predicted.push_back(cal.ensemble.Block(i, i).trace());
  }
  names.push_back("fused");
  predicted.push_back(cal.fused_cov.trace());
  if (perturbed) {
    names.push_back("perturbed_fused");
    predicted.push_back(cal.perturbed_fused_cov.trace());
  }

  const double inv_runs = 1.0 / s.runs;
  for (int se = 0; se < num_series; ++se) {
    RmseSeries series;
    series.name = names[se];
    series.predicted_mse = predicted[se];
    series.rmse.assign(recorded, 0.0);
    series.component.assign(n, std::vector<double>(recorded, 0.0));
    series.run_steady_mse.assign(s.runs, 0.0);
    for (int step = 0; step < recorded; ++step) {
      double total = 0.0;
      for (int c = 0; c < n; ++c) {
        double sum = 0.0;
        for (int r = 0; r < s.runs; ++r) sum += at(r, se, step, c);
        series.component[c][step] = std::sqrt(sum * inv_runs);
        total += sum;
      }
      series.rmse[step] = std::sqrt(total * inv_runs);
    }
    for (int r = 0; r < s.runs; ++r) {
      double sum = 0.0;
      for (int step = steady_begin; step < recorded; ++step) {
        for (int c = 0; c < n; ++c) sum += at(r, se, step, c);
      }
      series.run_steady_mse[r] = sum / steady_len;
    }
    result.series.push_back(std::move(series));
  }

  if (s.privacy_samples > 0) {
    result.privacy = EmpiricalPrivacyCheck(
        OutputCovariances(cal.ensemble, cal.applied_q_a), s.budget,
        s.privacy_samples, PrivacyStream(s.master_seed), s.threads);
  }
  return result;
}

std::vector<SteadySummary> RmseSummary(const SimulationResult& r) {
  std::vector<SteadySummary> out;
  for (const RmseSeries& series : r.series) {
    SteadySummary sum;
    sum.name = series.name;
    sum.predicted_mse = series.predicted_mse;
    const int len = static_cast<int>(series.rmse.size()) - r.steady_begin;
    if (len <= 0) throw InvalidInput("empty steady window");
    for (int k = r.steady_begin; k < static_cast<int>(series.rmse.size()); ++k) {
      sum.steady_rmse += series.rmse[k];
    }
    sum.steady_rmse /= len;
    const auto runs = static_cast<double>(series.run_steady_mse.size());
    double mean = 0.0;
    for (double v : series.run_steady_mse) mean += v;
    mean /= runs;
    double var = 0.0;
    for (double v : series.run_steady_mse) var += (v - mean) * (v - mean);
    var = runs > 1 ? var / (runs - 1) : 0.0;
    sum.steady_mse = mean;
    // Delta method: se(sqrt(M)) = se(M) / (2 sqrt(M)).
    sum.std_error =
        mean > 0.0 ? std::sqrt(var / runs) / (2.0 * std::sqrt(mean)) : 0.0;
    out.push_back(sum);
  }
  return out;
}

}  // namespace dpfusion
