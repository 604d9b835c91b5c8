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


#include "dpfusion/dpfusion.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpfusion/config.hpp"
#include "dpfusion/error.hpp"
#include "dpfusion/simulation.hpp"

struct dpf_config {
  dpfusion::RunConfig run;
};

struct dpf_calibration {
  dpfusion::Calibration cal;
};

struct dpf_privacy_report {
  dpfusion::PrivacyReport report;
  dpfusion::PrivacyBudget budget;
  double q_a = 0.0;
  std::int64_t samples = 0;
  // Scalar states only.
  std::vector<std::vector<dpfusion::Interval>> regions;
  std::vector<double> analytic;
};

struct dpf_simulation {
  dpfusion::SimulationResult result;
  std::vector<dpfusion::SteadySummary> summary;
  std::optional<dpf_privacy_report> privacy;
};

namespace {

using dpfusion::Matrix;

thread_local std::string g_last_error;

dpf_status Fail(dpf_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

dpf_status FromCode(dpfusion::ErrorCode code) {
  switch (code) {
    case dpfusion::ErrorCode::kInvalidInput:
      return DPF_ERR_INVALID_INPUT;
    case dpfusion::ErrorCode::kSingularMatrix:
      return DPF_ERR_SINGULAR_MATRIX;
    case dpfusion::ErrorCode::kConvergenceFailure:
      return DPF_ERR_CONVERGENCE;
    case dpfusion::ErrorCode::kBudgetOutOfRange:
      return DPF_ERR_BUDGET_OUT_OF_RANGE;
    case dpfusion::ErrorCode::kParseError:
      return DPF_ERR_PARSE;
  }
  return DPF_ERR_INTERNAL;
}

template <typename F>
dpf_status Guard(F&& body) {
  try {
    return body();
  } catch (const dpfusion::Error& e) {
    return Fail(FromCode(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(DPF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(DPF_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(DPF_ERR_INTERNAL, "unknown error");
  }
}

dpf_status NullArg(const char* name) {
  return Fail(DPF_ERR_NULL_ARGUMENT, std::string(name) + " is NULL");
}

dpf_status CopyString(const std::string& s, char* out, size_t capacity,
                      size_t* needed) {
  if (needed != nullptr) *needed = s.size() + 1;
  if (out == nullptr) return DPF_OK;
  if (capacity < s.size() + 1) {
    return Fail(DPF_ERR_BUFFER_TOO_SMALL, "buffer too small");
  }
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return DPF_OK;
}

dpf_status CopyMatrix(const Matrix& m, double* out, size_t capacity,
                      int32_t* rows, int32_t* cols) {
  if (rows != nullptr) *rows = static_cast<int32_t>(m.rows());
  if (cols != nullptr) *cols = static_cast<int32_t>(m.cols());
  if (out == nullptr) return DPF_OK;
  if (capacity < static_cast<size_t>(m.size())) {
    return Fail(DPF_ERR_BUFFER_TOO_SMALL, "buffer too small");
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out[r * m.cols() + c] = m(r, c);
    }
  }
  return DPF_OK;
}

dpf_status CopyDoubles(const std::vector<double>& v, double* out,
                       size_t capacity) {
  if (out == nullptr) return NullArg("out");
  if (capacity < v.size()) {
    return Fail(DPF_ERR_BUFFER_TOO_SMALL, "buffer too small");
  }
  std::copy(v.begin(), v.end(), out);
  return DPF_OK;
}

dpfusion::Calibration CalibrateScenario(const dpfusion::Scenario& s) {
  return dpfusion::Calibrate(s.model, s.budget, s.solver, s.zeta_margin,
                             s.forced_q_a);
}

dpf_privacy_report MakeReport(const dpfusion::Scenario& s,
                              const dpfusion::Calibration& cal,
                              dpfusion::PrivacyReport report) {
  dpf_privacy_report out;
  out.report = std::move(report);
  out.budget = s.budget;
  out.q_a = cal.applied_q_a;
  out.samples = s.privacy_samples;
  const auto covs = dpfusion::OutputCovariances(cal.ensemble, cal.applied_q_a);
  const bool scalar = cal.ensemble.state_dim() == 1;
  for (const dpfusion::PairExceedance& p : out.report.pairs) {
    if (scalar) {
      auto region = dpfusion::ExceedanceRegion1d(covs[p.i](0, 0),
                                                 covs[p.j](0, 0),
                                                 s.budget.epsilon);
      out.analytic.push_back(dpfusion::GaussianMass1d(region, covs[p.i](0, 0)));
      out.regions.push_back(std::move(region));
    } else {
      out.analytic.push_back(std::numeric_limits<double>::quiet_NaN());
      out.regions.emplace_back();
    }
  }
  return out;
}

bool SensorIndexOk(const dpf_calibration* c, int32_t i) {
  return i >= 0 && i < c->cal.ensemble.num_sensors();
}

}  // namespace

extern "C" {

const char* dpf_version(void) { return DPFUSION_VERSION; }

const char* dpf_status_name(dpf_status status) {
  switch (status) {
    case DPF_OK:
      return "ok";
    case DPF_ERR_INVALID_INPUT:
      return "invalid_input";
    case DPF_ERR_SINGULAR_MATRIX:
      return "singular_matrix";
    case DPF_ERR_CONVERGENCE:
      return "convergence_failure";
    case DPF_ERR_BUDGET_OUT_OF_RANGE:
      return "budget_out_of_range";
    case DPF_ERR_PARSE:
      return "parse_error";
    case DPF_ERR_NULL_ARGUMENT:
      return "null_argument";
    case DPF_ERR_BUFFER_TOO_SMALL:
      return "buffer_too_small";
    case DPF_ERR_OUT_OF_RANGE:
      return "out_of_range";
    case DPF_ERR_INTERNAL:
      return "internal_error";
  }
  return "unknown";
}

const char* dpf_last_error(void) { return g_last_error.c_str(); }

// ---- configuration -------------------------------------------------------

dpf_status dpf_config_load_file(const char* path, dpf_config** out) {
  if (path == nullptr) return NullArg("path");
  if (out == nullptr) return NullArg("out");
  return Guard([&] {
    *out = new dpf_config{dpfusion::LoadConfigFile(path)};
    return DPF_OK;
  });
}

dpf_status dpf_config_parse(const char* yaml_text, dpf_config** out) {
  if (yaml_text == nullptr) return NullArg("yaml_text");
  if (out == nullptr) return NullArg("out");
  return Guard([&] {
    *out = new dpf_config{dpfusion::ParseConfig(yaml_text)};
    return DPF_OK;
  });
}

dpf_status dpf_config_builtin(const char* name, dpf_config** out) {
  if (name == nullptr) return NullArg("name");
  if (out == nullptr) return NullArg("out");
  return Guard([&] {
    *out = new dpf_config{dpfusion::BuiltinConfig(name)};
    return DPF_OK;
  });
}

void dpf_config_free(dpf_config* config) { delete config; }

dpf_status dpf_config_get_settings(const dpf_config* config,
                                   dpf_run_settings* out) {
  if (config == nullptr) return NullArg("config");
  if (out == nullptr) return NullArg("out");
  const dpfusion::Scenario& s = config->run.scenario;
  *out = dpf_run_settings{};
  out->seed = s.master_seed;
  out->runs = s.runs;
  out->horizon = s.horizon;
  out->burn_in = s.burn_in;
  out->threads = s.threads;
  out->privacy_samples = s.privacy_samples;
  out->epsilon = s.budget.epsilon;
  out->delta = s.budget.delta;
  out->zeta_margin = s.zeta_margin;
  out->has_forced_q_a = s.forced_q_a.has_value() ? 1 : 0;
  out->forced_q_a = s.forced_q_a.value_or(0.0);
  out->state_dim = s.model.state_dim();
  out->num_sensors = s.model.num_sensors();
  return DPF_OK;
}

dpf_status dpf_config_set_seed(dpf_config* config, uint64_t seed) {
  if (config == nullptr) return NullArg("config");
  config->run.scenario.master_seed = seed;
  return DPF_OK;
}

dpf_status dpf_config_set_runs(dpf_config* config, int32_t runs) {
  if (config == nullptr) return NullArg("config");
  if (runs < 1) return Fail(DPF_ERR_INVALID_INPUT, "runs must be >= 1");
  config->run.scenario.runs = runs;
  return DPF_OK;
}

dpf_status dpf_config_set_horizon(dpf_config* config, int32_t horizon) {
  if (config == nullptr) return NullArg("config");
  dpfusion::Scenario& s = config->run.scenario;
  if (horizon < 1) return Fail(DPF_ERR_INVALID_INPUT, "horizon must be >= 1");
  if (s.burn_in >= horizon) {
    return Fail(DPF_ERR_INVALID_INPUT,
                "horizon must exceed burn_in (" + std::to_string(s.burn_in) +
                    ")");
  }
  s.horizon = horizon;
  return DPF_OK;
}

dpf_status dpf_config_set_threads(dpf_config* config, int32_t threads) {
  if (config == nullptr) return NullArg("config");
  if (threads < 1) return Fail(DPF_ERR_INVALID_INPUT, "threads must be >= 1");
  config->run.scenario.threads = threads;
  return DPF_OK;
}

dpf_status dpf_config_set_budget(dpf_config* config, double epsilon,
                                 double delta) {
  if (config == nullptr) return NullArg("config");
  config->run.scenario.budget = {epsilon, delta};
  return DPF_OK;
}

dpf_status dpf_config_set_zeta_margin(dpf_config* config, double zeta_margin) {
  if (config == nullptr) return NullArg("config");
  if (!(zeta_margin >= 0.0) || !std::isfinite(zeta_margin)) {
    return Fail(DPF_ERR_INVALID_INPUT, "zeta_margin must be finite and >= 0");
  }
  config->run.scenario.zeta_margin = zeta_margin;
  return DPF_OK;
}

dpf_status dpf_config_set_forced_q_a(dpf_config* config, double q_a) {
  if (config == nullptr) return NullArg("config");
  if (!(q_a >= 0.0) || !std::isfinite(q_a)) {
    return Fail(DPF_ERR_INVALID_INPUT, "q_a must be finite and >= 0");
  }
  config->run.scenario.forced_q_a = q_a;
  return DPF_OK;
}

dpf_status dpf_config_set_privacy_samples(dpf_config* config,
                                          int64_t samples) {
  if (config == nullptr) return NullArg("config");
  if (samples != 0 && samples < dpfusion::kMinPrivacySamples) {
    return Fail(DPF_ERR_INVALID_INPUT,
                "privacy samples must be 0 or >= " +
                    std::to_string(dpfusion::kMinPrivacySamples));
  }
  config->run.scenario.privacy_samples = samples;
  return DPF_OK;
}

dpf_status dpf_config_describe(const dpf_config* config, char* out,
                               size_t capacity, size_t* needed) {
  if (config == nullptr) return NullArg("config");
  return Guard([&] {
    return CopyString(dpfusion::CanonicalDescription(config->run), out,
                      capacity, needed);
  });
}

dpf_status dpf_config_hash(const dpf_config* config, char out[17]) {
  if (config == nullptr) return NullArg("config");
  if (out == nullptr) return NullArg("out");
  return Guard([&] {
    return CopyString(dpfusion::ConfigHash(config->run), out, 17, nullptr);
  });
}

dpf_status dpf_config_name(const dpf_config* config, char* out,
                           size_t capacity, size_t* needed) {
  if (config == nullptr) return NullArg("config");
  return CopyString(config->run.scenario.name, out, capacity, needed);
}

// ---- validation ----------------------------------------------------------

dpf_status dpf_validate(const dpf_config* config, dpf_validation_report* report,
                        char* issues, size_t capacity, size_t* needed) {
  if (config == nullptr) return NullArg("config");
  if (report == nullptr) return NullArg("report");
  return Guard([&] {
    const dpfusion::ValidationReport r =
        dpfusion::ValidateModel(config->run.scenario.model);
    *report = dpf_validation_report{};
    report->state_dim = r.state_dim;
    report->num_sensors = r.num_sensors;
    report->controllability_rank = r.controllability_rank;
    report->observability_rank = r.observability_rank;
    report->process_noise_psd = r.process_noise_psd ? 1 : 0;
    report->measurement_noise_psd = 1;
    for (bool b : r.measurement_noise_psd) {
      if (!b) report->measurement_noise_psd = 0;
    }
    report->effective_noise_full_rank = 1;
    for (bool b : r.effective_noise_full_rank) {
      if (!b) report->effective_noise_full_rank = 0;
    }
    report->accepted = r.accepted ? 1 : 0;
    std::string text;
    for (const std::string& issue : r.issues) text += issue + "\n";
    return CopyString(text, issues, capacity, needed);
  });
}

// ---- calibration ---------------------------------------------------------

dpf_status dpf_calibrate(const dpf_config* config, dpf_calibration** out) {
  if (config == nullptr) return NullArg("config");
  if (out == nullptr) return NullArg("out");
  return Guard([&] {
    *out = new dpf_calibration{CalibrateScenario(config->run.scenario)};
    return DPF_OK;
  });
}

void dpf_calibration_free(dpf_calibration* calibration) { delete calibration; }

dpf_status dpf_calibration_get_summary(const dpf_calibration* calibration,
                                       dpf_calibration_summary* out) {
  if (calibration == nullptr) return NullArg("calibration");
  if (out == nullptr) return NullArg("out");
  const dpfusion::Calibration& c = calibration->cal;
  *out = dpf_calibration_summary{};
  out->state_dim = c.ensemble.state_dim();
  out->num_sensors = c.ensemble.num_sensors();
  out->delta2 = c.profile.delta2;
  out->p_min = c.profile.p_min;
  out->p_max = c.profile.p_max;
  out->threshold = c.plan.threshold;
  out->kind = c.plan.kind == dpfusion::MechanismKind::kIntrinsic
                  ? DPF_MECHANISM_INTRINSIC
                  : DPF_MECHANISM_GAUSSIAN;
  out->q_a = c.plan.q_a;
  out->zeta = c.plan.zeta;
  out->zeta_bound = c.plan.zeta_bound;
  out->applied_q_a = c.applied_q_a;
  double riccati = 0.0;
  for (const auto& s : c.ensemble.per_sensor) {
    riccati = std::max(riccati, s.riccati_residual);
  }
  out->max_riccati_residual = riccati;
  out->max_cross_residual = c.ensemble.max_cross_residual;
  out->fused_trace = c.fused_cov.trace();
  out->perturbed_fused_trace = c.perturbed_fused_cov.trace();
  out->weights_jittered =
      (c.weights.jittered || c.perturbed_weights.jittered) ? 1 : 0;
  return DPF_OK;
}

dpf_status dpf_calibration_matrix(const dpf_calibration* calibration,
                                  dpf_matrix_id id, int32_t i, int32_t j,
                                  double* out, size_t capacity, int32_t* rows,
                                  int32_t* cols) {
  if (calibration == nullptr) return NullArg("calibration");
  const dpfusion::Calibration& c = calibration->cal;
  auto bad_index = [] {
    return Fail(DPF_ERR_OUT_OF_RANGE, "sensor index out of range");
  };
  switch (id) {
    case DPF_MATRIX_P_PRED:
    case DPF_MATRIX_GAIN:
    case DPF_MATRIX_P_EST: {
      if (!SensorIndexOk(calibration, i)) return bad_index();
      const auto& s = c.ensemble.per_sensor[i];
      const Matrix& m = id == DPF_MATRIX_P_PRED ? s.p_pred
                        : id == DPF_MATRIX_GAIN ? s.gain
                                                : s.p_est;
      return CopyMatrix(m, out, capacity, rows, cols);
    }
    case DPF_MATRIX_CROSS:
      if (!SensorIndexOk(calibration, i) || !SensorIndexOk(calibration, j)) {
        return bad_index();
      }
      return CopyMatrix(c.ensemble.cross[i][j], out, capacity, rows, cols);
    case DPF_MATRIX_STACKED:
      return CopyMatrix(c.ensemble.stacked, out, capacity, rows, cols);
    case DPF_MATRIX_WEIGHT:
      if (!SensorIndexOk(calibration, i)) return bad_index();
      return CopyMatrix(c.weights.blocks[i], out, capacity, rows, cols);
    case DPF_MATRIX_PERTURBED_WEIGHT:
      if (!SensorIndexOk(calibration, i)) return bad_index();
      return CopyMatrix(c.perturbed_weights.blocks[i], out, capacity, rows,
                        cols);
    case DPF_MATRIX_FUSED_COV:
      return CopyMatrix(c.fused_cov, out, capacity, rows, cols);
    case DPF_MATRIX_PERTURBED_FUSED_COV:
      return CopyMatrix(c.perturbed_fused_cov, out, capacity, rows, cols);
  }
  return Fail(DPF_ERR_OUT_OF_RANGE, "unknown matrix id");
}

// ---- privacy -------------------------------------------------------------

dpf_status dpf_privacy_check(const dpf_config* config,
                             const dpf_calibration* calibration,
                             dpf_privacy_report** out) {
  if (config == nullptr) return NullArg("config");
  if (out == nullptr) return NullArg("out");
  return Guard([&] {
    const dpfusion::Scenario& s = config->run.scenario;
    if (s.privacy_samples < dpfusion::kMinPrivacySamples) {
      return Fail(DPF_ERR_INVALID_INPUT,
                  "privacy check needs at least " +
                      std::to_string(dpfusion::kMinPrivacySamples) +
                      " samples");
    }
    std::optional<dpfusion::Calibration> own;
    if (calibration == nullptr) own = CalibrateScenario(s);
    const dpfusion::Calibration& cal = own ? *own : calibration->cal;
    dpfusion::PrivacyReport report = dpfusion::EmpiricalPrivacyCheck(
        dpfusion::OutputCovariances(cal.ensemble, cal.applied_q_a), s.budget,
        s.privacy_samples, dpfusion::PrivacyStream(s.master_seed), s.threads);
    *out = new dpf_privacy_report(MakeReport(s, cal, std::move(report)));
    return DPF_OK;
  });
}

void dpf_privacy_report_free(dpf_privacy_report* report) { delete report; }

dpf_status dpf_privacy_get_summary(const dpf_privacy_report* report,
                                   dpf_privacy_summary* out) {
  if (report == nullptr) return NullArg("report");
  if (out == nullptr) return NullArg("out");
  *out = dpf_privacy_summary{};
  out->samples = report->samples;
  out->num_pairs = static_cast<int32_t>(report->report.pairs.size());
  out->epsilon = report->budget.epsilon;
  out->delta = report->budget.delta;
  out->q_a = report->q_a;
  out->max_fraction = report->report.max_fraction;
  out->limit = report->report.limit;
  out->pass = report->report.pass ? 1 : 0;
  return DPF_OK;
}

dpf_status dpf_privacy_get_pair(const dpf_privacy_report* report,
                                int32_t index, dpf_pair_exceedance* out) {
  if (report == nullptr) return NullArg("report");
  if (out == nullptr) return NullArg("out");
  if (index < 0 || static_cast<size_t>(index) >= report->report.pairs.size()) {
    return Fail(DPF_ERR_OUT_OF_RANGE, "pair index out of range");
  }
  const dpfusion::PairExceedance& p = report->report.pairs[index];
  out->i = p.i;
  out->j = p.j;
  out->samples = p.samples;
  out->exceedances = p.exceedances;
  out->fraction = p.fraction;
  out->analytic_fraction = report->analytic[index];
  return DPF_OK;
}

dpf_status dpf_privacy_pair_regions(const dpf_privacy_report* report,
                                    int32_t index, double* out,
                                    size_t capacity, size_t* count) {
  if (report == nullptr) return NullArg("report");
  if (index < 0 || static_cast<size_t>(index) >= report->regions.size()) {
    return Fail(DPF_ERR_OUT_OF_RANGE, "pair index out of range");
  }
  const auto& region = report->regions[index];
  if (count != nullptr) *count = region.size();
  if (out == nullptr) return DPF_OK;
  if (capacity < region.size()) {
    return Fail(DPF_ERR_BUFFER_TOO_SMALL, "buffer too small");
  }
  for (size_t k = 0; k < region.size(); ++k) {
    out[2 * k] = region[k].lower;
    out[2 * k + 1] = region[k].upper;
  }
  return DPF_OK;
}

// ---- simulation ----------------------------------------------------------

dpf_status dpf_simulate(const dpf_config* config,
                        const dpf_calibration* calibration,
                        dpf_simulation** out) {
  if (config == nullptr) return NullArg("config");
  if (out == nullptr) return NullArg("out");
  return Guard([&] {
    const dpfusion::Scenario& s = config->run.scenario;
    std::optional<dpfusion::Calibration> own;
    if (calibration == nullptr) own = CalibrateScenario(s);
    const dpfusion::Calibration& cal = own ? *own : calibration->cal;
    auto* sim = new dpf_simulation{};
    try {
      sim->result = dpfusion::RunMonteCarlo(s, cal);
      sim->summary = dpfusion::RmseSummary(sim->result);
      if (sim->result.privacy) {
        sim->privacy = MakeReport(s, cal, *sim->result.privacy);
      }
    } catch (...) {
      delete sim;
      throw;
    }
    *out = sim;
    return DPF_OK;
  });
}

void dpf_simulation_free(dpf_simulation* simulation) { delete simulation; }

int32_t dpf_simulation_num_steps(const dpf_simulation* simulation) {
  if (simulation == nullptr) return 0;
  return static_cast<int32_t>(simulation->result.steps.size());
}

int32_t dpf_simulation_num_series(const dpf_simulation* simulation) {
  if (simulation == nullptr) return 0;
  return static_cast<int32_t>(simulation->result.series.size());
}

int32_t dpf_simulation_state_dim(const dpf_simulation* simulation) {
  if (simulation == nullptr || simulation->result.series.empty()) return 0;
  return static_cast<int32_t>(simulation->result.series[0].component.size());
}

dpf_status dpf_simulation_steps(const dpf_simulation* simulation, int32_t* out,
                                size_t capacity) {
  if (simulation == nullptr) return NullArg("simulation");
  if (out == nullptr) return NullArg("out");
  const auto& steps = simulation->result.steps;
  if (capacity < steps.size()) {
    return Fail(DPF_ERR_BUFFER_TOO_SMALL, "buffer too small");
  }
  std::copy(steps.begin(), steps.end(), out);
  return DPF_OK;
}

const char* dpf_simulation_series_name(const dpf_simulation* simulation,
                                       int32_t series) {
  if (simulation == nullptr || series < 0 ||
      series >= dpf_simulation_num_series(simulation)) {
    return nullptr;
  }
  return simulation->result.series[series].name.c_str();
}

dpf_status dpf_simulation_series_rmse(const dpf_simulation* simulation,
                                      int32_t series, double* out,
                                      size_t capacity) {
  if (simulation == nullptr) return NullArg("simulation");
  if (series < 0 || series >= dpf_simulation_num_series(simulation)) {
    return Fail(DPF_ERR_OUT_OF_RANGE, "series index out of range");
  }
  return CopyDoubles(simulation->result.series[series].rmse, out, capacity);
}

dpf_status dpf_simulation_series_component(const dpf_simulation* simulation,
                                           int32_t series, int32_t component,
                                           double* out, size_t capacity) {
  if (simulation == nullptr) return NullArg("simulation");
  if (series < 0 || series >= dpf_simulation_num_series(simulation)) {
    return Fail(DPF_ERR_OUT_OF_RANGE, "series index out of range");
  }
  const auto& s = simulation->result.series[series];
  if (component < 0 || static_cast<size_t>(component) >= s.component.size()) {
    return Fail(DPF_ERR_OUT_OF_RANGE, "component index out of range");
  }
  return CopyDoubles(s.component[component], out, capacity);
}

dpf_status dpf_simulation_series_summary(const dpf_simulation* simulation,
                                         int32_t series,
                                         dpf_steady_summary* out) {
  if (simulation == nullptr) return NullArg("simulation");
  if (out == nullptr) return NullArg("out");
  if (series < 0 || static_cast<size_t>(series) >= simulation->summary.size()) {
    return Fail(DPF_ERR_OUT_OF_RANGE, "series index out of range");
  }
  const dpfusion::SteadySummary& s = simulation->summary[series];
  out->steady_rmse = s.steady_rmse;
  out->std_error = s.std_error;
  out->steady_mse = s.steady_mse;
  out->predicted_mse = s.predicted_mse;
  return DPF_OK;
}

dpf_status dpf_simulation_privacy(const dpf_simulation* simulation,
                                  const dpf_privacy_report** out) {
  if (simulation == nullptr) return NullArg("simulation");
  if (out == nullptr) return NullArg("out");
  *out = simulation->privacy ? &*simulation->privacy : nullptr;
  return DPF_OK;
}

// ---- primitives ----------------------------------------------------------

dpf_status dpf_privacy_loss(const double* big_x, const double* x,
                            const double* p_i, const double* p_j, int32_t n,
                            double* out) {
  if (big_x == nullptr || x == nullptr || p_i == nullptr || p_j == nullptr ||
      out == nullptr) {
    return NullArg("argument");
  }
  if (n < 1) return Fail(DPF_ERR_INVALID_INPUT, "n must be >= 1");
  return Guard([&] {
    using RowMajor =
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Matrix mi = Eigen::Map<const RowMajor>(p_i, n, n);
    const Matrix mj = Eigen::Map<const RowMajor>(p_j, n, n);
    const dpfusion::Vector vx = Eigen::Map<const dpfusion::Vector>(big_x, n);
    const dpfusion::Vector vm = Eigen::Map<const dpfusion::Vector>(x, n);
    *out = dpfusion::PrivacyLoss(vx, vm, mi, mj);
    return DPF_OK;
  });
}

dpf_status dpf_exceedance_region_1d(double p_i, double p_j, double epsilon,
                                    double* out, size_t capacity,
                                    size_t* count) {
  return Guard([&] {
    const auto region = dpfusion::ExceedanceRegion1d(p_i, p_j, epsilon);
    if (count != nullptr) *count = region.size();
    if (out == nullptr) return DPF_OK;
    if (capacity < region.size()) {
      return Fail(DPF_ERR_BUFFER_TOO_SMALL, "buffer too small");
    }
    for (size_t k = 0; k < region.size(); ++k) {
      out[2 * k] = region[k].lower;
      out[2 * k + 1] = region[k].upper;
    }
    return DPF_OK;
  });
}

}  // extern "C"
