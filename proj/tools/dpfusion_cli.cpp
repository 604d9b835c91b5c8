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


// Command-line front end. Talks to the library only through dpfusion.h.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "dpfusion/dpfusion.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct CliExit {
  int code;
  std::string message;
};

[[noreturn]] void Raise(dpf_status status, const std::string& context) {
  const int code = status == DPF_ERR_PARSE ? kExitUsage : kExitDomain;
  throw CliExit{code, context + ": " + dpf_last_error()};
}

void Check(dpf_status status, const std::string& context) {
  if (status != DPF_OK) Raise(status, context);
}

// Overrides rejected by the library are usage errors.
void CheckOverride(dpf_status status, const std::string& flag) {
  if (status != DPF_OK) {
    throw CliExit{kExitUsage, flag + ": " + dpf_last_error()};
  }
}

struct ConfigDeleter {
  void operator()(dpf_config* p) const { dpf_config_free(p); }
};
struct CalibrationDeleter {
  void operator()(dpf_calibration* p) const { dpf_calibration_free(p); }
};
struct SimulationDeleter {
  void operator()(dpf_simulation* p) const { dpf_simulation_free(p); }
};
struct ReportDeleter {
  void operator()(dpf_privacy_report* p) const { dpf_privacy_report_free(p); }
};
using ConfigPtr = std::unique_ptr<dpf_config, ConfigDeleter>;
using CalibrationPtr = std::unique_ptr<dpf_calibration, CalibrationDeleter>;
using SimulationPtr = std::unique_ptr<dpf_simulation, SimulationDeleter>;
using ReportPtr = std::unique_ptr<dpf_privacy_report, ReportDeleter>;

struct Options {
  std::string config_path;
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<int> horizon;
  std::optional<int> threads;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<double> q_a;
  std::optional<double> zeta_margin;
  std::optional<std::int64_t> samples;
  std::string out_dir = ".";
};

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Json JsonDouble(double v) {
  if (std::isfinite(v)) return v;
  return FormatDouble(v);
}

// Run identity shared by every output file.
struct Provenance {
  std::string command;
  std::string scenario;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;

  std::string CsvComment() const {
    return "# dpfusion " + version + " command=" + command +
           " scenario=" + scenario + " config_hash=" + config_hash +
           " seed=" + std::to_string(seed) + "\n";
  }

  Json Header() const {
    Json j;
    j["tool"] = "dpfusion";
    j["version"] = version;
    j["command"] = command;
    j["scenario"] = scenario;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    return j;
  }
};

class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
      throw CliExit{kExitUsage,
                    "--out: cannot create directory " + dir_.string()};
    }
  }

  // Stages into a temporary sibling; Commit() renames every staged file.
  void Stage(const std::string& name, const std::string& content) {
    const fs::path tmp =
        dir_ / ("." + name + ".tmp." + std::to_string(::getpid()));
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    os << content;
    os.close();
    if (!os) {
      std::error_code ec;
      fs::remove(tmp, ec);
      Discard();
      throw CliExit{kExitDomain, "cannot write " + tmp.string()};
    }
    staged_.emplace_back(tmp, dir_ / name);
  }

  void Commit() {
    for (const auto& [tmp, final_path] : staged_) {
      std::error_code ec;
      fs::rename(tmp, final_path, ec);
      if (ec) {
        Discard();
        throw CliExit{kExitDomain, "cannot rename to " + final_path.string()};
      }
    }
    staged_.clear();
  }

  void Discard() {
    for (const auto& staged : staged_) {
      std::error_code ec;
      fs::remove(staged.first, ec);
    }
    staged_.clear();
  }

  ~OutputDir() { Discard(); }

  const fs::path& path() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::pair<fs::path, fs::path>> staged_;
};

ConfigPtr LoadConfig(const Options& o) {
  if (o.config_path.empty() == o.scenario.empty()) {
    throw CliExit{kExitUsage,
                  "exactly one of --config or --scenario is required"};
  }
  dpf_config* raw = nullptr;
  if (!o.config_path.empty()) {
    Check(dpf_config_load_file(o.config_path.c_str(), &raw), o.config_path);
  } else {
    const dpf_status st = dpf_config_builtin(o.scenario.c_str(), &raw);
    if (st != DPF_OK) {
      throw CliExit{kExitUsage, std::string("--scenario: ") + dpf_last_error()};
    }
  }
  ConfigPtr cfg(raw);
  if (o.seed) CheckOverride(dpf_config_set_seed(raw, *o.seed), "--seed");
  if (o.runs) CheckOverride(dpf_config_set_runs(raw, *o.runs), "--runs");
  if (o.horizon) {
    CheckOverride(dpf_config_set_horizon(raw, *o.horizon), "--horizon");
  }
  if (o.threads) {
    CheckOverride(dpf_config_set_threads(raw, *o.threads), "--threads");
  }
  if (o.epsilon || o.delta) {
    dpf_run_settings s;
    Check(dpf_config_get_settings(raw, &s), "settings");
    CheckOverride(dpf_config_set_budget(raw, o.epsilon.value_or(s.epsilon),
                                        o.delta.value_or(s.delta)),
                  "--epsilon/--delta");
  }
  if (o.zeta_margin) {
    CheckOverride(dpf_config_set_zeta_margin(raw, *o.zeta_margin),
                  "--zeta-margin");
  }
  if (o.q_a) CheckOverride(dpf_config_set_forced_q_a(raw, *o.q_a), "--q-a");
  if (o.samples) {
    CheckOverride(dpf_config_set_privacy_samples(raw, *o.samples),
                  "--samples");
  }
  return cfg;
}

std::string ConfigString(const dpf_config* cfg,
                         dpf_status (*getter)(const dpf_config*, char*, size_t,
                                              size_t*)) {
  size_t needed = 0;
  Check(getter(cfg, nullptr, 0, &needed), "config");
  std::string s(needed, '\0');
  Check(getter(cfg, s.data(), s.size(), &needed), "config");
  s.resize(needed - 1);
  return s;
}

Provenance MakeProvenance(const std::string& command, const dpf_config* cfg) {
  Provenance p;
  p.command = command;
  p.scenario = ConfigString(cfg, dpf_config_name);
  char hash[17];
  Check(dpf_config_hash(cfg, hash), "config hash");
  p.config_hash = hash;
  dpf_run_settings s;
  Check(dpf_config_get_settings(cfg, &s), "settings");
  p.seed = s.seed;
  p.version = dpf_version();
  return p;
}

Json SettingsJson(const dpf_config* cfg) {
  dpf_run_settings s;
  Check(dpf_config_get_settings(cfg, &s), "settings");
  Json j;
  j["state_dim"] = s.state_dim;
  j["num_sensors"] = s.num_sensors;
  j["epsilon"] = s.epsilon;
  j["delta"] = s.delta;
  j["zeta_margin"] = s.zeta_margin;
  j["forced_q_a"] = s.has_forced_q_a ? Json(s.forced_q_a) : Json();
  j["runs"] = s.runs;
  j["horizon"] = s.horizon;
  j["burn_in"] = s.burn_in;
  j["privacy_samples"] = s.privacy_samples;
  return j;
}

std::string WriteJson(const Json& j) { return j.dump(2) + "\n"; }

struct MatrixCopy {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  Json ToJson() const {
    Json m = Json::array();
    for (int r = 0; r < rows; ++r) {
      Json row = Json::array();
      for (int c = 0; c < cols; ++c) row.push_back(values[r * cols + c]);
      m.push_back(row);
    }
    return m;
  }
};

MatrixCopy GetMatrix(const dpf_calibration* cal, dpf_matrix_id id, int i,
                     int j) {
  MatrixCopy m;
  Check(dpf_calibration_matrix(cal, id, i, j, nullptr, 0, &m.rows, &m.cols),
        "calibration matrix");
  m.values.resize(static_cast<size_t>(m.rows) * m.cols);
  Check(dpf_calibration_matrix(cal, id, i, j, m.values.data(), m.values.size(),
                               &m.rows, &m.cols),
        "calibration matrix");
  return m;
}

const char* KindName(dpf_mechanism_kind kind) {
  return kind == DPF_MECHANISM_INTRINSIC ? "intrinsic" : "gaussian";
}

Json CalibrationSummaryJson(const dpf_calibration_summary& s) {
  Json j;
  j["profile"] = {{"delta2", s.delta2},
                  {"p_min", s.p_min},
                  {"p_max", s.p_max},
                  {"intrinsic_threshold", s.threshold}};
  j["plan"] = {{"kind", KindName(s.kind)},
               {"q_a", s.q_a},
               {"zeta", s.zeta},
               {"zeta_bound", s.zeta_bound}};
  j["applied_q_a"] = s.applied_q_a;
  j["residuals"] = {{"riccati", s.max_riccati_residual},
                    {"cross_covariance", s.max_cross_residual}};
  j["fused_trace"] = s.fused_trace;
  j["perturbed_fused_trace"] = s.perturbed_fused_trace;
  j["weights_jittered"] = s.weights_jittered != 0;
  return j;
}

// ---- validate --------------------------------------------------------------

int RunValidate(const Options& o) {
  ConfigPtr cfg = LoadConfig(o);
  const Provenance prov = MakeProvenance("validate", cfg.get());
  dpf_validation_report r;
  size_t needed = 0;
  Check(dpf_validate(cfg.get(), &r, nullptr, 0, &needed), "validate");
  std::string issues(needed, '\0');
  Check(dpf_validate(cfg.get(), &r, issues.data(), issues.size(), &needed),
        "validate");
  issues.resize(needed - 1);

  Json j = prov.Header();
  j["state_dim"] = r.state_dim;
  j["num_sensors"] = r.num_sensors;
  j["controllability_rank"] = r.controllability_rank;
  j["observability_rank"] = r.observability_rank;
  j["process_noise_psd"] = r.process_noise_psd != 0;
  j["measurement_noise_psd"] = r.measurement_noise_psd != 0;
  j["effective_noise_full_rank"] = r.effective_noise_full_rank != 0;
  j["accepted"] = r.accepted != 0;
  Json list = Json::array();
  std::istringstream is(issues);
  for (std::string line; std::getline(is, line);) list.push_back(line);
  j["issues"] = list;

  OutputDir out(o.out_dir);
  out.Stage("validation.json", WriteJson(j));
  out.Commit();

  std::cout << "model " << (r.accepted ? "accepted" : "rejected")
            << ": n_x=" << r.state_dim << " sensors=" << r.num_sensors
            << " ctrb_rank=" << r.controllability_rank
            << " obsv_rank=" << r.observability_rank << "\n";
  for (const auto& issue : list) {
    std::cout << "  issue: " << issue.get<std::string>() << "\n";
  }
  if (!r.accepted) {
    throw CliExit{kExitDomain, "model rejected"};
  }
  return kExitOk;
}

// ---- calibrate -------------------------------------------------------------

int RunCalibrate(const Options& o) {
  ConfigPtr cfg = LoadConfig(o);
  const Provenance prov = MakeProvenance("calibrate", cfg.get());
  dpf_calibration* raw = nullptr;
  Check(dpf_calibrate(cfg.get(), &raw), "calibrate");
  CalibrationPtr cal(raw);
  dpf_calibration_summary s;
  Check(dpf_calibration_get_summary(cal.get(), &s), "calibrate");

  Json j = prov.Header();
  j["settings"] = SettingsJson(cfg.get());
  const Json summary = CalibrationSummaryJson(s);
  for (const auto& [k, v] : summary.items()) j[k] = v;

  std::string csv = prov.CsvComment();
  csv += "matrix,i,j,row,col,value\n";
  auto emit = [&](const char* name, dpf_matrix_id id, int i, int jj,
                  bool has_i, bool has_j) {
    const MatrixCopy m = GetMatrix(cal.get(), id, i, jj);
    for (int r = 0; r < m.rows; ++r) {
      for (int c = 0; c < m.cols; ++c) {
        csv += name;
        csv += ",";
        csv += has_i ? std::to_string(i + 1) : "";
        csv += ",";
        csv += has_j ? std::to_string(jj + 1) : "";
        csv += "," + std::to_string(r) + "," + std::to_string(c) + "," +
               FormatDouble(m.values[r * m.cols + c]) + "\n";
      }
    }
    return m;
  };
  Json sensors = Json::array();
  for (int i = 0; i < s.num_sensors; ++i) {
    Json sj;
    sj["sensor"] = i + 1;
    sj["p_pred"] = emit("p_pred", DPF_MATRIX_P_PRED, i, 0, true, false).ToJson();
    sj["gain"] = emit("gain", DPF_MATRIX_GAIN, i, 0, true, false).ToJson();
    sj["p_est"] = emit("p_est", DPF_MATRIX_P_EST, i, 0, true, false).ToJson();
    sj["weight"] = emit("weight", DPF_MATRIX_WEIGHT, i, 0, true, false).ToJson();
    sj["perturbed_weight"] =
        emit("perturbed_weight", DPF_MATRIX_PERTURBED_WEIGHT, i, 0, true, false)
            .ToJson();
    sensors.push_back(sj);
  }
  for (int i = 0; i < s.num_sensors; ++i) {
    for (int jj = 0; jj < s.num_sensors; ++jj) {
      emit("cross", DPF_MATRIX_CROSS, i, jj, true, true);
    }
  }
  j["sensors"] = sensors;
  j["fused_cov"] =
      emit("fused_cov", DPF_MATRIX_FUSED_COV, 0, 0, false, false).ToJson();
  j["perturbed_fused_cov"] = emit("perturbed_fused_cov",
                                  DPF_MATRIX_PERTURBED_FUSED_COV, 0, 0, false,
                                  false)
                                 .ToJson();

  OutputDir out(o.out_dir);
  out.Stage("calibration.csv", csv);
  out.Stage("calibration.json", WriteJson(j));
  out.Commit();

  std::cout << "delta2=" << FormatDouble(s.delta2)
            << " p_min=" << FormatDouble(s.p_min)
            << " p_max=" << FormatDouble(s.p_max)
            << " threshold=" << FormatDouble(s.threshold) << "\n"
            << "mechanism=" << KindName(s.kind)
            << " q_a=" << FormatDouble(s.q_a)
            << " zeta=" << FormatDouble(s.zeta)
            << " applied_q_a=" << FormatDouble(s.applied_q_a) << "\n";
  return kExitOk;
}

// ---- privacy ---------------------------------------------------------------

struct PrivacyOutputs {
  Json json;
  std::string csv;
  std::string regions_csv;
  bool pass = false;
  double max_fraction = 0.0;
  double limit = 0.0;
};

PrivacyOutputs DescribePrivacy(const dpf_privacy_report* report,
                               const Provenance& prov, bool scalar) {
  dpf_privacy_summary s;
  Check(dpf_privacy_get_summary(report, &s), "privacy");
  PrivacyOutputs out;
  out.pass = s.pass != 0;
  out.max_fraction = s.max_fraction;
  out.limit = s.limit;
  out.json["samples"] = s.samples;
  out.json["epsilon"] = s.epsilon;
  out.json["delta"] = s.delta;
  out.json["q_a"] = s.q_a;
  out.json["max_fraction"] = s.max_fraction;
  out.json["limit"] = s.limit;
  out.json["pass"] = out.pass;
  out.csv = prov.CsvComment() +
            "sensor_i,sensor_j,samples,exceedances,fraction,"
            "analytic_fraction,limit,within_limit\n";
  out.regions_csv = prov.CsvComment() + "sensor_i,sensor_j,lower,upper\n";
  Json pairs = Json::array();
  for (int k = 0; k < s.num_pairs; ++k) {
    dpf_pair_exceedance p;
    Check(dpf_privacy_get_pair(report, k, &p), "privacy");
    const bool ok = p.fraction <= s.limit;
    out.csv += std::to_string(p.i + 1) + "," + std::to_string(p.j + 1) + "," +
               std::to_string(p.samples) + "," +
               std::to_string(p.exceedances) + "," + FormatDouble(p.fraction) +
               "," + FormatDouble(p.analytic_fraction) + "," +
               FormatDouble(s.limit) + "," + (ok ? "1" : "0") + "\n";
    Json pj;
    pj["sensor_i"] = p.i + 1;
    pj["sensor_j"] = p.j + 1;
    pj["exceedances"] = p.exceedances;
    pj["fraction"] = p.fraction;
    if (scalar) {
      pj["analytic_fraction"] = JsonDouble(p.analytic_fraction);
      size_t count = 0;
      Check(dpf_privacy_pair_regions(report, k, nullptr, 0, &count),
            "privacy");
      std::vector<double> bounds(2 * count);
      Check(dpf_privacy_pair_regions(report, k, bounds.data(), count, &count),
            "privacy");
      Json region = Json::array();
      for (size_t r = 0; r < count; ++r) {
        region.push_back({JsonDouble(bounds[2 * r]),
                          JsonDouble(bounds[2 * r + 1])});
        out.regions_csv += std::to_string(p.i + 1) + "," +
                           std::to_string(p.j + 1) + "," +
                           FormatDouble(bounds[2 * r]) + "," +
                           FormatDouble(bounds[2 * r + 1]) + "\n";
      }
      pj["exceedance_region"] = region;
    }
    pairs.push_back(pj);
  }
  out.json["pairs"] = pairs;
  return out;
}

int RunPrivacyCheck(const Options& o) {
  ConfigPtr cfg = LoadConfig(o);
  const Provenance prov = MakeProvenance("privacy-check", cfg.get());
  dpf_privacy_report* raw = nullptr;
  Check(dpf_privacy_check(cfg.get(), nullptr, &raw), "privacy-check");
  ReportPtr report(raw);
  dpf_run_settings settings;
  Check(dpf_config_get_settings(cfg.get(), &settings), "settings");
  const PrivacyOutputs p =
      DescribePrivacy(report.get(), prov, settings.state_dim == 1);

  Json j = prov.Header();
  j["settings"] = SettingsJson(cfg.get());
  j["informational"] = settings.has_forced_q_a != 0;
  for (const auto& [k, v] : p.json.items()) j[k] = v;

  OutputDir out(o.out_dir);
  out.Stage("privacy.csv", p.csv);
  if (settings.state_dim == 1) out.Stage("privacy_regions.csv", p.regions_csv);
  out.Stage("privacy.json", WriteJson(j));
  out.Commit();

  std::cout << "max exceedance fraction=" << FormatDouble(p.max_fraction)
            << " limit=" << FormatDouble(p.limit) << " verdict="
            << (p.pass ? "pass" : "fail") << "\n";
  if (!p.pass) throw CliExit{kExitDomain, "privacy verdict: fail"};
  return kExitOk;
}

// ---- simulate --------------------------------------------------------------

int RunSimulate(const Options& o) {
  ConfigPtr cfg = LoadConfig(o);
  const Provenance prov = MakeProvenance("simulate", cfg.get());
  dpf_calibration* raw_cal = nullptr;
  Check(dpf_calibrate(cfg.get(), &raw_cal), "calibrate");
  CalibrationPtr cal(raw_cal);
  dpf_simulation* raw_sim = nullptr;
  Check(dpf_simulate(cfg.get(), cal.get(), &raw_sim), "simulate");
  SimulationPtr sim(raw_sim);

  const int steps = dpf_simulation_num_steps(sim.get());
  const int nseries = dpf_simulation_num_series(sim.get());
  const int dim = dpf_simulation_state_dim(sim.get());
  std::vector<int32_t> step_ids(steps);
  Check(dpf_simulation_steps(sim.get(), step_ids.data(), step_ids.size()),
        "simulate");
  std::vector<std::string> names;
  std::vector<std::vector<double>> rmse(nseries, std::vector<double>(steps));
  std::vector<std::vector<std::vector<double>>> comp(
      nseries, std::vector<std::vector<double>>(dim, std::vector<double>(steps)));
  for (int s = 0; s < nseries; ++s) {
    names.emplace_back(dpf_simulation_series_name(sim.get(), s));
    Check(dpf_simulation_series_rmse(sim.get(), s, rmse[s].data(), steps),
          "simulate");
    for (int c = 0; c < dim; ++c) {
      Check(dpf_simulation_series_component(sim.get(), s, c, comp[s][c].data(),
                                            steps),
            "simulate");
    }
  }

  std::string rmse_csv = prov.CsvComment() + "step";
  std::string comp_csv = prov.CsvComment() + "step";
  for (int s = 0; s < nseries; ++s) {
    rmse_csv += "," + names[s];
    for (int c = 0; c < dim; ++c) {
      comp_csv += "," + names[s] + "_x" + std::to_string(c);
    }
  }
  rmse_csv += "\n";
  comp_csv += "\n";
  for (int k = 0; k < steps; ++k) {
    rmse_csv += std::to_string(step_ids[k]);
    comp_csv += std::to_string(step_ids[k]);
    for (int s = 0; s < nseries; ++s) {
      rmse_csv += "," + FormatDouble(rmse[s][k]);
      for (int c = 0; c < dim; ++c) {
        comp_csv += "," + FormatDouble(comp[s][c][k]);
      }
    }
    rmse_csv += "\n";
    comp_csv += "\n";
  }

  std::string summary_csv =
      prov.CsvComment() +
      "series,steady_rmse,std_error,steady_mse,predicted_mse\n";
  Json summary = Json::array();
  for (int s = 0; s < nseries; ++s) {
    dpf_steady_summary ss;
    Check(dpf_simulation_series_summary(sim.get(), s, &ss), "simulate");
    summary_csv += names[s] + "," + FormatDouble(ss.steady_rmse) + "," +
                   FormatDouble(ss.std_error) + "," +
                   FormatDouble(ss.steady_mse) + "," +
                   FormatDouble(ss.predicted_mse) + "\n";
    summary.push_back({{"series", names[s]},
                       {"steady_rmse", ss.steady_rmse},
                       {"std_error", ss.std_error},
                       {"steady_mse", ss.steady_mse},
                       {"predicted_mse", ss.predicted_mse}});
    std::cout << names[s] << ": steady_rmse=" << FormatDouble(ss.steady_rmse)
              << " (se " << FormatDouble(ss.std_error)
              << ") predicted=" << FormatDouble(std::sqrt(ss.predicted_mse))
              << "\n";
  }

  dpf_calibration_summary cs;
  Check(dpf_calibration_get_summary(cal.get(), &cs), "calibrate");
  Json j = prov.Header();
  j["settings"] = SettingsJson(cfg.get());
  j["calibration"] = CalibrationSummaryJson(cs);
  j["steps"] = {{"first", steps > 0 ? step_ids.front() : 0},
                {"last", steps > 0 ? step_ids.back() : 0}};
  j["summary"] = summary;
  const dpf_privacy_report* privacy = nullptr;
  Check(dpf_simulation_privacy(sim.get(), &privacy), "simulate");
  if (privacy != nullptr) {
    j["privacy"] = DescribePrivacy(privacy, prov, cs.state_dim == 1).json;
  } else {
    j["privacy"] = nullptr;
  }

  OutputDir out(o.out_dir);
  out.Stage("rmse.csv", rmse_csv);
  out.Stage("rmse_components.csv", comp_csv);
  out.Stage("summary.csv", summary_csv);
  out.Stage("simulate.json", WriteJson(j));
  out.Commit();
  return kExitOk;
}

// ---- report ----------------------------------------------------------------

int RunReport(const Options& o) {
  const fs::path dir(o.out_dir);
  const char* inputs[] = {"validation.json", "calibration.json",
                          "simulate.json", "privacy.json"};
  Json sections;
  std::optional<std::string> hash;
  std::optional<std::uint64_t> seed;
  std::string scenario;
  for (const char* name : inputs) {
    const fs::path path = dir / name;
    if (!fs::exists(path)) continue;
    std::ifstream is(path);
    Json doc = Json::parse(is, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("config_hash")) {
      throw CliExit{kExitDomain, path.string() + ": not a dpfusion output"};
    }
    const std::string h = doc["config_hash"].get<std::string>();
    const std::uint64_t sd = doc["seed"].get<std::uint64_t>();
    if (hash && (*hash != h || *seed != sd)) {
      throw CliExit{kExitDomain, path.string() +
                                     ": config hash or seed differs from "
                                     "other outputs"};
    }
    hash = h;
    seed = sd;
    scenario = doc.value("scenario", "");
    const std::string key = doc["command"].get<std::string>();
    doc.erase("tool");
    doc.erase("version");
    doc.erase("config_hash");
    doc.erase("seed");
    doc.erase("scenario");
    doc.erase("command");
    sections[key] = doc;
  }
  if (!hash) {
    throw CliExit{kExitDomain, "no command outputs found in " + dir.string()};
  }
  if (!o.config_path.empty() || !o.scenario.empty()) {
    ConfigPtr cfg = LoadConfig(o);
    const Provenance prov = MakeProvenance("report", cfg.get());
    if (prov.config_hash != *hash || prov.seed != *seed) {
      throw CliExit{kExitDomain,
                    "outputs in " + dir.string() +
                        " were produced by a different configuration"};
    }
  }
  Provenance prov;
  prov.command = "report";
  prov.scenario = scenario;
  prov.config_hash = *hash;
  prov.seed = *seed;
  prov.version = dpf_version();
  Json j = prov.Header();
  Json verdicts;
  if (sections.contains("validate")) {
    verdicts["model_accepted"] = sections["validate"]["accepted"];
  }
  if (sections.contains("calibrate")) {
    verdicts["mechanism"] = sections["calibrate"]["plan"]["kind"];
    verdicts["applied_q_a"] = sections["calibrate"]["applied_q_a"];
  }
  if (sections.contains("simulate")) {
    const Json& summary = sections["simulate"]["summary"];
    double fused = 0.0;
    double best_local = INFINITY;
    double fused_se = 0.0;
    for (const Json& row : summary) {
      const std::string name = row["series"].get<std::string>();
      const double v = row["steady_rmse"].get<double>();
      if (name == "fused") {
        fused = v;
        fused_se = row["std_error"].get<double>();
      } else if (name.rfind("local_", 0) == 0) {
        best_local = std::min(best_local, v);
      }
    }
    verdicts["fused_not_worse_than_locals"] = fused <= best_local + fused_se;
  }
  if (sections.contains("privacy-check")) {
    verdicts["privacy_pass"] = sections["privacy-check"]["pass"];
  }
  j["verdicts"] = verdicts;
  j["sections"] = sections;

  OutputDir out(dir);
  out.Stage("report.json", WriteJson(j));
  out.Commit();
  std::cout << verdicts.dump(2) << "\n";
  return kExitOk;
}

void AddFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "YAML configuration file");
  cmd->add_option("--scenario", o.scenario,
                  "built-in scenario instead of --config")
      ->check(CLI::IsMember({"oxygen", "tracking"}));
  cmd->add_option("--out", o.out_dir, "output directory")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--runs", o.runs, "Monte Carlo runs");
  cmd->add_option("--horizon", o.horizon, "time steps per run");
  cmd->add_option("--threads", o.threads, "worker threads");
  cmd->add_option("--epsilon", o.epsilon, "privacy budget epsilon");
  cmd->add_option("--delta", o.delta, "privacy budget delta");
  cmd->add_option("--zeta-margin", o.zeta_margin,
                  "margin added to the minimal zeta");
  cmd->add_option("--q-a", o.q_a, "force the injected noise variance");
  cmd->add_option("--samples", o.samples, "privacy check samples");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dpfusion: differentially private multi-sensor fusion"};
  app.set_version_flag("--version", std::string(dpf_version()));
  app.require_subcommand(1);
  Options o;
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Command commands[] = {
      {"validate", "check model dimensions, rank and noise conditions",
       RunValidate},
      {"calibrate", "solve steady-state covariances and plan the mechanism",
       RunCalibrate},
      {"simulate", "Monte Carlo RMSE of local, fused and perturbed estimates",
       RunSimulate},
      {"privacy-check", "empirical exceedance of the privacy loss",
       RunPrivacyCheck},
      {"report", "aggregate prior outputs in --out into report.json",
       RunReport},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    AddFlags(sub, o);
    subs.emplace_back(sub, &c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  for (const auto& [sub, cmd] : subs) {
    if (!sub->parsed()) continue;
    try {
      return cmd->run(o);
    } catch (const CliExit& e) {
      std::cerr << "dpfusion " << cmd->name << ": " << e.message << "\n";
      return e.code;
    } catch (const std::exception& e) {
      std::cerr << "dpfusion " << cmd->name << ": " << e.what() << "\n";
      return kExitDomain;
    }
  }
  return kExitUsage;
}
