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

#include "dpfusion/config.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <yaml-cpp/yaml.h>

#include "dpfusion/error.hpp"
#include "json.hpp"

namespace dpfusion {
namespace {

using Json = nlohmann::ordered_json;

std::string Join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void CheckKeys(const YAML::Node& node, const std::string& path,
               std::initializer_list<std::string_view> allowed) {
  if (!node.IsMap()) {
    throw ParseError((path.empty() ? "<root>" : path) + ": expected a mapping");
  }
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ParseError(Join(path, key) + ": unknown key");
    }
  }
}

template <typename T>
T As(const YAML::Node& node, const std::string& path, const char* what) {
  if (!node.IsScalar()) throw ParseError(path + ": expected " + what);
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ParseError(path + ": expected " + what);
  }
}

double Number(const YAML::Node& node, const std::string& path) {
  const double v = As<double>(node, path, "a number");
  if (!std::isfinite(v)) throw ParseError(path + ": must be finite");
  return v;
}

int PositiveInt(const YAML::Node& node, const std::string& path) {
  const auto v = As<long long>(node, path, "an integer");
  if (v <= 0 || v > 1'000'000'000) {
    throw ParseError(path + ": must be a positive integer");
  }
  return static_cast<int>(v);
}

Matrix ParseMatrix(const YAML::Node& node, const std::string& path) {
  if (node.IsScalar()) return Matrix::Constant(1, 1, Number(node, path));
  if (!node.IsSequence() || node.size() == 0) {
    throw ParseError(path + ": expected a number or a non-empty list of rows");
  }
  const auto rows = static_cast<Eigen::Index>(node.size());
  Eigen::Index cols = -1;
  Matrix m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const YAML::Node row = node[r];
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    if (!row.IsSequence() || row.size() == 0) {
      throw ParseError(row_path + ": expected a non-empty list of numbers");
    }
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError(row_path + ": ragged matrix row");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = Number(row[c], row_path + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

Vector ParseVector(const YAML::Node& node, const std::string& path) {
  if (node.IsScalar()) return Vector::Constant(1, Number(node, path));
  if (!node.IsSequence() || node.size() == 0) {
    throw ParseError(path + ": expected a number or a list of numbers");
  }
  Vector v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) =
        Number(node[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

std::vector<double> ParseList(const YAML::Node& node, const std::string& path) {
  const Vector v = ParseVector(node, path);
  return {v.data(), v.data() + v.size()};
}

const YAML::Node Required(const YAML::Node& parent, const std::string& path,
                          const char* key) {
  const YAML::Node child = parent[key];
  if (!child) throw ParseError(Join(path, key) + ": required field is missing");
  return child;
}

SystemModel ParseInlineModel(const YAML::Node& node, const std::string& path) {
  CheckKeys(node, path, {"A", "B", "Q_w", "sensors", "input", "initial_state"});
  SystemModel m;
  m.a = ParseMatrix(Required(node, path, "A"), Join(path, "A"));
  m.b = ParseMatrix(Required(node, path, "B"), Join(path, "B"));
  m.q_w = ParseMatrix(Required(node, path, "Q_w"), Join(path, "Q_w"));
  const YAML::Node sensors = Required(node, path, "sensors");
  const std::string spath = Join(path, "sensors");
  if (!sensors.IsSequence() || sensors.size() == 0) {
    throw ParseError(spath + ": expected a non-empty list of sensors");
  }
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const std::string p = spath + "[" + std::to_string(i) + "]";
    CheckKeys(sensors[i], p, {"C", "D", "Q_v"});
    SensorModel s;
    s.c = ParseMatrix(Required(sensors[i], p, "C"), Join(p, "C"));
    s.d = ParseMatrix(Required(sensors[i], p, "D"), Join(p, "D"));
    s.q_v = ParseMatrix(Required(sensors[i], p, "Q_v"), Join(p, "Q_v"));
    m.sensors.push_back(std::move(s));
  }
  if (node["input"]) m.input = ParseVector(node["input"], Join(path, "input"));
  if (node["initial_state"]) {
    m.initial_state =
        ParseVector(node["initial_state"], Join(path, "initial_state"));
  }
  try {
    CheckDimensions(m);
  } catch (const InvalidInput& e) {
    throw ParseError(path + ": " + e.what());
  }
  return m;
}

Scenario BuildOxygen(const YAML::Node& overrides, const std::string& path) {
  OxygenParams p;
  if (overrides && !overrides.IsNull()) {
    CheckKeys(overrides, path,
              {"q_w", "q_v", "shunt_fraction", "hemoglobin", "p_atm", "p_h2o",
               "mu", "rq", "fio2", "paco2"});
    auto num = [&](const char* key, double* out) {
      if (overrides[key]) *out = Number(overrides[key], Join(path, key));
    };
    num("q_w", &p.q_w);
    num("shunt_fraction", &p.shunt_fraction);
    num("hemoglobin", &p.hemoglobin);
    num("p_atm", &p.p_atm);
    num("p_h2o", &p.p_h2o);
    num("mu", &p.mu);
    num("rq", &p.rq);
    num("fio2", &p.fio2);
    num("paco2", &p.paco2);
    if (overrides["q_v"]) p.q_v = ParseList(overrides["q_v"], Join(path, "q_v"));
  }
  Scenario s;
  s.name = "oxygen";
  s.model = OxygenModel(p);
  s.budget = p.budget;
  return s;
}

Scenario BuildTracking(const YAML::Node& overrides, const std::string& path) {
  TrackingParams p;
  if (overrides && !overrides.IsNull()) {
    CheckKeys(overrides, path, {"q_w", "q_v", "sampling_time"});
    if (overrides["q_w"]) p.q_w = Number(overrides["q_w"], Join(path, "q_w"));
    if (overrides["sampling_time"]) {
      p.sampling_time =
          Number(overrides["sampling_time"], Join(path, "sampling_time"));
    }
    if (overrides["q_v"]) p.q_v = ParseList(overrides["q_v"], Join(path, "q_v"));
  }
  Scenario s;
  s.name = "tracking";
  s.model = TrackingModel(p);
  s.budget = p.budget;
  return s;
}

Scenario BuildBuiltin(std::string_view name, const YAML::Node& overrides,
                      const std::string& path) {
  if (name == "oxygen") return BuildOxygen(overrides, path);
  if (name == "tracking") return BuildTracking(overrides, path);
  throw ParseError("scenario.builtin: unknown built-in scenario '" +
                   std::string(name) + "' (expected oxygen or tracking)");
}

Json MatrixJson(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Json VectorJson(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

RunConfig ParseConfig(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ParseError(std::string("malformed YAML: ") + e.what());
  }
  if (!root || root.IsNull()) throw ParseError("configuration is empty");
  CheckKeys(root, "",
            {"config_version", "scenario", "budget", "mechanism", "solver",
             "simulation", "privacy_check"});
  const int version =
      static_cast<int>(As<long long>(Required(root, "", "config_version"),
                                     "config_version", "an integer"));
  if (version != kConfigVersion) {
    throw ParseError("config_version: unsupported version " +
                     std::to_string(version) + " (expected " +
                     std::to_string(kConfigVersion) + ")");
  }

  RunConfig config;
  const YAML::Node scen = Required(root, "", "scenario");
  CheckKeys(scen, "scenario", {"builtin", "overrides", "model"});
  const bool has_builtin = static_cast<bool>(scen["builtin"]);
  const bool has_model = static_cast<bool>(scen["model"]);
  if (has_builtin == has_model) {
    throw ParseError(
        "scenario: exactly one of 'builtin' or 'model' must be given");
  }
  if (has_builtin) {
    const auto name =
        As<std::string>(scen["builtin"], "scenario.builtin", "a name");
    config.scenario =
        BuildBuiltin(name, scen["overrides"], "scenario.overrides");
    config.source = "builtin:" + name;
  } else {
    if (scen["overrides"]) {
      throw ParseError(
          "scenario.overrides: only valid together with scenario.builtin");
    }
    config.scenario.name = "inline";
    config.scenario.model = ParseInlineModel(scen["model"], "scenario.model");
    config.source = "inline";
  }
  Scenario& s = config.scenario;

  if (const YAML::Node b = root["budget"]) {
    CheckKeys(b, "budget", {"epsilon", "delta"});
    s.budget.epsilon = Number(Required(b, "budget", "epsilon"), "budget.epsilon");
    s.budget.delta = Number(Required(b, "budget", "delta"), "budget.delta");
  } else if (has_model) {
    throw ParseError("budget: required field is missing for inline models");
  }

  if (const YAML::Node mech = root["mechanism"]) {
    CheckKeys(mech, "mechanism", {"zeta_margin", "q_a"});
    if (mech["zeta_margin"]) {
      s.zeta_margin = Number(mech["zeta_margin"], "mechanism.zeta_margin");
      if (s.zeta_margin < 0.0) {
        throw ParseError("mechanism.zeta_margin: must be >= 0");
      }
    }
    if (mech["q_a"]) {
      const double q = Number(mech["q_a"], "mechanism.q_a");
      if (q < 0.0) throw ParseError("mechanism.q_a: must be >= 0");
      s.forced_q_a = q;
    }
  }

  if (const YAML::Node solver = root["solver"]) {
    CheckKeys(solver, "solver", {"tol", "max_iter"});
    if (solver["tol"]) {
      s.solver.tol = Number(solver["tol"], "solver.tol");
      if (!(s.solver.tol > 0.0)) throw ParseError("solver.tol: must be > 0");
    }
    if (solver["max_iter"]) {
      s.solver.max_iter = PositiveInt(solver["max_iter"], "solver.max_iter");
    }
  }

  if (const YAML::Node sim = root["simulation"]) {
    CheckKeys(sim, "simulation",
              {"runs", "horizon", "burn_in", "seed", "threads"});
    if (sim["runs"]) s.runs = PositiveInt(sim["runs"], "simulation.runs");
    if (sim["horizon"]) {
      s.horizon = PositiveInt(sim["horizon"], "simulation.horizon");
    }
    if (sim["burn_in"]) {
      const auto v = As<long long>(sim["burn_in"], "simulation.burn_in",
                                   "an integer");
      if (v < 0) throw ParseError("simulation.burn_in: must be >= 0");
      s.burn_in = static_cast<int>(v);
    }
    if (sim["seed"]) {
      s.master_seed = As<std::uint64_t>(sim["seed"], "simulation.seed",
                                        "an unsigned 64-bit integer");
    }
    if (sim["threads"]) {
      s.threads = PositiveInt(sim["threads"], "simulation.threads");
    }
  }
  if (s.burn_in >= s.horizon) {
    throw ParseError("simulation.burn_in: must be smaller than horizon");
  }

  if (const YAML::Node pc = root["privacy_check"]) {
    CheckKeys(pc, "privacy_check", {"samples"});
    if (pc["samples"]) {
      const auto v = As<long long>(pc["samples"], "privacy_check.samples",
                                   "an integer");
      if (v != 0 && (v < kMinPrivacySamples || v > 1'000'000'000'000LL)) {
        throw ParseError("privacy_check.samples: must be 0 (skip) or >= " +
                         std::to_string(kMinPrivacySamples));
      }
      s.privacy_samples = v;
    }
  }
  return config;
}

RunConfig LoadConfigFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read configuration file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str());
}

RunConfig BuiltinConfig(std::string_view name) {
  RunConfig config;
  config.scenario = BuildBuiltin(name, YAML::Node(), "scenario.overrides");
  config.source = "builtin:" + std::string(name);
  return config;
}

std::string CanonicalDescription(const RunConfig& config) {
  const Scenario& s = config.scenario;
  Json model;
  model["A"] = MatrixJson(s.model.a);
  model["B"] = MatrixJson(s.model.b);
  model["Q_w"] = MatrixJson(s.model.q_w);
  model["input"] = VectorJson(s.model.InputAt(0));
  model["initial_state"] = VectorJson(s.model.InitialState());
  Json sensors = Json::array();
  for (const SensorModel& sensor : s.model.sensors) {
    sensors.push_back({{"C", MatrixJson(sensor.c)},
                       {"D", MatrixJson(sensor.d)},
                       {"Q_v", MatrixJson(sensor.q_v)}});
  }
  model["sensors"] = sensors;

  Json out;
  out["config_version"] = kConfigVersion;
  out["source"] = config.source;
  out["model"] = model;
  out["budget"] = {{"epsilon", s.budget.epsilon}, {"delta", s.budget.delta}};
  out["mechanism"] = {{"zeta_margin", s.zeta_margin},
                      {"q_a", s.forced_q_a ? Json(*s.forced_q_a) : Json()}};
  out["solver"] = {{"tol", s.solver.tol}, {"max_iter", s.solver.max_iter}};
  // threads is omitted; results do not depend on it.
  out["simulation"] = {{"runs", s.runs},
                       {"horizon", s.horizon},
                       {"burn_in", s.burn_in},
                       {"seed", s.master_seed}};
  out["privacy_check"] = {{"samples", s.privacy_samples}};
  return out.dump();
}

std::string ConfigHash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : CanonicalDescription(config)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dpfusion
