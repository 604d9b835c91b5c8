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

#ifndef DPFUSION_CONFIG_HPP_
#define DPFUSION_CONFIG_HPP_

#include <string>
#include <string_view>

#include "dpfusion/simulation.hpp"

namespace dpfusion {

inline constexpr int kConfigVersion = 1;

// A parsed run configuration. `scenario.plan` is left unresolved; calibration
// failures (budget ranges, solver convergence) surface when a command runs,
// not at parse time.
struct RunConfig {
  std::string source;  // "builtin:<name>" or "inline"
  Scenario scenario;
};

// Grammar: docs/config.md. All parse and type errors throw ParseError whose
// message names the offending key path.
RunConfig ParseConfig(std::string_view yaml_text);
RunConfig LoadConfigFile(const std::string& path);

// Built-in scenarios by name: "oxygen" or "tracking".
RunConfig BuiltinConfig(std::string_view name);

// Canonical JSON of everything that determines a command's numeric output.
// Equal descriptions imply byte-identical results.
std::string CanonicalDescription(const RunConfig& config);

// FNV-1a 64 over the canonical description, as 16 lowercase hex digits.
std::string ConfigHash(const RunConfig& config);

}  // namespace dpfusion

#endif  // DPFUSION_CONFIG_HPP_
