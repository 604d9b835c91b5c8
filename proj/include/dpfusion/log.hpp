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

#ifndef DPFUSION_LOG_HPP_
#define DPFUSION_LOG_HPP_

#include <functional>
#include <string_view>

namespace dpfusion {

using WarningSink = std::function<void(std::string_view)>;

// Replaces the warning sink (default: one line on stderr). Returns the
// previous sink. Not synchronized; install sinks before starting work.
WarningSink SetWarningSink(WarningSink sink);

void Warn(std::string_view message);

}  // namespace dpfusion

#endif  // DPFUSION_LOG_HPP_
