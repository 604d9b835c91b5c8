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

#ifndef DPFUSION_ERROR_HPP_
#define DPFUSION_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace dpfusion {

enum class ErrorCode {
  kInvalidInput,
  kSingularMatrix,
  kConvergenceFailure,
  kBudgetOutOfRange,
  kParseError,
};

// Every failure raised by the library carries one of the codes above. The C
// API maps them one-to-one onto dpf_status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& message)
      : Error(ErrorCode::kInvalidInput, message) {}
};

class SingularMatrix : public Error {
 public:
  SingularMatrix(const std::string& message, double condition_estimate)
      : Error(ErrorCode::kSingularMatrix, message),
        condition_estimate_(condition_estimate) {}

  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& message, double last_residual,
                     int iterations)
      : Error(ErrorCode::kConvergenceFailure, message),
        last_residual_(last_residual),
        iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

class BudgetOutOfRange : public Error {
 public:
  explicit BudgetOutOfRange(const std::string& message)
      : Error(ErrorCode::kBudgetOutOfRange, message) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message)
      : Error(ErrorCode::kParseError, message) {}
};

}  // namespace dpfusion

#endif  // DPFUSION_ERROR_HPP_
