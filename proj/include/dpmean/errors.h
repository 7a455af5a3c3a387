// Copyright 2026 The dpmean Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPMEAN_ERRORS_H_
#define DPMEAN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dpmean {

// Errors caused by bad inputs or configuration. The CLI maps these to exit
// code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParameterError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InputError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Raised when an operation is asked for a composition mode or mechanism it
// cannot provide (advanced composition with mixed epsilons, Gaussian noise at
// delta = 0).
class ModeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Cover enumeration that would not fit in memory or time.
class ScaleError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Errors raised while running a valid request. Exit code 1.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EstimationFailed : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class IoError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

}  // namespace dpmean

#endif  // DPMEAN_ERRORS_H_
