// Copyright 2026 The atomlaser Authors
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

#ifndef ATOMLASER_COMMON_HPP_
#define ATOMLASER_COMMON_HPP_

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace atomlaser {

inline constexpr const char* kVersion = "1.0.0";

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Reduced Planck constant [J s].
inline constexpr double kHbar = 1.054571817e-34;

// Error hierarchy. Configuration problems and numerical failures are kept
// apart so the command line tool can map them onto distinct exit codes.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A grid too coarse to resolve a feature it must carry.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Base class for failures of the time integration.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Step size outside the stability region, or detected norm blow-up.
class StepSizeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Bad configuration file or value. `key()` names the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace atomlaser

#endif  // ATOMLASER_COMMON_HPP_
