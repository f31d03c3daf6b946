// Copyright 2026 The gatecert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gatecert {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr Complex kImag{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

// Project-wide numerical tolerances. Certificates and reports quote these
// values; change them here and nowhere else.
inline constexpr double kUnitarityTol = 1e-10;   // ||U U^* - I|| for exact-arithmetic unitaries
inline constexpr double kOpNormRelTol = 1e-8;    // relative accuracy of power-iteration norms
inline constexpr double kSkewInputTol = 1e-10;   // accepted skew-Hermitian defect of exponential inputs
inline constexpr double kSkewBuildTol = 1e-12;   // skew defect of matrices we assemble ourselves
inline constexpr double kStateNormTol = 1e-8;    // norm drift allowed for propagated states

// Raised when a computation leaves the domain where results are trustworthy
// (failed eigendecomposition, non-convergent iteration, non-finite values).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Raised for malformed scenario configs and CLI inputs.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gatecert
