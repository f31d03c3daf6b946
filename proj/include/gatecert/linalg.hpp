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

#include <cmath>
#include <random>
#include <sstream>

#include "gatecert/common.hpp"

namespace gatecert {

// Largest entry of M + M^*; zero for an exactly skew-Hermitian matrix.
inline double skew_defect(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m + m.adjoint()).cwiseAbs().maxCoeff();
}

// Exponential family t -> e^{tM} of a fixed skew-Hermitian M, backed by one
// eigendecomposition of the Hermitian matrix iM.  Every value is of the
// form V diag(e^{-i theta t}) V^*, hence unitary by construction; reusing
// the factory across many t costs two matrix products per call.
class SkewExponential {
 public:
  explicit SkewExponential(const CMatrix& m) {
    if (m.rows() != m.cols())
      throw std::invalid_argument("SkewExponential: matrix must be square");
    if (skew_defect(m) > kSkewInputTol)
      throw std::invalid_argument("SkewExponential: input is not skew-Hermitian within tolerance");
    const CMatrix h = kImag * (0.5 * (m - m.adjoint()));  // Hermitian
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    if (es.info() != Eigen::Success)
      throw NumericalError("SkewExponential: eigendecomposition failed");
    frequencies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
  }

  Eigen::Index dim() const { return frequencies_.size(); }
  const RVector& frequencies() const { return frequencies_; }
  const CMatrix& eigenvectors() const { return vectors_; }

  // e^{tM} = V diag(e^{-i theta t}) V^*.
  CMatrix at(double t) const {
    CVector phases(frequencies_.size());
    for (Eigen::Index i = 0; i < frequencies_.size(); ++i)
      phases[i] = std::exp(Complex{0.0, -frequencies_[i] * t});
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
  }

 private:
  RVector frequencies_;  // eigenvalues of iM
  CMatrix vectors_;
};

// One-shot e^{tM} for skew-Hermitian M.
inline CMatrix expm_skew(const CMatrix& m, double t) { return SkewExponential(m).at(t); }

struct OpNormOptions {
  double rel_tol = kOpNormRelTol;
  int max_iter = 20000;
};

// Largest singular value by power iteration on M^*M, deterministic start
// vector, geometric-tail extrapolation as the stopping rule.
inline double op_norm(const CMatrix& m, const OpNormOptions& opts = {}) {
  if (m.size() == 0) return 0.0;
  if (m.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  std::mt19937_64 gen(0x5eedc0de5eedc0deULL);
  std::normal_distribution<double> dist(0.0, 1.0);
  CVector v(m.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = Complex(dist(gen), dist(gen));
  v.normalize();

  double sigma = 0.0;
  double prev_diff = -1.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    const CVector w = m * v;
    const double sigma_new = w.norm();
    if (sigma_new == 0.0) return 0.0;
    const double diff = sigma_new - sigma;
    if (it > 0) {
      if (diff <= 0.0) return sigma_new;  // fully converged, fp noise only
      if (it >= 4 && prev_diff > 0.0) {
        const double ratio = diff / prev_diff;
        // Remaining tail of the (approximately geometric) estimate series.
        if (ratio < 1.0 && diff * ratio / (1.0 - ratio) <= opts.rel_tol * sigma_new)
          return sigma_new;
      }
    }
    prev_diff = diff;
    sigma = sigma_new;
    CVector u = m.adjoint() * w;
    const double un = u.norm();
    if (un == 0.0) return sigma_new;
    v = u / un;
  }
  std::ostringstream msg;
  msg << "op_norm: no convergence after " << opts.max_iter
      << " iterations (estimate " << sigma << ", last step " << prev_diff << ")";
  throw NumericalError(msg.str());
}

// M * states with an explicit dimension check.
inline CMatrix apply(const CMatrix& m, const CMatrix& states) {
  if (m.cols() != states.rows())
    throw std::invalid_argument("apply: dimension mismatch");
  return m * states;
}

}  // namespace gatecert
