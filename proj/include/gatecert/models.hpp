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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "gatecert/common.hpp"

namespace gatecert {

enum class ModelKind { PerturbedOscillator, PotentialWell };

// One of the two concrete systems: a harmonic oscillator perturbed by the
// inverse of its drift operator, or a particle in a box of width pi.  The
// model is fully described by its eigenvalue sequence and the matrix
// elements of the coupling operator B; both are generated on demand.
struct QuantumModel {
  ModelKind kind = ModelKind::PerturbedOscillator;
  // Perturbation strength of the oscillator drift (ignored by the well).
  double eta = 0.0;
  // Multiplier applied to every eigenvalue.  Convention knob: the well's
  // gate scenarios drive at integer frequencies, which are resonant with
  // the k^2 spectrum (scale 2) rather than the k^2/2 one (scale 1).
  double eigenvalue_scale = 1.0;

  static QuantumModel oscillator(double eta = 0.0, double scale = 1.0) {
    return QuantumModel{ModelKind::PerturbedOscillator, eta, scale};
  }
  static QuantumModel well(double scale = 1.0) {
    return QuantumModel{ModelKind::PotentialWell, 0.0, scale};
  }

  // Operator-norm bound on B used by certificates: pi for the well
  // (multiplication by x on (0, pi)); the oscillator's B is unbounded.
  std::optional<double> b_norm_bound() const {
    if (kind == ModelKind::PotentialWell) return kPi;
    return std::nullopt;
  }
};

// n-th eigenvalue of the drift operator modulus the -i factor, n >= 1.
// Oscillator: (n - 1/2) + eta/(n - 1/2).  Well: n^2/2.  Both times
// eigenvalue_scale.
inline double eigenvalue(const QuantumModel& model, long n) {
  if (n < 1) throw std::domain_error("eigenvalue: level index must be >= 1");
  if (model.kind == ModelKind::PerturbedOscillator) {
    const double base = static_cast<double>(n) - 0.5;
    return model.eigenvalue_scale * (base + model.eta / base);
  }
  const double nd = static_cast<double>(n);
  return model.eigenvalue_scale * (nd * nd / 2.0);
}

// Coupling element <phi_j, B phi_k>.  The assembled matrix is
// skew-Hermitian: coupling(j,k) = -conj(coupling(k,j)) exactly.
//
// Oscillator: tri-diagonal, -i sqrt(k-1) on j = k-1 and -i sqrt(k) on
// j = k+1.  Well: nonzero only for odd j-k, where the classical table
// value (-1)^{j+k} 2jk/(j^2-k^2)^2 is real; we store i times it so that
// B itself is skew-adjoint.
inline Complex coupling(const QuantumModel& model, long j, long k) {
  if (j < 1 || k < 1) throw std::domain_error("coupling: level indices must be >= 1");
  if (model.kind == ModelKind::PerturbedOscillator) {
    if (j == k - 1) return -kImag * std::sqrt(static_cast<double>(k - 1));
    if (j == k + 1) return -kImag * std::sqrt(static_cast<double>(k));
    return Complex{0.0, 0.0};
  }
  if (((j - k) & 1L) == 0) return Complex{0.0, 0.0};
  const double jd = static_cast<double>(j);
  const double kd = static_cast<double>(k);
  const double diff = jd * jd - kd * kd;
  const double sign = ((j + k) & 1L) ? -1.0 : 1.0;  // j+k odd here, so -1
  return kImag * (sign * 2.0 * jd * kd / (diff * diff));
}

// A coupled pair whose spectral gap collides with a chain pair's gap.
struct ResonanceViolation {
  std::pair<long, long> chain_pair;
  std::pair<long, long> coupled_pair;
  double gap = 0.0;  // |lambda_{t1} - lambda_{t2}| of the colliding pair
};

struct ChainReport {
  std::vector<std::pair<long, long>> chain;
  bool couples_all = false;
  std::vector<ResonanceViolation> resonance_violations;
  bool non_resonant() const { return resonance_violations.empty(); }
};

// The ladder chain {(n, n+1) : 1 <= n < depth}.
inline std::vector<std::pair<long, long>> adjacent_chain(long depth) {
  std::vector<std::pair<long, long>> chain;
  chain.reserve(depth > 1 ? static_cast<std::size_t>(depth - 1) : 0);
  for (long n = 1; n < depth; ++n) chain.emplace_back(n, n + 1);
  return chain;
}

// Checks, on the depth-dimensional truncation, that the chain links every
// pair of levels through nonzero couplings, and lists every coupled pair
// whose gap replicates a chain gap within tol (the chain pair itself and
// its mirror are excluded).  Links are treated as undirected: |b_jk| and
// |b_kj| vanish together.
inline ChainReport check_chain(const QuantumModel& model,
                               const std::vector<std::pair<long, long>>& chain,
                               long depth, double tol) {
  if (depth < 2) throw std::domain_error("check_chain: depth must be >= 2");
  if (!(tol > 0.0)) throw std::domain_error("check_chain: tol must be positive");

  ChainReport report;
  report.chain = chain;

  // Connectivity via union-find over levels 1..depth.
  std::vector<long> parent(static_cast<std::size_t>(depth) + 1);
  std::iota(parent.begin(), parent.end(), 0L);
  auto find = [&parent](long x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (const auto& [a, b] : chain) {
    if (a < 1 || b < 1 || a > depth || b > depth || a == b) continue;
    if (coupling(model, a, b) == Complex{0.0, 0.0}) continue;
    parent[static_cast<std::size_t>(find(a))] = find(b);
  }
  report.couples_all = !chain.empty();
  for (long lvl = 2; lvl <= depth; ++lvl) {
    if (find(lvl) != find(1)) {
      report.couples_all = false;
      break;
    }
  }

  // Gap collisions.  Coupled pairs are enumerated once with t1 < t2.
  for (const auto& [s1, s2] : chain) {
    if (s1 < 1 || s2 < 1 || s1 > depth || s2 > depth || s1 == s2) continue;
    if (coupling(model, s1, s2) == Complex{0.0, 0.0}) continue;
    const double chain_gap = std::abs(eigenvalue(model, s1) - eigenvalue(model, s2));
    for (long t1 = 1; t1 <= depth; ++t1) {
      for (long t2 = t1 + 1; t2 <= depth; ++t2) {
        if ((t1 == std::min(s1, s2) && t2 == std::max(s1, s2))) continue;
        if (coupling(model, t1, t2) == Complex{0.0, 0.0}) continue;
        const double gap = std::abs(eigenvalue(model, t1) - eigenvalue(model, t2));
        if (std::abs(gap - chain_gap) <= tol) {
          report.resonance_violations.push_back(
              ResonanceViolation{{s1, s2}, {t1, t2}, gap});
        }
      }
    }
  }
  return report;
}

// Largest |Re <L^k psi, B psi>| / <L^k psi, psi> over the truncated space,
// where L = diag(lambda) with strictly positive entries.  This is the
// largest absolute eigenvalue of D^{-1/2} M D^{-1/2} with D = L^k and
// M = (D B - B D)/2, which is Hermitian whenever B is skew-Hermitian.
inline double weak_coupling_constant_from_forms(const RVector& lambdas,
                                                const CMatrix& b, double k) {
  const Eigen::Index n = lambdas.size();
  if (b.rows() != n || b.cols() != n)
    throw std::invalid_argument("weak_coupling_constant_from_forms: size mismatch");
  RVector d(n), dinv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lambdas[i] > 0.0))
      throw std::domain_error("weak_coupling_constant_from_forms: eigenvalues must be positive");
    d[i] = std::pow(lambdas[i], k);
    dinv_sqrt[i] = 1.0 / std::sqrt(d[i]);
  }
  CMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      g(i, j) = 0.5 * (d[i] - d[j]) * b(i, j) * dinv_sqrt[i] * dinv_sqrt[j];
  if (!g.allFinite())
    throw NumericalError("weak_coupling_constant_from_forms: non-finite intermediate");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("weak_coupling_constant_from_forms: eigensolver failed");
  double c = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    c = std::max(c, std::abs(es.eigenvalues()[i]));
  return c;
}

// Numerical estimate, on the N-dimensional truncation, of the smallest
// constant C with |Re <|A|^k psi, B psi>| <= C <|A|^k psi, psi>.  The
// estimate is non-decreasing in N and stays bounded for both models.
inline double estimate_weak_coupling_constant(const QuantumModel& model, double k, int n) {
  if (n < 2) throw std::domain_error("estimate_weak_coupling_constant: N must be >= 2");
  RVector lambdas(n);
  for (int i = 0; i < n; ++i) lambdas[i] = eigenvalue(model, i + 1);
  CMatrix b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = coupling(model, i + 1, j + 1);
  return weak_coupling_constant_from_forms(lambdas, b, k);
}

}  // namespace gatecert
