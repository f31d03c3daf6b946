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

#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gatecert/common.hpp"
#include "gatecert/controls.hpp"
#include "gatecert/linalg.hpp"
#include "gatecert/models.hpp"

namespace gatecert {

// Unitary advance over one constant-control step.  Free drift is a pure
// phase per level and never materializes a dense matrix.
struct StepOperator {
  CVector phases;                        // diagonal representation
  std::shared_ptr<const CMatrix> dense;  // dense representation when set

  bool is_diagonal() const { return dense == nullptr; }

  void apply_in_place(CMatrix& x) const {
    if (is_diagonal()) {
      x.array().colwise() *= phases.array();
    } else {
      CMatrix tmp(x.rows(), x.cols());
      tmp.noalias() = (*dense) * x;
      x.swap(tmp);
    }
  }
};

struct CacheStats {
  std::size_t decompositions = 0;  // eigendecompositions performed
  std::size_t dense_steps = 0;     // dense step unitaries materialized
  std::size_t step_hits = 0;       // steps served from the cache
};

// Compression of the model onto the span of its first N eigenvectors:
// the diagonal drift -i lambda_k and the dense skew-Hermitian coupling
// block.  Also owns a memo of step exponentials; the memo is behind a
// mutex so distinct trajectories may be propagated concurrently.
class GalerkinSystem {
 public:
  GalerkinSystem(const QuantumModel& model, int n)
      : model_(model), cache_(std::make_unique<ExpCache>()) {
    if (n < 2) throw std::domain_error("GalerkinSystem: dimension must be >= 2");
    a_diag_.resize(n);
    for (int i = 0; i < n; ++i) a_diag_[i] = -kImag * eigenvalue(model, i + 1);
    b_mat_.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b_mat_(i, j) = coupling(model, i + 1, j + 1);
    if (skew_defect(b_mat_) > kSkewBuildTol)
      throw NumericalError("GalerkinSystem: assembled coupling block is not skew-Hermitian");
  }

  Eigen::Index dim() const { return a_diag_.size(); }
  const QuantumModel& model() const { return model_; }
  const CVector& a_diag() const { return a_diag_; }
  const CMatrix& b_mat() const { return b_mat_; }

  // e^{duration (A + amplitude B)}.  With cache_hint the dense result (and
  // the per-amplitude eigendecomposition) is memoized for reuse; repeated
  // pulse-train steps then cost one lookup.
  StepOperator step_operator(double amplitude, double duration, bool cache_hint = true) const {
    if (!std::isfinite(amplitude) || !std::isfinite(duration))
      throw std::invalid_argument("step_operator: non-finite amplitude or duration");
    if (amplitude == 0.0) {
      StepOperator op;
      op.phases = (a_diag_ * duration).array().exp();
      return op;
    }
    const std::pair<double, double> key(amplitude, duration);
    if (cache_hint) {
      std::lock_guard<std::mutex> lock(cache_->mutex);
      auto it = cache_->steps.find(key);
      if (it != cache_->steps.end()) {
        ++cache_->stats.step_hits;
        return StepOperator{{}, it->second};
      }
    }
    std::shared_ptr<const SkewExponential> decomp = exponential_factory(amplitude, cache_hint);
    auto unitary = std::make_shared<CMatrix>(decomp->at(duration));
    {
      std::lock_guard<std::mutex> lock(cache_->mutex);
      ++cache_->stats.dense_steps;
      if (cache_hint) cache_->steps.emplace(key, unitary);
    }
    return StepOperator{{}, std::move(unitary)};
  }

  // Eigendecomposition of A + amplitude B, shared across step durations.
  std::shared_ptr<const SkewExponential> exponential_factory(double amplitude,
                                                             bool cache_hint = true) const {
    if (cache_hint) {
      std::lock_guard<std::mutex> lock(cache_->mutex);
      auto it = cache_->decomps.find(amplitude);
      if (it != cache_->decomps.end()) return it->second;
    }
    CMatrix gen = amplitude * b_mat_;
    gen.diagonal() += a_diag_;
    auto decomp = std::make_shared<const SkewExponential>(gen);
    {
      std::lock_guard<std::mutex> lock(cache_->mutex);
      ++cache_->stats.decompositions;
      if (cache_hint) cache_->decomps.emplace(amplitude, decomp);
    }
    return decomp;
  }

  CacheStats cache_stats() const {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    return cache_->stats;
  }

 private:
  struct ExpCache {
    mutable std::mutex mutex;
    std::map<double, std::shared_ptr<const SkewExponential>> decomps;
    std::map<std::pair<double, double>, std::shared_ptr<const CMatrix>> steps;
    CacheStats stats;
  };

  QuantumModel model_;
  CVector a_diag_;
  CMatrix b_mat_;
  std::unique_ptr<ExpCache> cache_;
};

inline GalerkinSystem compress(const QuantumModel& model, int n) {
  return GalerkinSystem(model, n);
}

struct PropagateOptions {
  double sample_every = 0.0;     // 0: record a sample at every breakpoint
  bool track_propagator = true;  // accumulate the full N x N propagator
  int commutator_block = 3;      // block size m for the deviation record; 0 disables
};

struct Trajectory {
  std::vector<double> sample_times;
  // states[i][s]: coefficient vector of initial state i at sample s.
  std::vector<std::vector<CVector>> states;
  CMatrix final_propagator;  // empty when not tracked
  int commutator_block = 0;
  double commutator_sup = 0.0;
  double commutator_sup_time = 0.0;
  double min_state_norm = 1.0;
  double max_state_norm = 1.0;

  std::size_t n_samples() const { return sample_times.size(); }
  const CVector& final_state(std::size_t i) const { return states.at(i).back(); }
};

// Canonical basis columns e_1..e_m as initial states.
inline std::vector<CVector> canonical_initials(Eigen::Index dim, int m) {
  std::vector<CVector> out;
  for (int j = 0; j < m; ++j) {
    CVector v = CVector::Zero(dim);
    v[j] = 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

// ||pi_m X - X pi_m|| evaluated literally: assemble the commutator and take
// its largest singular value.
inline double commutator_deviation(const CMatrix& x, int m) {
  if (m < 0 || m > x.rows()) throw std::invalid_argument("commutator_deviation: bad block size");
  CMatrix c = CMatrix::Zero(x.rows(), x.cols());
  c.topRows(m) = x.topRows(m);
  c.leftCols(m) -= x.leftCols(m);
  return op_norm(c);
}

// Same quantity from the top-left m x m corner of a unitary X: both
// off-diagonal blocks of the commutator have norm sqrt(1 - sigma_min^2)
// where sigma_min is the smallest singular value of the corner.  The
// subtraction caps the resolution near sqrt(machine eps); prefer the
// column route below when the leading columns are available.
inline double commutator_deviation_from_corner(const CMatrix& corner) {
  Eigen::JacobiSVD<CMatrix> svd(corner);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  return std::sqrt(std::max(0.0, 1.0 - smin * smin));
}

// Same quantity from the first m columns of a unitary X (stacked as an
// N x (>= m) matrix): the commutator's off-diagonal blocks share their
// largest singular value, and the lower-left block sits in rows m+1..N of
// those columns.  Exact zeros stay exact.
inline double commutator_deviation_from_columns(const CMatrix& columns, int m) {
  const Eigen::Index n = columns.rows();
  if (m <= 0 || m > columns.cols() || m > n)
    throw std::invalid_argument("commutator_deviation_from_columns: bad block size");
  if (n == m) return 0.0;
  const CMatrix block = columns.bottomRows(n - m).leftCols(m);
  const CMatrix gram = block.adjoint() * block;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("commutator_deviation_from_columns: eigensolver failed");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

namespace detail {

// Block product accumulator: diagonal until a dense factor appears.
struct FoldedOperator {
  bool diagonal = true;
  CVector phases;
  CMatrix dense;

  explicit FoldedOperator(Eigen::Index n) : phases(CVector::Ones(n)) {}

  void fold_left(const StepOperator& op) {  // acc <- op * acc
    if (op.is_diagonal()) {
      if (diagonal) {
        phases.array() *= op.phases.array();
      } else {
        dense.array().colwise() *= op.phases.array();
      }
    } else {
      if (diagonal) {
        dense = (*op.dense) * phases.asDiagonal();
        diagonal = false;
      } else {
        CMatrix tmp(dense.rows(), dense.cols());
        tmp.noalias() = (*op.dense) * dense;
        dense.swap(tmp);
      }
    }
  }

  // acc^r by square-and-multiply.
  void power_in_place(std::size_t r) {
    if (diagonal) {
      CVector result = CVector::Ones(phases.size());
      CVector base = phases;
      for (std::size_t e = r; e > 0; e >>= 1) {
        if (e & 1) result.array() *= base.array();
        if (e > 1) base.array() *= base.array();
      }
      phases = std::move(result);
      return;
    }
    CMatrix result = CMatrix::Identity(dense.rows(), dense.cols());
    CMatrix base = dense;
    CMatrix tmp(dense.rows(), dense.cols());
    for (std::size_t e = r; e > 0; e >>= 1) {
      if (e & 1) {
        tmp.noalias() = base * result;
        result.swap(tmp);
      }
      if (e > 1) {
        tmp.noalias() = base * base;
        base.swap(tmp);
      }
    }
    dense = std::move(result);
  }

  void apply_in_place(CMatrix& x) const {
    if (diagonal) {
      x.array().colwise() *= phases.array();
    } else {
      CMatrix tmp(x.rows(), x.cols());
      tmp.noalias() = dense * x;
      x.swap(tmp);
    }
  }
};

}  // namespace detail

// Propagates the given initial states (as columns) through the product of
// step exponentials of the control.  No time-stepping error is added
// beyond the control's own discretization.  The commutator deviation
// record requires the first `commutator_block` initial states to be the
// canonical basis prefix e_1..e_m, whose propagated columns are exactly
// the first columns of the propagator.
inline Trajectory propagate(const GalerkinSystem& sys, const PiecewiseConstantControl& control,
                            const std::vector<CVector>& initials,
                            const PropagateOptions& opts = {}) {
  const Eigen::Index n = sys.dim();
  const std::size_t m_states = initials.size();
  if (m_states == 0) throw std::invalid_argument("propagate: need at least one initial state");
  for (const auto& v : initials) {
    if (v.size() != n) throw std::invalid_argument("propagate: initial state dimension mismatch");
    if (std::abs(v.norm() - 1.0) > kStateNormTol)
      throw std::invalid_argument("propagate: initial states must have unit norm");
  }
  const int mc = opts.commutator_block;
  if (mc < 0 || mc > n) throw std::invalid_argument("propagate: bad commutator block");
  if (mc > 0) {
    if (static_cast<std::size_t>(mc) > m_states)
      throw std::invalid_argument("propagate: commutator block exceeds the number of states");
    for (int j = 0; j < mc; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (initials[j][i] != (i == j ? Complex{1.0, 0.0} : Complex{0.0, 0.0}))
          throw std::invalid_argument(
              "propagate: commutator tracking needs canonical basis initial states e_1..e_m");
  }
  if (!(opts.sample_every >= 0.0))
    throw std::invalid_argument("propagate: sample_every must be >= 0");

  // Decide which step exponentials are worth memoizing.
  struct PairHash {
    std::size_t operator()(const std::pair<double, double>& p) const {
      std::hash<double> h;
      return h(p.first) * 1000003u ^ h(p.second);
    }
  };
  std::unordered_map<std::pair<double, double>, int, PairHash> multiplicity;
  for (const auto& s : control.steps())
    if (s.amplitude != 0.0) ++multiplicity[{s.amplitude, s.duration}];

  auto make_op = [&](const ControlStep& s) {
    const bool reuse = s.amplitude != 0.0 && multiplicity[{s.amplitude, s.duration}] > 1;
    return sys.step_operator(s.amplitude, s.duration, reuse);
  };

  CMatrix states(n, static_cast<Eigen::Index>(m_states));
  for (std::size_t j = 0; j < m_states; ++j) states.col(static_cast<Eigen::Index>(j)) = initials[j];
  CMatrix propagator;
  if (opts.track_propagator) propagator = CMatrix::Identity(n, n);

  Trajectory traj;
  traj.commutator_block = mc;
  traj.states.resize(m_states);
  traj.min_state_norm = 1.0;
  traj.max_state_norm = 1.0;

  detail::KahanSum clock;
  double next_sample = opts.sample_every;

  auto record_sample = [&](double t) {
    traj.sample_times.push_back(t);
    for (std::size_t j = 0; j < m_states; ++j) {
      traj.states[j].push_back(states.col(static_cast<Eigen::Index>(j)));
      const double nrm = traj.states[j].back().norm();
      traj.min_state_norm = std::min(traj.min_state_norm, nrm);
      traj.max_state_norm = std::max(traj.max_state_norm, nrm);
    }
  };
  auto at_breakpoint = [&](double t, bool force_sample) {
    if (mc > 0) {
      const double dev = commutator_deviation_from_columns(states, mc);
      if (dev > traj.commutator_sup) {
        traj.commutator_sup = dev;
        traj.commutator_sup_time = t;
      }
    }
    bool due = force_sample || opts.sample_every == 0.0;
    if (!due && t + 1e-12 >= next_sample) {
      due = true;
      next_sample = opts.sample_every * (std::floor(t / opts.sample_every + 1e-9) + 1.0);
    }
    if (due) record_sample(t);
  };

  record_sample(0.0);

  const auto& steps = control.steps();
  const auto& blocks = control.blocks();
  std::size_t cursor = 0;
  std::size_t next_block = 0;

  auto advance_states_through = [&](std::size_t first, std::size_t count,
                                    const std::vector<StepOperator>& ops) {
    for (std::size_t i = 0; i < count; ++i) {
      ops[i % ops.size()].apply_in_place(states);
      clock.add(steps[first + i].duration);
      at_breakpoint(clock.value(), first + i + 1 == steps.size());
    }
  };

  while (cursor < steps.size()) {
    const StepBlock* blk = nullptr;
    if (next_block < blocks.size() && blocks[next_block].first == cursor) {
      blk = &blocks[next_block];
      if (blk->count == 0 || blk->first + blk->count * blk->repeats > steps.size())
        throw std::invalid_argument("propagate: malformed step block");
      // The flattened steps must really repeat the group.
      for (std::size_t r = 1; r < blk->repeats; ++r)
        for (std::size_t i = 0; i < blk->count; ++i) {
          const auto& a = steps[blk->first + i];
          const auto& b = steps[blk->first + r * blk->count + i];
          if (a.duration != b.duration || a.amplitude != b.amplitude)
            throw std::invalid_argument("propagate: step block does not match its steps");
        }
    }

    if (blk != nullptr && blk->repeats >= 2) {
      std::vector<StepOperator> ops;
      ops.reserve(blk->count);
      for (std::size_t i = 0; i < blk->count; ++i) ops.push_back(make_op(steps[blk->first + i]));
      advance_states_through(blk->first, blk->count * blk->repeats, ops);
      if (opts.track_propagator) {
        detail::FoldedOperator period(n);
        for (const auto& op : ops) period.fold_left(op);
        period.power_in_place(blk->repeats);
        period.apply_in_place(propagator);
      }
      cursor += blk->count * blk->repeats;
      ++next_block;
    } else {
      if (blk != nullptr) ++next_block;  // degenerate single-repeat block
      const StepOperator op = make_op(steps[cursor]);
      op.apply_in_place(states);
      if (opts.track_propagator) op.apply_in_place(propagator);
      clock.add(steps[cursor].duration);
      at_breakpoint(clock.value(), cursor + 1 == steps.size());
      ++cursor;
    }
  }

  traj.final_propagator = std::move(propagator);
  return traj;
}

// Index-based convenience overload: 1-based eigenstate labels.
inline Trajectory propagate(const GalerkinSystem& sys, const PiecewiseConstantControl& control,
                            const std::vector<int>& initial_levels,
                            const PropagateOptions& opts = {}) {
  std::vector<CVector> initials;
  for (int lvl : initial_levels) {
    if (lvl < 1 || lvl > sys.dim()) throw std::invalid_argument("propagate: bad initial level");
    CVector v = CVector::Zero(sys.dim());
    v[lvl - 1] = 1.0;
    initials.push_back(std::move(v));
  }
  return propagate(sys, control, initials, opts);
}

struct GateFidelities {
  RMatrix moduli;                      // moduli(i, j) = |<phi_{i+1}, X phi_{j+1}>|
  std::vector<double> per_transition;  // |<phi_{sigma(j)}, X phi_j>|
  std::vector<int> sigma;              // 1-based target permutation
};

// Moduli of the final-time transition amplitudes against a target
// permutation of the first m levels.  Uses the tracked propagator when
// available, the propagated canonical states otherwise.
inline GateFidelities gate_fidelities(const Trajectory& traj, const std::vector<int>& sigma) {
  const int m = static_cast<int>(sigma.size());
  std::vector<bool> seen(static_cast<std::size_t>(m), false);
  for (int v : sigma) {
    if (v < 1 || v > m || seen[static_cast<std::size_t>(v - 1)])
      throw std::invalid_argument("gate_fidelities: sigma is not a permutation of 1..m");
    seen[static_cast<std::size_t>(v - 1)] = true;
  }
  GateFidelities out;
  out.sigma = sigma;
  out.moduli.resize(m, m);
  if (traj.final_propagator.size() > 0) {
    if (traj.final_propagator.rows() < m)
      throw std::invalid_argument("gate_fidelities: block larger than the propagator");
    out.moduli = traj.final_propagator.topLeftCorner(m, m).cwiseAbs();
  } else {
    if (traj.states.size() < static_cast<std::size_t>(m) || traj.commutator_block < m)
      throw std::invalid_argument(
          "gate_fidelities: need a tracked propagator or canonical initial states");
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i)
        out.moduli(i, j) = std::abs(traj.states[static_cast<std::size_t>(j)].back()[i]);
  }
  for (int j = 0; j < m; ++j)
    out.per_transition.push_back(out.moduli(sigma[static_cast<std::size_t>(j)] - 1, j));
  return out;
}

}  // namespace gatecert
