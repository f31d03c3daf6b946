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
#include <cstddef>
#include <vector>

#include "gatecert/common.hpp"
#include "gatecert/models.hpp"

namespace gatecert {

struct ControlStep {
  double duration = 0.0;   // strictly positive
  double amplitude = 0.0;  // any real, 0 = free drift
};

// Marks steps[first, first + count * repeats) as `repeats` consecutive
// copies of the step group steps[first, first + count).  Pure structure
// hint: propagation exploits it to reuse exponentials and to advance the
// propagator by powered period blocks.
struct StepBlock {
  std::size_t first = 0;
  std::size_t count = 0;
  std::size_t repeats = 1;
};

namespace detail {
// Compensated sum; the L1 ledger must not drift over 10^5-step controls.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};
}  // namespace detail

// A finite schedule of (duration, amplitude) steps.  total_duration and the
// L1 norm are exact functions of the step list; there is no quadrature
// involved anywhere.
class PiecewiseConstantControl {
 public:
  PiecewiseConstantControl() = default;

  static PiecewiseConstantControl from_steps(std::vector<ControlStep> steps,
                                             std::vector<StepBlock> blocks = {}) {
    for (const auto& s : steps) {
      if (!(s.duration > 0.0))
        throw std::invalid_argument("control step duration must be positive");
      if (!std::isfinite(s.amplitude))
        throw std::invalid_argument("control step amplitude must be finite");
    }
    PiecewiseConstantControl c;
    c.steps_ = std::move(steps);
    c.blocks_ = std::move(blocks);
    return c;
  }

  const std::vector<ControlStep>& steps() const { return steps_; }
  const std::vector<StepBlock>& blocks() const { return blocks_; }
  bool empty() const { return steps_.empty(); }
  std::size_t size() const { return steps_.size(); }

  double total_duration() const {
    detail::KahanSum s;
    for (const auto& step : steps_) s.add(step.duration);
    return s.value();
  }

  // Integral of |u| over the whole schedule.
  double l1() const {
    detail::KahanSum s;
    for (const auto& step : steps_) s.add(step.duration * std::abs(step.amplitude));
    return s.value();
  }

 private:
  std::vector<ControlStep> steps_;
  std::vector<StepBlock> blocks_;
};

// n_periods repetitions of [amplitude for pulse_width, 0 for the rest of
// the period].  l1 = n_periods * pulse_width * |amplitude|.
inline PiecewiseConstantControl pulse_train(double period, double pulse_width,
                                            double amplitude, long n_periods) {
  if (!(period > 0.0) || !(pulse_width > 0.0))
    throw std::invalid_argument("pulse_train: period and pulse_width must be positive");
  if (!(pulse_width < period))
    throw std::invalid_argument("pulse_train: pulse_width must be smaller than the period");
  if (n_periods < 1 || n_periods > 100000000)
    throw std::invalid_argument("pulse_train: n_periods out of range");
  std::vector<ControlStep> steps;
  steps.reserve(2 * static_cast<std::size_t>(n_periods));
  for (long p = 0; p < n_periods; ++p) {
    steps.push_back({pulse_width, amplitude});
    steps.push_back({period - pulse_width, 0.0});
  }
  std::vector<StepBlock> blocks{{0, 2, static_cast<std::size_t>(n_periods)}};
  return PiecewiseConstantControl::from_steps(std::move(steps), std::move(blocks));
}

// Piecewise-constant sampling of t -> amplitude * cos(omega t + phase) on
// [0, duration].  Each step takes the value at its midpoint; the last step
// is truncated so the breakpoints end at `duration` exactly.
inline PiecewiseConstantControl discretize_sinusoid(double amplitude, double angular_frequency,
                                                    double phase, double duration, double step) {
  if (!(duration > 0.0)) throw std::invalid_argument("discretize_sinusoid: duration must be positive");
  if (!(step > 0.0)) throw std::invalid_argument("discretize_sinusoid: step must be positive");
  if (step > duration) throw std::invalid_argument("discretize_sinusoid: step must not exceed duration");
  if (duration / step > 1e8) throw std::invalid_argument("discretize_sinusoid: too many steps");
  std::vector<ControlStep> steps;
  steps.reserve(static_cast<std::size_t>(duration / step) + 2);
  double t = 0.0;
  for (std::size_t i = 1; t < duration; ++i) {
    double next = std::min(static_cast<double>(i) * step, duration);
    if (next <= t) break;  // guards fp stagnation on the final sliver
    const double mid = 0.5 * (t + next);
    steps.push_back({next - t, amplitude * std::cos(angular_frequency * mid + phase)});
    t = next;
  }
  return PiecewiseConstantControl::from_steps(std::move(steps));
}

// a followed by b; block structure is preserved with shifted offsets.
inline PiecewiseConstantControl concat(const PiecewiseConstantControl& a,
                                       const PiecewiseConstantControl& b) {
  std::vector<ControlStep> steps = a.steps();
  steps.insert(steps.end(), b.steps().begin(), b.steps().end());
  std::vector<StepBlock> blocks = a.blocks();
  for (StepBlock blk : b.blocks()) {
    blk.first += a.size();
    blocks.push_back(blk);
  }
  return PiecewiseConstantControl::from_steps(std::move(steps), std::move(blocks));
}

// Undiscretized sinusoid recipe; the caller picks the sampling step.
struct SinusoidSpec {
  double amplitude = 0.0;
  double angular_frequency = 0.0;
  double phase = 0.0;
  double duration = 0.0;
  PiecewiseConstantControl discretize(double step) const {
    return discretize_sinusoid(amplitude, angular_frequency, phase, duration, step);
  }
};

// First-order averaging recipe for a full population transfer j <-> k:
// drive at the transition gap for the time T with
// amplitude * |b_jk| * T = pi.  The returned duration is approximate by
// construction (first-order rotating wave); propagation tells the truth.
inline SinusoidSpec synthesize_resonant_transfer(const QuantumModel& model, long j, long k,
                                                 double amplitude, double phase = 0.0) {
  if (!(amplitude > 0.0))
    throw std::invalid_argument("synthesize_resonant_transfer: amplitude must be positive");
  const double b = std::abs(coupling(model, j, k));
  if (b == 0.0)
    throw std::invalid_argument("synthesize_resonant_transfer: levels are not coupled");
  SinusoidSpec spec;
  spec.amplitude = amplitude;
  spec.angular_frequency = std::abs(eigenvalue(model, j) - eigenvalue(model, k));
  spec.phase = phase;
  spec.duration = kPi / (amplitude * b);
  return spec;
}

}  // namespace gatecert
