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

// Test-only reference computations.  Everything here is deliberately
// independent of the library's own evaluation paths: exact integer
// factorials, adaptive quadrature, a Taylor-series matrix exponential and
// a naive triple-loop product.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

namespace oracles {

// n! exactly, n <= 20 (fits in 64 bits).
inline std::uint64_t exact_factorial(int n) {
  if (n < 0 || n > 20) throw std::out_of_range("exact_factorial: n out of [0, 20]");
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

// ln(n!) through the exact integer value, in extended precision.
inline long double exact_log_factorial(int n) {
  return std::log(static_cast<long double>(exact_factorial(n)));
}

// n! as a plain extended-precision product; one rounding per factor.
inline long double long_double_factorial(int n) {
  if (n < 0 || n > 1700) throw std::out_of_range("long_double_factorial: n out of range");
  long double f = 1.0L;
  for (int i = 2; i <= n; ++i) f *= static_cast<long double>(i);
  return f;
}

namespace detail {
inline double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Adaptive Simpson quadrature of f over [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-10) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = detail::simpson(fa, fm, fb, b - a);
  return detail::adapt(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Matrix exponential by scaling-and-squaring of the plain Taylor series.
inline Eigen::MatrixXcd taylor_expm(const Eigen::MatrixXcd& m) {
  const Eigen::Index n = m.rows();
  int squarings = 0;
  double scale = m.cwiseAbs().sum();
  while (scale > 0.25 && squarings < 60) {
    scale *= 0.5;
    ++squarings;
  }
  const Eigen::MatrixXcd ms = m / std::pow(2.0, squarings);
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd sum = term;
  for (int k = 1; k <= 40; ++k) {
    term = (term * ms) / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-20) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

// Triple-loop matrix product with no blocking or vectorization tricks.
inline Eigen::MatrixXcd naive_matmul(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      for (Eigen::Index k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
  return c;
}

inline Eigen::MatrixXcd random_skew_hermitian(Eigen::Index n, std::mt19937_64& gen) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = std::complex<double>(dist(gen), dist(gen));
  return 0.5 * (a - a.adjoint());
}

}  // namespace oracles
