// Copyright 2026 The dbf Authors
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

// Deterministic convergence model for the expected best received strength.
//
// Given y[n], the rotated phases are summarised by a Laplacian law whose
// scale phi0 satisfies y = N / (1 + phi0^2). The in-phase perturbation x1 of
// the perturbed phasor sum is treated as Gaussian with variance sigma1^2,
// and the expected next best strength is
//
//   F(y) = y + sigma1 * g(y (1 - C_d) / sigma1),  g(x) = pdf(x) - x Q(x).
//
// Unit gains are assumed throughout (G_opt = N).

#ifndef DBF_MODEL_HPP_
#define DBF_MODEL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dbf/errors.hpp"
#include "dbf/perturbation.hpp"

namespace dbf {

inline constexpr double kInvSqrtTwoPi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;

inline double normal_pdf(double x) { return kInvSqrtTwoPi * std::exp(-0.5 * x * x); }

// Standard normal upper tail. erfc keeps full relative precision in the
// tail; absolute error is at the level of double rounding (< 1e-15).
inline double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

inline double g_func(double x) {
  if (x < 0.0) throw DomainError("g_func: x must be nonnegative");
  return normal_pdf(x) - x * q_function(x);
}

namespace detail {

inline void require_model_domain(double y, double n_sensors, const char* who) {
  if (!(n_sensors >= 1.0)) throw DomainError(std::string(who) + ": need N >= 1");
  if (!(y > 0.0 && y <= n_sensors)) throw DomainError(std::string(who) + ": need 0 < y <= N");
}

// y/N mapped through the Laplacian law: sum cos(2 phi) / N.
inline double cos2_ratio(double y, double n_sensors) {
  const double r = y / n_sensors;
  return r / (4.0 - 3.0 * r);
}

}  // namespace detail

// Laplacian scale for strength y: sqrt(N/y - 1).
inline double phi0_from_y(double y, double n_sensors) {
  detail::require_model_domain(y, n_sensors, "phi0_from_y");
  return std::sqrt(std::max(0.0, n_sensors / y - 1.0));
}

inline double laplacian_pdf(double phi, double phi0) {
  if (!(phi0 > 0.0)) throw DomainError("laplacian_pdf: phi0 must be positive");
  return std::exp(-std::abs(phi) / phi0) / (2.0 * phi0);
}

// CDF of |phi| under the Laplacian law (an exponential with mean phi0).
inline double laplacian_abs_cdf(double abs_phi, double phi0) {
  if (!(phi0 > 0.0)) throw DomainError("laplacian_abs_cdf: phi0 must be positive");
  return abs_phi <= 0.0 ? 0.0 : -std::expm1(-abs_phi / phi0);
}

struct Variances {
  double sigma1_sq = 0.0;
  double sigma2_sq = 0.0;
};

inline Variances variances(double y, double n_sensors, const Moments& m) {
  detail::require_model_domain(y, n_sensors, "variances");
  const double c2 = detail::cos2_ratio(y, n_sensors);
  const double cd2 = m.c_delta * m.c_delta;
  Variances v;
  v.sigma1_sq = 0.5 * n_sensors * ((1.0 - cd2) - c2 * (cd2 - m.c_2delta));
  v.sigma2_sq = 0.5 * n_sensors * (1.0 - c2 * m.c_2delta);
  // Feasible moments make both terms nonnegative; clip rounding residue.
  v.sigma1_sq = std::max(0.0, v.sigma1_sq);
  v.sigma2_sq = std::max(0.0, v.sigma2_sq);
  return v;
}

struct ModelState {
  double y = 0.0;
  double n_sensors = 0.0;
  double phi0 = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
};

inline ModelState model_state(double y, double n_sensors, const Moments& m) {
  const auto v = variances(y, n_sensors, m);
  return {y, n_sensors, phi0_from_y(y, n_sensors), std::sqrt(v.sigma1_sq), std::sqrt(v.sigma2_sq)};
}

// Below this sigma1 the step is the identity (sigma g(c / sigma) -> 0).
inline double sigma_floor(double n_sensors) { return 1e-12 * n_sensors; }

struct StepResult {
  double y_next = 0.0;
  // The Gaussian surrogate overshot N and the result was clamped.
  bool clamped = false;
};

inline StepResult model_step_detail(double y, double n_sensors, const Moments& m) {
  const double sigma1 = std::sqrt(variances(y, n_sensors, m).sigma1_sq);
  if (sigma1 <= sigma_floor(n_sensors)) return {y, false};
  const double x = y * (1.0 - m.c_delta) / sigma1;
  const double next = y + sigma1 * g_func(std::max(0.0, x));
  if (next > n_sensors) return {n_sensors, true};
  return {next, false};
}

// F(y) = y + f(y).
inline double model_step(double y, double n_sensors, const Moments& m) {
  return model_step_detail(y, n_sensors, m).y_next;
}

// The same step written as y (1 - p (1 - C_d)) + sigma1 pdf(x), p = Q(x).
// Kept as an independent algebraic route for cross-checking.
inline double model_step_tail_form(double y, double n_sensors, const Moments& m) {
  const double sigma1 = std::sqrt(variances(y, n_sensors, m).sigma1_sq);
  if (sigma1 <= sigma_floor(n_sensors)) return y;
  const double x = y * (1.0 - m.c_delta) / sigma1;
  const double p = q_function(x);
  const double next = y * (1.0 - p * (1.0 - m.c_delta)) + sigma1 * normal_pdf(x);
  return std::min(next, n_sensors);
}

struct ModelTrace {
  // y[0] is slot 1.
  std::vector<double> y;
  std::size_t clamped_steps = 0;
};

// Recursion from y[1] = sqrt(N) for `horizon` slots, moments taken per slot
// from the schedule.
// y[1] defaults to sqrt(N); `y_start` overrides it.
inline ModelTrace run_model(std::size_t n_sensors, const DistSchedule& schedule,
                            std::size_t horizon, std::optional<double> y_start = std::nullopt) {
  detail::require(n_sensors >= 1, "run_model: need N >= 1");
  detail::require(horizon >= 1, "run_model: horizon must be >= 1");
  const double n = static_cast<double>(n_sensors);
  ModelTrace trace;
  trace.y.reserve(horizon);
  detail::require(!y_start || (*y_start > 0.0 && *y_start <= n), "run_model: y_start outside (0, N]");
  trace.y.push_back(y_start.value_or(std::sqrt(n)));
  for (std::size_t slot = 1; slot < horizon; ++slot) {
    const auto step = model_step_detail(trace.y.back(), n, schedule.moments_at(slot));
    if (step.clamped) ++trace.clamped_steps;
    trace.y.push_back(step.y_next);
  }
  return trace;
}

// The model is only defined for unit gains.
inline void require_unit_gains(std::span<const double> gains) {
  for (double a : gains) {
    if (a != 1.0) throw ArgumentError("analytic model requires unit gains");
  }
}

}  // namespace dbf

#endif  // DBF_MODEL_HPP_
