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

// Greedy per-slot choice of perturbation parameters: pick the member of a
// distribution family that maximizes the model's expected next strength.

#ifndef DBF_OPTIMIZER_HPP_
#define DBF_OPTIMIZER_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "dbf/errors.hpp"
#include "dbf/model.hpp"
#include "dbf/perturbation.hpp"

namespace dbf {

struct SearchGrid {
  double delta0_min = 1e-4;
  double delta0_max = kPi / 2.0;
  std::size_t delta0_points = 64;
  std::size_t p_points = 16;
  double p_min = 1e-10;
  double tolerance = 1e-6;
};

struct StepParams {
  Family family = Family::kUniform;
  double delta0 = 0.0;
  double weight_p = 0.0;
  Moments moments;
  double y_next = 0.0;

  PerturbationDist dist() const {
    return family == Family::kThreePoint ? make_dist(family, delta0, weight_p)
                                         : make_dist(family, delta0);
  }
};

namespace detail {

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t k = 0; k < n; ++k) {
    g[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

// Golden-section maximization on [lo, hi]. Returns (argmax, value).
inline std::pair<double, double> golden_max(const std::function<double(double)>& fn, double lo,
                                            double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = fn(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

inline double three_point_objective(double y, double n, double d0, double p) {
  const double cd = 1.0 - 2.0 * p * (1.0 - std::cos(d0));
  const double c2d = 1.0 - 2.0 * p * (1.0 - std::cos(2.0 * d0));
  return model_step(y, n, {cd, c2d});
}

}  // namespace detail

inline StepParams optimize_step_params(double y, std::size_t n_sensors, Family family,
                                       const SearchGrid& grid = {}) {
  const double n = static_cast<double>(n_sensors);
  detail::require_model_domain(y, n, "optimize_step_params");
  const auto d0_grid = detail::log_grid(grid.delta0_min, grid.delta0_max, grid.delta0_points);

  StepParams best;
  best.family = family;

  if (y >= n) {
    // Fixed point: nothing improves on N.
    best.delta0 = grid.delta0_min;
    best.weight_p = family == Family::kUniform ? 0.0 : 0.5;
    best.moments = moments(best.dist());
    best.y_next = n;
    return best;
  }

  if (family != Family::kThreePoint) {
    auto objective = [&](double d0) { return model_step(y, n, moments(make_dist(family, d0))); };
    std::size_t arg = 0;
    double val = objective(d0_grid[0]);
    for (std::size_t k = 1; k < d0_grid.size(); ++k) {
      const double v = objective(d0_grid[k]);
      if (v > val) {
        val = v;
        arg = k;
      }
    }
    double d0 = d0_grid[arg];
    const double lo = d0_grid[arg == 0 ? 0 : arg - 1];
    const double hi = d0_grid[std::min(arg + 1, d0_grid.size() - 1)];
    const auto [rd0, rval] = detail::golden_max(objective, lo, hi, grid.tolerance);
    if (rval > val) {
      d0 = rd0;
      val = rval;
    }
    best.delta0 = d0;
    best.weight_p = family == Family::kTwoPoint ? 0.5 : 0.0;
    best.moments = moments(best.dist());
    best.y_next = val;
    return best;
  }

  // The best weight shrinks towards zero as y approaches N, so p is searched
  // on a log scale. For each delta0 the p grid picks a cell and golden
  // section refines inside it; the resulting profile is then refined in
  // delta0 the same way. Optimizing the profile rather than alternating
  // coordinates follows the curved ridge of the objective.
  const auto p_grid = detail::log_grid(grid.p_min, 0.5, grid.p_points);
  auto best_p = [&](double d0) {
    std::size_t aj = 0;
    double v = -1.0;
    for (std::size_t j = 0; j < p_grid.size(); ++j) {
      const double t = detail::three_point_objective(y, n, d0, p_grid[j]);
      if (t > v) {
        v = t;
        aj = j;
      }
    }
    const double lo = std::log(p_grid[aj == 0 ? 0 : aj - 1]);
    const double hi = std::log(p_grid[std::min(aj + 1, p_grid.size() - 1)]);
    const auto [lp, lv] = detail::golden_max(
        [&](double t) { return detail::three_point_objective(y, n, d0, std::exp(t)); }, lo, hi, 1e-9);
    return lv > v ? std::pair{std::min(0.5, std::exp(lp)), lv} : std::pair{p_grid[aj], v};
  };
  std::size_t ai = 0;
  double val = -1.0;
  double p = p_grid.back();
  for (std::size_t i = 0; i < d0_grid.size(); ++i) {
    const auto [pi, v] = best_p(d0_grid[i]);
    if (v > val) {
      val = v;
      ai = i;
      p = pi;
    }
  }
  double d0 = d0_grid[ai];
  const auto [rd0, rval] = detail::golden_max([&](double t) { return best_p(t).second; },
                                              d0_grid[ai == 0 ? 0 : ai - 1],
                                              d0_grid[std::min(ai + 1, d0_grid.size() - 1)], grid.tolerance);
  if (rval > val) {
    d0 = rd0;
    p = best_p(rd0).first;
    val = detail::three_point_objective(y, n, d0, p);
  }
  best.delta0 = d0;
  best.weight_p = p;
  best.moments = moments(best.dist());
  best.y_next = val;
  return best;
}

struct ScheduleEntry {
  std::size_t timeslot = 0;
  StepParams params;
  // Model strength at this slot, before applying params.
  double y_predicted = 0.0;
};

struct OptimizedRun {
  std::vector<double> y;
  std::vector<ScheduleEntry> schedule;
};

// Greedy optimization from y[1] = sqrt(N). schedule[k] holds the parameters
// used to go from y[k+1] to y[k+2] (slots are 1-based).
inline OptimizedRun run_optimized_model(std::size_t n_sensors, Family family, std::size_t horizon,
                                        const SearchGrid& grid = {}) {
  detail::require(n_sensors >= 1, "run_optimized_model: need N >= 1");
  detail::require(horizon >= 1, "run_optimized_model: horizon must be >= 1");
  OptimizedRun run;
  run.y.reserve(horizon);
  run.schedule.reserve(horizon);
  run.y.push_back(std::sqrt(static_cast<double>(n_sensors)));
  for (std::size_t slot = 1; slot <= horizon; ++slot) {
    const double y = run.y.back();
    auto params = optimize_step_params(y, n_sensors, family, grid);
    run.schedule.push_back({slot, params, y});
    if (slot < horizon) run.y.push_back(params.y_next);
  }
  return run;
}

}  // namespace dbf

#endif  // DBF_OPTIMIZER_HPP_
