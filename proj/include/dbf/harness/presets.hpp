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

// Named experiment presets. Each is an ordinary ExperimentConfig, so
// `dump_config(preset(name))` gives the equivalent explicit config file.

#ifndef DBF_HARNESS_PRESETS_HPP_
#define DBF_HARNESS_PRESETS_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "dbf/harness/config.hpp"

namespace dbf::harness {

inline std::vector<std::string> preset_names() {
  return {"fig2", "fig3", "fig5", "fig6", "fig7", "fig8", "fig9a", "fig9b", "fig10"};
}

inline std::vector<std::uint64_t> seed_range(std::uint64_t first, std::uint64_t count) {
  std::vector<std::uint64_t> s(count);
  for (std::uint64_t k = 0; k < count; ++k) s[k] = first + k;
  return s;
}

inline ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c;
  c.name = std::string(name);
  const auto uniform = [](double d0) { return DistSchedule(make_dist(Family::kUniform, d0)); };
  const auto two_point = [](double d0) { return DistSchedule(make_dist(Family::kTwoPoint, d0)); };

  if (name == "fig2") {
    c.reproduces = "single-run convergence trace, N = 10";
    c.mode = Mode::kProtocol;
    c.n_sensors = {10};
    c.schedules = {uniform(kPi / 20)};
    c.horizon = 2000;
    c.seeds = {1};
  } else if (name == "fig3") {
    c.reproduces = "two independent runs, N = 100, uniform perturbation pi/20";
    c.mode = Mode::kProtocol;
    c.n_sensors = {100};
    c.schedules = {uniform(kPi / 20)};
    c.horizon = 3000;
    c.seeds = {1, 2};
  } else if (name == "fig5") {
    c.reproduces = "rotated-phase histogram against the Laplacian law at 80% of the optimum";
    c.mode = Mode::kHistogram;
    c.n_sensors = {100};
    c.schedules = {uniform(kPi / 30)};
    c.horizon = 20000;
    c.seeds = seed_range(1, 20);
    c.fraction = 0.8;
  } else if (name == "fig6") {
    c.reproduces = "analytic model against the 50-run Monte-Carlo mean, N = 100";
    c.mode = Mode::kCompare;
    c.n_sensors = {100};
    c.schedules = {uniform(kPi / 30), two_point(kPi / 30)};
    c.horizon = 3000;
    c.seeds = seed_range(1, 50);
  } else if (name == "fig7") {
    c.reproduces = "optimal (C_delta, C_2delta) trajectories of the uniform and 3-point families, N = 2000";
    c.mode = Mode::kOptimized;
    c.n_sensors = {2000};
    c.optimize = {Family::kUniform, Family::kThreePoint};
    c.horizon = 10000;
  } else if (name == "fig8") {
    c.reproduces = "optimized schedule against fixed uniform perturbations, N = 200";
    c.mode = Mode::kOptimized;
    c.n_sensors = {200};
    c.optimize = {Family::kUniform};
    c.schedules = {uniform(kPi / 10), uniform(kPi / 30), uniform(kPi / 60), uniform(kPi / 100)};
    c.horizon = 3000;
  } else if (name == "fig9a" || name == "fig9b") {
    c.mode = Mode::kScaling;
    c.n_sensors = {50, 100, 200, 400, 800, 1600};
    c.fraction = 0.75;
    c.horizon = 200000;
    if (name == "fig9a") {
      c.reproduces = "time to 75% of the optimum versus N, fixed uniform perturbation pi/30";
      c.sweep = SweepMode::kFixed;
      c.schedules = {uniform(kPi / 30)};
    } else {
      c.reproduces = "time to 75% of the optimum versus N, optimized perturbations";
      c.sweep = SweepMode::kOptimized;
      c.optimize = {Family::kUniform};
    }
  } else if (name == "fig10") {
    c.reproduces = "tracking with drifting channels, N = 100, Doppler magnitude pi/200 per slot";
    c.mode = Mode::kTracking;
    c.n_sensors = {100};
    c.schedules = {uniform(kPi / 20)};
    c.horizon = 20000;
    c.seeds = seed_range(1, 20);
    c.window = FeedbackWindow::last(1);
    c.doppler_magnitude = kPi / 200;
    c.drift_model = DriftModel::kUniform;
    c.fraction = 0.75;
    c.tracking_slots = 4000;
  } else {
    throw ConfigError("unknown preset: " + std::string(name));
  }
  c.out_dir = "out/" + c.name;
  validate(c);
  return c;
}

}  // namespace dbf::harness

#endif  // DBF_HARNESS_PRESETS_HPP_
