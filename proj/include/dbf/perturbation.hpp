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

// Perturbation distributions for the per-sensor random phase tweak, their
// cosine moments, and the feasibility region for the moment pair.

#ifndef DBF_PERTURBATION_HPP_
#define DBF_PERTURBATION_HPP_

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dbf/errors.hpp"
#include "dbf/phasor.hpp"
#include "dbf/rng.hpp"

namespace dbf {

enum class Family { kTwoPoint, kUniform, kThreePoint };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::kTwoPoint: return "two_point";
    case Family::kUniform: return "uniform";
    case Family::kThreePoint: return "three_point";
  }
  return "?";
}

inline Family parse_family(std::string_view name) {
  if (name == "two_point") return Family::kTwoPoint;
  if (name == "uniform") return Family::kUniform;
  if (name == "three_point") return Family::kThreePoint;
  throw ArgumentError("unknown perturbation family: " + std::string(name));
}

// E[cos delta] and E[cos 2 delta].
struct Moments {
  double c_delta = 1.0;
  double c_2delta = 1.0;

  friend bool operator==(const Moments&, const Moments&) = default;
};

class PerturbationDist {
 public:
  Family family() const { return family_; }
  double delta0() const { return delta0_; }
  // Mass on each of +-delta0; 0.5 for two_point, unused (0) for uniform.
  double weight_p() const { return weight_p_; }

  friend PerturbationDist make_dist(Family, double, std::optional<double>);

 private:
  PerturbationDist(Family f, double d, double p) : family_(f), delta0_(d), weight_p_(p) {}

  Family family_;
  double delta0_;
  double weight_p_;
};

// Validated constructor. delta0 must lie in (0, pi); three_point needs
// 0 < p <= 0.5.
inline PerturbationDist make_dist(Family family, double delta0,
                                  std::optional<double> weight_p = std::nullopt) {
  if (!(std::isfinite(delta0) && delta0 > 0.0 && delta0 < kPi)) {
    throw ArgumentError("make_dist: delta0 must lie in (0, pi)");
  }
  switch (family) {
    case Family::kTwoPoint:
      return {family, delta0, 0.5};
    case Family::kUniform:
      return {family, delta0, 0.0};
    case Family::kThreePoint: {
      if (!weight_p) throw ArgumentError("make_dist: three_point requires weight p");
      const double p = *weight_p;
      if (!(p > 0.0 && p <= 0.5)) throw ArgumentError("make_dist: weight p must lie in (0, 0.5]");
      return {family, delta0, p};
    }
  }
  throw ArgumentError("make_dist: unknown family");
}

// One draw in [-delta0, delta0].
inline double draw(const PerturbationDist& dist, CounterRng& rng) {
  const double d = dist.delta0();
  switch (dist.family()) {
    case Family::kTwoPoint:
      return (rng() >> 63) ? d : -d;
    case Family::kUniform:
      return d * (2.0 * rng.uniform01() - 1.0);
    case Family::kThreePoint: {
      const double u = rng.uniform01();
      if (u < dist.weight_p()) return -d;
      if (u < 2.0 * dist.weight_p()) return d;
      return 0.0;
    }
  }
  return 0.0;
}

inline std::vector<double> sample(const PerturbationDist& dist, CounterRng& rng, std::size_t n) {
  detail::require(n >= 1, "sample: need at least one draw");
  std::vector<double> out(n);
  for (auto& v : out) v = draw(dist, rng);
  return out;
}

// Closed-form cosine moments.
inline Moments moments(const PerturbationDist& dist) {
  const double d = dist.delta0();
  switch (dist.family()) {
    case Family::kTwoPoint:
      return {std::cos(d), std::cos(2.0 * d)};
    case Family::kUniform:
      return {std::sin(d) / d, std::sin(2.0 * d) / (2.0 * d)};
    case Family::kThreePoint: {
      const double p = dist.weight_p();
      return {1.0 - 2.0 * p * (1.0 - std::cos(d)), 1.0 - 2.0 * p * (1.0 - std::cos(2.0 * d))};
    }
  }
  return {};
}

// E[delta^2] in closed form.
inline double second_moment(const PerturbationDist& dist) {
  const double d = dist.delta0();
  switch (dist.family()) {
    case Family::kTwoPoint: return d * d;
    case Family::kUniform: return d * d / 3.0;
    case Family::kThreePoint: return 2.0 * dist.weight_p() * d * d;
  }
  return 0.0;
}

// 2 C^2 - 1 <= C2 <= 2 C - 1. A relative slack of a few ulps absorbs the
// rounding in closed-form moments that sit exactly on the lower boundary.
inline bool feasibility_check(const Moments& m, double slack = 4e-16) {
  const double lower = 2.0 * m.c_delta * m.c_delta - 1.0;
  const double upper = 2.0 * m.c_delta - 1.0;
  return m.c_2delta >= lower - slack && m.c_2delta <= upper + slack;
}

// Piecewise-constant schedule: entry k applies from its start slot until the
// next entry's start slot. Slots are 1-based.
class DistSchedule {
 public:
  struct Step {
    std::size_t from_slot;
    PerturbationDist dist;
  };

  explicit DistSchedule(PerturbationDist fixed) { steps_.push_back({1, fixed}); }

  explicit DistSchedule(std::vector<Step> steps) : steps_(std::move(steps)) {
    detail::require(!steps_.empty(), "DistSchedule: empty step table");
    detail::require(steps_.front().from_slot == 1, "DistSchedule: first step must start at slot 1");
    for (std::size_t k = 1; k < steps_.size(); ++k) {
      detail::require(steps_[k].from_slot > steps_[k - 1].from_slot,
                      "DistSchedule: step start slots must increase");
    }
  }

  const PerturbationDist& at(std::size_t slot) const {
    const Step* current = &steps_.front();
    for (const auto& s : steps_) {
      if (s.from_slot > slot) break;
      current = &s;
    }
    return current->dist;
  }

  Moments moments_at(std::size_t slot) const { return moments(at(slot)); }
  const std::vector<Step>& steps() const { return steps_; }

 private:
  std::vector<Step> steps_;
};

}  // namespace dbf

#endif  // DBF_PERTURBATION_HPP_
