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

// Monte-Carlo simulation of the one-bit feedback phase-alignment loop.
//
// Every slot each sensor perturbs its beamforming phase by an independent
// draw, the receiver measures the resulting strength Y[n], and a single
// feedback bit tells all sensors whether Y[n] strictly exceeded the
// reference strength. Accepted perturbations are kept, rejected ones are
// discarded.

#ifndef DBF_PROTOCOL_HPP_
#define DBF_PROTOCOL_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "dbf/errors.hpp"
#include "dbf/perturbation.hpp"
#include "dbf/phasor.hpp"
#include "dbf/rng.hpp"

namespace dbf {

// How many past measurements the receiver compares against. An unbounded
// window is the running maximum over the whole run; a window of W slots
// uses the best of the last W measurements.
struct FeedbackWindow {
  std::optional<std::size_t> slots;

  static FeedbackWindow unbounded() { return {}; }
  static FeedbackWindow last(std::size_t w) {
    detail::require(w >= 1, "FeedbackWindow: window must be >= 1 slot");
    return {w};
  }
  bool is_unbounded() const { return !slots.has_value(); }
};

struct TraceRecord {
  std::size_t timeslot = 0;
  double y = 0.0;
  // Reference strength the measurement was compared against.
  double y_best = 0.0;
  bool accepted = false;
  double delta0_used = 0.0;
};

struct ProtocolState {
  SensorEnsemble ensemble;
  std::size_t timeslot = 1;
  double y_best = 0.0;
  FeedbackWindow window;
  // Measurements inside the sliding window (windowed mode only).
  std::deque<double> recent;
};

// Per-sensor perturbation streams.
using SensorStreams = std::vector<CounterRng>;

inline SensorStreams make_sensor_streams(const CounterRng& parent, std::size_t n_sensors) {
  SensorStreams streams;
  streams.reserve(n_sensors);
  for (std::size_t i = 0; i < n_sensors; ++i) streams.push_back(parent.split(i));
  return streams;
}

// theta_i = 0; the combined offset gamma_i + psi_i of sensor i is drawn
// uniformly in [0, 2pi) from substream i of phase_seed.
inline ProtocolState init_state(std::size_t n_sensors, std::vector<double> gains,
                                std::uint64_t phase_seed,
                                FeedbackWindow window = FeedbackWindow::unbounded()) {
  detail::require(n_sensors >= 1, "init_state: need at least one sensor");
  if (gains.empty()) gains.assign(n_sensors, 1.0);
  detail::require(gains.size() == n_sensors, "init_state: gains length != n_sensors");
  const CounterRng root(phase_seed);
  std::vector<double> offsets(n_sensors);
  for (std::size_t i = 0; i < n_sensors; ++i) {
    auto s = root.split(i);
    offsets[i] = s.uniform(0.0, kTwoPi);
  }
  ProtocolState state{SensorEnsemble(std::move(gains), std::move(offsets)), 1, 0.0, window, {}};
  state.y_best = state.ensemble.strength();
  if (!window.is_unbounded()) state.recent.push_back(state.y_best);
  return state;
}

inline TraceRecord protocol_step(ProtocolState& state, const PerturbationDist& dist,
                                 SensorStreams& streams) {
  auto& ens = state.ensemble;
  const std::size_t n = ens.count();
  detail::require(streams.size() == n, "protocol_step: one stream per sensor required");

  std::vector<double> deltas(n);
  std::vector<double> perturbed(n);
  for (std::size_t i = 0; i < n; ++i) {
    deltas[i] = draw(dist, streams[i]);
    perturbed[i] = ens.raw_received_phase(i) + deltas[i];
  }
  const double y = mag(ens.gains(), perturbed);
  const double reference = state.y_best;
  const bool accepted = y > reference;
  if (accepted) {
    auto theta = ens.raw_beam_phases();
    for (std::size_t i = 0; i < n; ++i) theta[i] += deltas[i];
  }

  if (state.window.is_unbounded()) {
    state.y_best = std::max(state.y_best, y);
  } else {
    state.recent.push_back(y);
    while (state.recent.size() > *state.window.slots) state.recent.pop_front();
    state.y_best = *std::max_element(state.recent.begin(), state.recent.end());
  }

  TraceRecord rec{state.timeslot, y, reference, accepted, dist.delta0()};
  ++state.timeslot;
  return rec;
}

enum class DriftModel {
  // Each sensor drifts at +D or -D with equal probability.
  kRandomSign,
  // Each sensor drifts at a rate drawn uniformly from [-D, D].
  kUniform,
};

inline void assign_drift_directions(ProtocolState& state, DriftModel model, const CounterRng& parent) {
  std::vector<double> dirs(state.ensemble.count());
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    auto s = parent.split(i);
    dirs[i] = model == DriftModel::kRandomSign ? ((s() >> 63) ? 1.0 : -1.0) : s.uniform(-1.0, 1.0);
  }
  state.ensemble.set_drift_directions(std::move(dirs));
}

// Advances psi_i by doppler_magnitude * direction_i.
inline void evolve_channels(ProtocolState& state, double doppler_magnitude) {
  detail::require(doppler_magnitude >= 0.0, "evolve_channels: negative Doppler magnitude");
  if (doppler_magnitude == 0.0) return;
  state.ensemble.advance_channels(doppler_magnitude);
}

struct ProtocolConfig {
  std::size_t n_sensors = 10;
  // Empty means unit gains.
  std::vector<double> gains;
  DistSchedule schedule{make_dist(Family::kUniform, kPi / 20.0)};
  std::size_t horizon = 1000;
  std::uint64_t seed = 1;
  FeedbackWindow window = FeedbackWindow::unbounded();
  double doppler_magnitude = 0.0;
  DriftModel drift_model = DriftModel::kRandomSign;
};

// Stepwise driver; run_protocol is the batch form. Seed layout: substream 0
// of the master seed draws the initial offsets, substream 1 the
// perturbations, substream 2 the drift directions.
class ProtocolRun {
 public:
  explicit ProtocolRun(const ProtocolConfig& config) : config_(config) {
    detail::require(config.horizon >= 1, "ProtocolRun: horizon must be >= 1");
    detail::require(config.doppler_magnitude >= 0.0, "ProtocolRun: negative Doppler magnitude");
    const CounterRng master(config.seed);
    state_ = init_state(config.n_sensors, config.gains, master.split(0).key(), config.window);
    streams_ = make_sensor_streams(master.split(1), config.n_sensors);
    if (config.doppler_magnitude > 0.0) {
      assign_drift_directions(state_, config.drift_model, master.split(2));
    }
  }

  bool done() const { return state_.timeslot > config_.horizon; }

  // Switches channel drift on from the next slot, with directions drawn
  // from the drift substream of the master seed.
  void enable_drift(double doppler_magnitude, DriftModel model) {
    detail::require(doppler_magnitude >= 0.0, "enable_drift: negative Doppler magnitude");
    config_.doppler_magnitude = doppler_magnitude;
    config_.drift_model = model;
    assign_drift_directions(state_, model, CounterRng(config_.seed).split(2));
  }

  TraceRecord step() {
    evolve_channels(state_, config_.doppler_magnitude);
    return protocol_step(state_, config_.schedule.at(state_.timeslot), streams_);
  }

  const ProtocolState& state() const { return state_; }
  ProtocolState& state() { return state_; }
  const ProtocolConfig& config() const { return config_; }

 private:
  ProtocolConfig config_;
  ProtocolState state_;
  SensorStreams streams_;
};

inline std::vector<TraceRecord> run_protocol(const ProtocolConfig& config) {
  ProtocolRun run(config);
  std::vector<TraceRecord> trace;
  trace.reserve(config.horizon);
  while (!run.done()) trace.push_back(run.step());
  return trace;
}

}  // namespace dbf

#endif  // DBF_PROTOCOL_HPP_
