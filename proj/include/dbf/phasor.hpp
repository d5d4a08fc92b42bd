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

// Phasor arithmetic for the signal received from an ensemble of
// transmitters: magnitude of sum_i a_i exp(j Phi_i), the coherent optimum
// sum_i a_i, and the rotation into the frame where the total phasor is real.

#ifndef DBF_PHASOR_HPP_
#define DBF_PHASOR_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "dbf/errors.hpp"

namespace dbf {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Maps any finite angle into [0, 2pi).
inline double wrap_two_pi(double phase) {
  double r = std::fmod(phase, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative value can round up to exactly 2pi.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

// Maps any finite angle into (-pi, pi].
inline double wrap_pi(double phase) {
  double r = std::remainder(phase, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

inline std::complex<double> phasor_sum(std::span<const double> gains,
                                       std::span<const double> phases) {
  detail::require(!gains.empty(), "phasor_sum: empty input");
  detail::require(gains.size() == phases.size(), "phasor_sum: gains/phases length mismatch");
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    re += gains[i] * std::cos(phases[i]);
    im += gains[i] * std::sin(phases[i]);
  }
  return {re, im};
}

// Received signal strength |sum_i a_i e^{j Phi_i}|.
inline double mag(std::span<const double> gains, std::span<const double> phases) {
  return std::abs(phasor_sum(gains, phases));
}

// Strength at perfect coherence: sum of the gains.
inline double g_opt(std::span<const double> gains) {
  detail::require(!gains.empty(), "g_opt: empty gains");
  double total = 0.0;
  for (double a : gains) {
    detail::require(a >= 0.0, "g_opt: negative gain");
    total += a;
  }
  return total;
}

struct ReceivedPhaseVector {
  std::vector<double> phases;
  std::vector<double> gains;
};

// Zero-phase tolerance on the imaginary part, relative to sum_i a_i.
inline constexpr double kZeroPhaseTolerance = 1e-9;

// Shifts every phase by -arg(sum) so that the total phasor is real and
// positive. Rotated phases are reported in (-pi, pi].
inline ReceivedPhaseVector rotate_to_zero_phase(std::span<const double> gains,
                                                std::span<const double> phases) {
  const auto total = phasor_sum(gains, phases);
  // Below the zero-phase tolerance the reference angle is rounding noise.
  if (std::abs(total) <= kZeroPhaseTolerance * g_opt(gains)) {
    throw DegenerateInputError("rotate_to_zero_phase: total phasor is zero");
  }
  const double reference = std::arg(total);
  ReceivedPhaseVector out;
  out.gains.assign(gains.begin(), gains.end());
  out.phases.reserve(phases.size());
  for (double p : phases) out.phases.push_back(wrap_pi(p - reference));
  return out;
}

// Per-sensor channel and oscillator state.
//
// Channel drift is stored as a per-sensor direction multiplier in [-1, 1];
// the drift in radians per timeslot is the configured Doppler magnitude
// times the direction.
//
// The algorithm only ever sees gamma_i + theta_i + psi_i, so the simulator
// stores the combined initial offset in channel_phases and leaves
// oscillator_offsets at zero; both remain available for callers that want
// to model them separately. Angles are kept unwrapped internally and are
// canonicalized to [0, 2pi) by the accessors.
class SensorEnsemble {
 public:
  SensorEnsemble() = default;

  explicit SensorEnsemble(std::size_t count)
      : gains_(count, 1.0),
        channel_phases_(count, 0.0),
        oscillator_offsets_(count, 0.0),
        beam_phases_(count, 0.0),
        drift_directions_(count, 0.0) {
    detail::require(count >= 1, "SensorEnsemble: need at least one sensor");
  }

  SensorEnsemble(std::vector<double> gains, std::vector<double> channel_phases)
      : gains_(std::move(gains)), channel_phases_(std::move(channel_phases)) {
    detail::require(!gains_.empty(), "SensorEnsemble: need at least one sensor");
    detail::require(gains_.size() == channel_phases_.size(),
                    "SensorEnsemble: gains/channel_phases length mismatch");
    for (double a : gains_) detail::require(a >= 0.0 && std::isfinite(a), "SensorEnsemble: bad gain");
    for (double p : channel_phases_) detail::require(std::isfinite(p), "SensorEnsemble: non-finite phase");
    oscillator_offsets_.assign(gains_.size(), 0.0);
    beam_phases_.assign(gains_.size(), 0.0);
    drift_directions_.assign(gains_.size(), 0.0);
  }

  std::size_t count() const { return gains_.size(); }

  std::span<const double> gains() const { return gains_; }
  std::span<const double> drift_directions() const { return drift_directions_; }

  double channel_phase(std::size_t i) const { return wrap_two_pi(channel_phases_.at(i)); }
  double oscillator_offset(std::size_t i) const { return wrap_two_pi(oscillator_offsets_.at(i)); }
  double beam_phase(std::size_t i) const { return wrap_two_pi(beam_phases_.at(i)); }

  // Raw (unwrapped) beamformer phases; exposed so the simulator can verify
  // that a rejected step leaves them bit-identical.
  std::span<const double> raw_beam_phases() const { return beam_phases_; }
  std::span<double> raw_beam_phases() { return beam_phases_; }

  // Phi_i = gamma_i + theta_i + psi_i (unwrapped).
  double raw_received_phase(std::size_t i) const {
    return oscillator_offsets_[i] + beam_phases_[i] + channel_phases_[i];
  }

  std::vector<double> received_phases() const {
    std::vector<double> out(count());
    for (std::size_t i = 0; i < count(); ++i) out[i] = raw_received_phase(i);
    return out;
  }

  double strength() const { return mag(gains_, received_phases()); }
  double optimum() const { return g_opt(gains_); }
  bool unit_gains() const {
    for (double a : gains_)
      if (a != 1.0) return false;
    return true;
  }

  void set_oscillator_offsets(std::vector<double> offsets) {
    detail::require(offsets.size() == count(), "set_oscillator_offsets: length mismatch");
    oscillator_offsets_ = std::move(offsets);
  }

  void set_drift_directions(std::vector<double> rates) {
    detail::require(rates.size() == count(), "set_drift_directions: length mismatch");
    for (double d : rates) detail::require(std::abs(d) <= 1.0, "set_drift_directions: |direction| > 1");
    drift_directions_ = std::move(rates);
  }

  void set_beam_phases(std::vector<double> phases) {
    detail::require(phases.size() == count(), "set_beam_phases: length mismatch");
    beam_phases_ = std::move(phases);
  }

  // Advances every channel phase by magnitude * direction_i (one timeslot).
  void advance_channels(double magnitude) {
    for (std::size_t i = 0; i < count(); ++i) channel_phases_[i] += magnitude * drift_directions_[i];
  }

 private:
  std::vector<double> gains_;
  std::vector<double> channel_phases_;
  std::vector<double> oscillator_offsets_;
  std::vector<double> beam_phases_;
  std::vector<double> drift_directions_;
};

}  // namespace dbf

#endif  // DBF_PHASOR_HPP_
