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

// Tracking experiment under drifting channels: acquire coherence on static
// channels, switch drift on, and compare the adaptive loop against a
// control whose beamforming phases are frozen at the switch-over slot.

#ifndef DBF_TRACKING_HPP_
#define DBF_TRACKING_HPP_

#include <cstddef>
#include <numeric>
#include <optional>
#include <vector>

#include "dbf/protocol.hpp"

namespace dbf {

struct TrackingSpec {
  double doppler_magnitude = kPi / 200.0;
  DriftModel drift_model = DriftModel::kUniform;
  // Drift starts once the best strength first reaches this fraction of the
  // optimum.
  double acquisition_fraction = 0.75;
  std::size_t tracking_slots = 4000;
  // Length of the trailing averaging window.
  std::size_t trailing_slots = 1000;
};

struct TrackingResult {
  // Slot at which acquisition completed (drift starts the slot after).
  std::optional<std::size_t> acquired_at;
  std::vector<TraceRecord> trace;
  // Strength of the frozen-phase control, one per tracking slot.
  std::vector<double> control;
  // Trailing means of Y / G_opt.
  double tracking_mean = 0.0;
  double control_mean = 0.0;
};

// config.horizon caps the acquisition phase.
inline TrackingResult run_tracking(const ProtocolConfig& config, const TrackingSpec& spec) {
  detail::require(spec.trailing_slots >= 1 && spec.trailing_slots <= spec.tracking_slots,
                  "run_tracking: trailing window must fit in the tracking phase");
  ProtocolConfig acquisition = config;
  acquisition.doppler_magnitude = 0.0;
  acquisition.horizon = config.horizon + spec.tracking_slots;
  ProtocolRun run(acquisition);
  TrackingResult out;
  const double g_opt = run.state().ensemble.optimum();

  while (run.state().timeslot <= config.horizon) {
    out.trace.push_back(run.step());
    if (run.state().y_best >= spec.acquisition_fraction * g_opt) {
      out.acquired_at = out.trace.back().timeslot;
      break;
    }
  }
  if (!out.acquired_at) return out;

  run.enable_drift(spec.doppler_magnitude, spec.drift_model);
  ProtocolState frozen = run.state();
  out.control.reserve(spec.tracking_slots);
  for (std::size_t k = 0; k < spec.tracking_slots; ++k) {
    out.trace.push_back(run.step());
    evolve_channels(frozen, spec.doppler_magnitude);
    out.control.push_back(frozen.ensemble.strength());
  }

  const std::size_t from = out.trace.size() - spec.trailing_slots;
  double track = 0.0;
  for (std::size_t k = from; k < out.trace.size(); ++k) track += out.trace[k].y;
  const double ctrl = std::accumulate(out.control.end() - static_cast<std::ptrdiff_t>(spec.trailing_slots),
                                      out.control.end(), 0.0);
  out.tracking_mean = track / static_cast<double>(spec.trailing_slots) / g_opt;
  out.control_mean = ctrl / static_cast<double>(spec.trailing_slots) / g_opt;
  return out;
}

}  // namespace dbf

#endif  // DBF_TRACKING_HPP_
