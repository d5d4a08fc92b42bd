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

// Histogram of rotated phases with a Laplacian overlay, and the
// Kolmogorov-Smirnov distance between |phi| and the matching exponential law.

#ifndef DBF_HARNESS_HISTOGRAM_HPP_
#define DBF_HARNESS_HISTOGRAM_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "dbf/harness/csv.hpp"
#include "dbf/model.hpp"
#include "dbf/phasor.hpp"
#include "dbf/protocol.hpp"

namespace dbf::harness {

// Two-sided KS distance between the empirical CDF of |phi| and the CDF of
// an exponential with mean phi0 (phi0 = 0 is a point mass at 0).
inline double ks_distance_abs_laplacian(std::span<const double> phases, double phi0) {
  dbf::detail::require(!phases.empty(), "ks_distance: empty sample");
  std::vector<double> v(phases.size());
  std::transform(phases.begin(), phases.end(), v.begin(), [](double p) { return std::abs(p); });
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  if (phi0 <= 0.0) {
    // Point mass at zero; phases within rounding of zero count as on it.
    const auto off = std::count_if(v.begin(), v.end(), [](double a) { return a > 1e-9; });
    return static_cast<double>(off) / n;
  }
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double cdf = laplacian_abs_cdf(v[i], phi0);
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return d;
}

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  double empirical_mass = 0.0;
  double laplacian_mass = 0.0;
};

struct PhaseHistogram {
  std::size_t timeslot = 0;
  double y = 0.0;
  double n_sensors = 0.0;
  double phi0 = 0.0;
  double ks_distance = 0.0;
  std::vector<HistogramBin> bins;
};

// Odd bin count so that one bin is centred on zero.
inline constexpr std::size_t kDefaultPhaseBins = 61;

inline PhaseHistogram phase_histogram(const SensorEnsemble& ensemble, std::size_t bins = kDefaultPhaseBins) {
  dbf::detail::require(bins >= 1 && bins % 2 == 1, "phase_histogram: bin count must be odd");
  require_unit_gains(ensemble.gains());
  const auto rotated = rotate_to_zero_phase(ensemble.gains(), ensemble.received_phases());
  PhaseHistogram h;
  h.n_sensors = static_cast<double>(ensemble.count());
  h.y = std::min(ensemble.strength(), h.n_sensors);
  // phi0 = sqrt(N/y - 1) turns an O(eps) rounding deficit into O(sqrt(eps));
  // snap to exact coherence.
  if (h.y >= h.n_sensors * (1.0 - 1e-12)) h.y = h.n_sensors;
  h.phi0 = phi0_from_y(h.y, h.n_sensors);
  h.ks_distance = ks_distance_abs_laplacian(rotated.phases, h.phi0);

  const double width = kTwoPi / static_cast<double>(bins);
  const double start = -kPi;
  h.bins.resize(bins);
  auto lap_cdf = [&](double x) {
    // CDF of the signed Laplacian law.
    if (h.phi0 <= 0.0) return x >= 0.0 ? 1.0 : 0.0;
    return x < 0.0 ? 0.5 * std::exp(x / h.phi0) : 1.0 - 0.5 * std::exp(-x / h.phi0);
  };
  // Tail mass beyond +-pi is folded into the outer bins.
  for (std::size_t k = 0; k < bins; ++k) {
    auto& b = h.bins[k];
    b.left = start + width * static_cast<double>(k);
    b.right = k + 1 == bins ? kPi : start + width * static_cast<double>(k + 1);
    const double lo = k == 0 ? 0.0 : lap_cdf(b.left);
    const double hi = k + 1 == bins ? 1.0 : lap_cdf(b.right);
    b.laplacian_mass = hi - lo;
  }
  const double share = 1.0 / static_cast<double>(rotated.phases.size());
  for (double p : rotated.phases) {
    auto k = static_cast<std::size_t>(std::floor((p - start) / width));
    k = std::min(k, bins - 1);
    h.bins[k].empirical_mass += share;
  }
  return h;
}

// Runs the protocol through `slot` (inclusive) and bins the phases there.
inline PhaseHistogram emit_phase_histogram(const ProtocolConfig& config, std::size_t slot,
                                           std::size_t bins = kDefaultPhaseBins) {
  dbf::detail::require(slot >= 1 && slot <= config.horizon, "emit_phase_histogram: slot outside horizon");
  ProtocolRun run(config);
  while (run.state().timeslot <= slot) run.step();
  auto h = phase_histogram(run.state().ensemble, bins);
  h.timeslot = slot;
  return h;
}

// Runs until the best strength first reaches `fraction` of the optimum.
// Returns nullopt if the horizon runs out first.
inline std::optional<PhaseHistogram> histogram_at_fraction(const ProtocolConfig& config, double fraction,
                                                           std::size_t bins = kDefaultPhaseBins) {
  ProtocolRun run(config);
  const double target = fraction * run.state().ensemble.optimum();
  while (!run.done()) {
    const auto rec = run.step();
    if (run.state().y_best >= target) {
      auto h = phase_histogram(run.state().ensemble, bins);
      h.timeslot = rec.timeslot;
      return h;
    }
  }
  return std::nullopt;
}

inline void write_histogram(std::ostream& os, const PhaseHistogram& h, Metadata meta = {}) {
  meta.emplace_back("timeslot", std::to_string(h.timeslot));
  meta.emplace_back("y", fmt_double(h.y));
  meta.emplace_back("phi0", fmt_double(h.phi0));
  meta.emplace_back("ks_distance", fmt_double(h.ks_distance));
  write_metadata(os, meta);
  os << "bin_left,bin_right,empirical_mass,laplacian_mass\n";
  for (const auto& b : h.bins) {
    os << fmt_double(b.left) << ',' << fmt_double(b.right) << ',' << fmt_double(b.empirical_mass) << ','
       << fmt_double(b.laplacian_mass) << '\n';
  }
}

}  // namespace dbf::harness

#endif  // DBF_HARNESS_HISTOGRAM_HPP_
