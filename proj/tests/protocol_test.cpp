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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <vector>

#include "dbf/errors.hpp"
#include "dbf/parallel.hpp"
#include "dbf/protocol.hpp"
#include "dbf/tracking.hpp"

namespace dbf {
namespace {

ProtocolConfig config(std::size_t n, double d0, std::size_t horizon, std::uint64_t seed) {
  ProtocolConfig c;
  c.n_sensors = n;
  c.schedule = DistSchedule(make_dist(Family::kUniform, d0));
  c.horizon = horizon;
  c.seed = seed;
  return c;
}

TEST(InitState, SingleSensor) {
  const auto s = init_state(1, {}, 9);
  EXPECT_DOUBLE_EQ(s.y_best, 1.0);
  EXPECT_EQ(s.timeslot, 1u);
}

TEST(InitState, ZeroBeamPhasesAndBound) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = init_state(100, {}, seed);
    for (double th : s.ensemble.raw_beam_phases()) EXPECT_EQ(th, 0.0);
    EXPECT_GE(s.y_best, 0.0);
    EXPECT_LE(s.y_best, 100.0);
    EXPECT_DOUBLE_EQ(s.y_best, s.ensemble.strength());
  }
  EXPECT_THROW(init_state(0, {}, 1), ArgumentError);
  EXPECT_THROW(init_state(3, {1.0, 1.0}, 1), ArgumentError);
}

// Mean of |sum of N random unit phasors| is close to sqrt(pi N)/2.
TEST(InitState, RayleighMean) {
  double sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 500; ++seed) sum += init_state(100, {}, seed).y_best;
  EXPECT_NEAR(sum / 500, std::sqrt(kPi * 100) / 2, 0.05 * std::sqrt(kPi * 100) / 2);
}

TEST(ProtocolStep, ForcedAccept) {
  // Two sensors 0.1 rad apart; a two-point draw of +0.05 / -0.05 aligns them.
  ProtocolState s = init_state(2, {}, 1);
  s.ensemble = SensorEnsemble(std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 0.1});
  s.y_best = s.ensemble.strength();
  const auto dist = make_dist(Family::kTwoPoint, 0.05);
  SensorStreams streams;
  for (std::uint64_t k = 0; streams.size() < 2; ++k) {
    CounterRng r(k);
    CounterRng probe = r;
    const double want = streams.empty() ? 0.05 : -0.05;
    if (draw(dist, probe) == want) streams.push_back(r);
  }
  const auto rec = protocol_step(s, dist, streams);
  EXPECT_TRUE(rec.accepted);
  EXPECT_NEAR(rec.y, 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(s.ensemble.raw_beam_phases()[0], 0.05);
  EXPECT_DOUBLE_EQ(s.ensemble.raw_beam_phases()[1], -0.05);
  EXPECT_EQ(s.timeslot, 2u);
}

TEST(ProtocolStep, SingleSensorAlwaysRejects) {
  auto c = config(1, kPi / 20, 200, 4);
  const auto trace = run_protocol(c);
  ProtocolRun run(c);
  while (!run.done()) run.step();
  for (const auto& r : trace) EXPECT_FALSE(r.accepted);
  EXPECT_EQ(run.state().ensemble.raw_beam_phases()[0], 0.0);
}

TEST(ProtocolStep, RejectedStepIsBitIdentical) {
  ProtocolRun run(config(30, kPi / 10, 500, 8));
  std::size_t rejected = 0;
  while (!run.done()) {
    const auto before = std::vector<double>(run.state().ensemble.raw_beam_phases().begin(),
                                            run.state().ensemble.raw_beam_phases().end());
    const auto rec = run.step();
    const auto after = run.state().ensemble.raw_beam_phases();
    if (!rec.accepted) {
      ++rejected;
      ASSERT_EQ(std::memcmp(before.data(), after.data(), before.size() * sizeof(double)), 0);
    } else {
      EXPECT_GT(rec.y, rec.y_best);
    }
  }
  EXPECT_GT(rejected, 0u);
}

TEST(ProtocolStep, StreamCountMismatch) {
  auto s = init_state(3, {}, 1);
  SensorStreams streams(2);
  EXPECT_THROW(protocol_step(s, make_dist(Family::kUniform, 0.1), streams), ArgumentError);
}

// Straight-line replay of the update rule with std::complex and the same
// seed layout.
TEST(RunProtocol, MatchesReferenceReplay) {
  const auto c = config(10, kPi / 20, 2000, 31);
  const auto trace = run_protocol(c);

  const CounterRng master(31);
  const CounterRng offsets_root(master.split(0).key());
  std::vector<double> phase(10);
  std::vector<CounterRng> rng;
  for (std::size_t i = 0; i < 10; ++i) {
    auto s = offsets_root.split(i);
    phase[i] = s.uniform(0.0, 2 * kPi);
    rng.push_back(master.split(1).split(i));
  }
  auto strength = [](const std::vector<double>& p) {
    std::complex<double> z = 0.0;
    for (double v : p) z += std::polar(1.0, v);
    return std::abs(z);
  };
  double best = strength(phase);
  for (std::size_t n = 0; n < 2000; ++n) {
    std::vector<double> trial(10);
    for (std::size_t i = 0; i < 10; ++i) trial[i] = phase[i] + (kPi / 20) * (2.0 * rng[i].uniform01() - 1.0);
    const double y = strength(trial);
    const bool accept = y > best;
    ASSERT_EQ(trace[n].timeslot, n + 1);
    ASSERT_NEAR(trace[n].y, y, 1e-12);
    ASSERT_NEAR(trace[n].y_best, best, 1e-12);
    ASSERT_EQ(trace[n].accepted, accept);
    ASSERT_DOUBLE_EQ(trace[n].delta0_used, kPi / 20);
    if (accept) {
      phase = trial;
      best = y;
    }
  }
}

TEST(RunProtocol, MonotoneBoundedDeterministic) {
  const auto c = config(40, kPi / 20, 1500, 12);
  const auto a = run_protocol(c);
  const auto b = run_protocol(c);
  ASSERT_EQ(a.size(), 1500u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].y, b[k].y);
    EXPECT_EQ(a[k].accepted, b[k].accepted);
    EXPECT_LE(a[k].y_best, 40.0 + 1e-9);
    if (k) {
      EXPECT_GE(a[k].y_best, a[k - 1].y_best);
    }
    if (a[k].y <= a[k].y_best) {
      EXPECT_FALSE(a[k].accepted);
    }
  }
}

TEST(RunProtocol, StepScheduleDeltaRecorded) {
  auto c = config(10, 0.3, 20, 1);
  c.schedule = DistSchedule({{1, make_dist(Family::kUniform, 0.3)}, {11, make_dist(Family::kTwoPoint, 0.1)}});
  const auto t = run_protocol(c);
  EXPECT_DOUBLE_EQ(t[9].delta0_used, 0.3);
  EXPECT_DOUBLE_EQ(t[10].delta0_used, 0.1);
}

TEST(RunProtocol, TenSensorsConvergeOnMostSeeds) {
  std::vector<int> ok(100, 0);
  parallel_for(100, [&](std::size_t k) {
    const auto c = config(10, kPi / 20, 2000, 1000 + k);
    ok[k] = run_protocol(c).back().y_best >= 0.95 * 10.0;
  });
  EXPECT_GE(std::count(ok.begin(), ok.end(), 1), 95);
}

TEST(RunProtocol, HundredSensorRunsTrackEachOther) {
  const auto a = run_protocol(config(100, kPi / 20, 3000, 1));
  const auto b = run_protocol(config(100, kPi / 20, 3000, 2));
  for (std::size_t n = 200; n < 3000; ++n) {
    EXPECT_LT(std::abs(a[n].y_best - b[n].y_best) / std::min(a[n].y_best, b[n].y_best), 0.10) << n;
  }
}

TEST(FeedbackWindow, SlidingMaximum) {
  auto c = config(20, kPi / 10, 300, 6);
  c.window = FeedbackWindow::last(3);
  ProtocolRun run(c);
  std::vector<double> ys{run.state().y_best};
  while (!run.done()) {
    const auto rec = run.step();
    const std::size_t from = ys.size() >= 3 ? ys.size() - 3 : 0;
    EXPECT_DOUBLE_EQ(rec.y_best, *std::max_element(ys.begin() + static_cast<std::ptrdiff_t>(from), ys.end()));
    ys.push_back(rec.y);
  }
  EXPECT_THROW(FeedbackWindow::last(0), ArgumentError);
}

TEST(FeedbackWindow, WindowOneComparesWithPreviousMeasurement) {
  auto c = config(20, kPi / 10, 100, 6);
  c.window = FeedbackWindow::last(1);
  const auto t = run_protocol(c);
  for (std::size_t k = 1; k < t.size(); ++k) EXPECT_DOUBLE_EQ(t[k].y_best, t[k - 1].y);
}

TEST(EvolveChannels, ZeroMagnitudeNoChange) {
  auto s = init_state(10, {}, 3);
  assign_drift_directions(s, DriftModel::kRandomSign, CounterRng(1));
  const auto before = s.ensemble.received_phases();
  evolve_channels(s, 0.0);
  EXPECT_EQ(s.ensemble.received_phases(), before);
  EXPECT_THROW(evolve_channels(s, -0.1), ArgumentError);
}

TEST(EvolveChannels, RandomSignDirections) {
  auto s = init_state(200, {}, 3);
  assign_drift_directions(s, DriftModel::kRandomSign, CounterRng(5));
  std::size_t plus = 0;
  for (double d : s.ensemble.drift_directions()) {
    EXPECT_TRUE(d == 1.0 || d == -1.0);
    plus += d > 0;
  }
  EXPECT_GT(plus, 60u);
  EXPECT_LT(plus, 140u);
  assign_drift_directions(s, DriftModel::kUniform, CounterRng(5));
  for (double d : s.ensemble.drift_directions()) {
    EXPECT_GE(d, -1.0);
    EXPECT_LE(d, 1.0);
  }
}

// Frozen theta from coherence: the two drift clusters separate, strength
// equals the direct sum and falls to |n_plus - n_minus| at quadrature.
TEST(EvolveChannels, CoherentEnsembleDecaysUnderRandomSignDrift) {
  auto s = init_state(100, {}, 10);
  // Beam phases cancel the offsets exactly.
  std::vector<double> theta(100);
  for (std::size_t i = 0; i < 100; ++i) theta[i] = -s.ensemble.raw_received_phase(i);
  s.ensemble.set_beam_phases(theta);
  EXPECT_NEAR(s.ensemble.strength(), 100.0, 1e-9);
  assign_drift_directions(s, DriftModel::kRandomSign, CounterRng(2));
  const std::vector<double> dirs(s.ensemble.drift_directions().begin(), s.ensemble.drift_directions().end());
  double prev = 100.0;
  for (int n = 1; n <= 100; ++n) {
    evolve_channels(s, kPi / 200);
    std::complex<double> z = 0.0;
    for (std::size_t i = 0; i < 100; ++i) z += std::polar(1.0, dirs[i] * n * kPi / 200);
    EXPECT_NEAR(s.ensemble.strength(), std::abs(z), 1e-9);
    EXPECT_LE(s.ensemble.strength(), prev + 1e-9);
    prev = s.ensemble.strength();
  }
  const auto plus = std::count(dirs.begin(), dirs.end(), 1.0);
  EXPECT_NEAR(prev, std::abs(2.0 * static_cast<double>(plus) - 100.0), 1e-9);
}

TEST(EvolveChannels, CommonDriftInvisible) {
  auto s = init_state(50, {}, 4);
  s.ensemble.set_drift_directions(std::vector<double>(50, -1.0));
  const double before = s.ensemble.strength();
  for (int n = 0; n < 300; ++n) evolve_channels(s, kPi / 200);
  EXPECT_NEAR(s.ensemble.strength(), before, 1e-10);
}

TEST(Tracking, BeatsFrozenControl) {
  ProtocolConfig c = config(100, kPi / 20, 20000, 3);
  c.window = FeedbackWindow::last(1);
  const auto r = run_tracking(c, TrackingSpec{});
  ASSERT_TRUE(r.acquired_at.has_value());
  EXPECT_EQ(r.control.size(), 4000u);
  EXPECT_EQ(r.trace.size(), *r.acquired_at + 4000);
  EXPECT_GT(r.tracking_mean, r.control_mean);
}

TEST(Tracking, NotAcquiredWithinHorizon) {
  ProtocolConfig c = config(100, kPi / 20, 5, 3);
  const auto r = run_tracking(c, TrackingSpec{});
  EXPECT_FALSE(r.acquired_at.has_value());
  EXPECT_TRUE(r.control.empty());
}

TEST(Parallel, RunsEveryIndexAndRethrows) {
  std::vector<int> hits(1000, 0);
  parallel_for(1000, [&](std::size_t i) { hits[i]++; }, 4);
  EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 1000);
  EXPECT_THROW(parallel_for(10, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }, 3),
               std::runtime_error);
}

}  // namespace
}  // namespace dbf
