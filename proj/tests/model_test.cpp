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

#include <cmath>
#include <random>
#include <vector>

#include "dbf/errors.hpp"
#include "dbf/model.hpp"
#include "dbf/perturbation.hpp"
#include "oracles.hpp"

namespace dbf {
namespace {

const Moments kUniformPi30 = moments(make_dist(Family::kUniform, kPi / 30));

TEST(QFunction, Values) {
  EXPECT_DOUBLE_EQ(q_function(0.0), 0.5);
  // 0.158655253931457051414767454368 from a 30-digit evaluation.
  EXPECT_NEAR(q_function(1.0), 0.1586552539, 1e-9);
  EXPECT_NEAR(q_function(1.0), 0.15865525393145705, 1e-15);
  for (double x : {0.1, 0.7, 1.3, 2.9, 5.0, 7.7}) EXPECT_NEAR(q_function(x) + q_function(-x), 1.0, 1e-15);
}

TEST(QFunction, AgainstQuadratureOnGrid) {
  for (double x = 0.0; x <= 8.0; x += 0.125) {
    const double tail = oracle::integrate(oracle::normal_density, x, x + 40.0, 1e-16);
    EXPECT_NEAR(q_function(x), tail, 1e-12) << x;
    EXPECT_NEAR(q_function(-x), 1.0 - tail, 1e-12) << x;
  }
}

TEST(GFunc, Values) {
  EXPECT_NEAR(g_func(0.0), 0.3989422804014327, 1e-15);
  EXPECT_LT(g_func(8.0), 1e-13);
  EXPECT_NEAR(g_func(1.0), 0.0833154705876862984, 1e-15);
  EXPECT_THROW(g_func(-0.1), DomainError);
}

TEST(GFunc, PositiveAndDecreasing) {
  double prev = g_func(0.0);
  for (double x = 0.05; x <= 8.0; x += 0.05) {
    const double g = g_func(x);
    EXPECT_GT(g, 0.0);
    EXPECT_LT(g, prev);
    prev = g;
  }
}

TEST(Phi0, Values) {
  EXPECT_DOUBLE_EQ(phi0_from_y(100, 100), 0.0);
  EXPECT_DOUBLE_EQ(phi0_from_y(50, 100), 1.0);
  EXPECT_DOUBLE_EQ(phi0_from_y(20, 100), 2.0);
  EXPECT_THROW(phi0_from_y(0.0, 100), DomainError);
  EXPECT_THROW(phi0_from_y(100.5, 100), DomainError);
}

TEST(Laplacian, PdfNormalisationAndMoments) {
  for (double phi0 : {0.1, 0.5, 1.0, 2.0}) {
    EXPECT_DOUBLE_EQ(laplacian_pdf(0.0, phi0), 1.0 / (2 * phi0));
    const double hi = 60.0 * phi0;
    const auto pdf = [phi0](double t) { return std::exp(-t / phi0) / (2 * phi0); };
    const double total = 2 * oracle::integrate(pdf, 0.0, hi);
    EXPECT_NEAR(total, 1.0, 1e-8);
    const double c1 = 2 * oracle::integrate([&](double t) { return pdf(t) * std::cos(t); }, 0.0, hi);
    const double c2 = 2 * oracle::integrate([&](double t) { return pdf(t) * std::cos(2 * t); }, 0.0, hi);
    EXPECT_NEAR(c1, 1.0 / (1 + phi0 * phi0), 1e-8);
    EXPECT_NEAR(c2, 1.0 / (1 + 4 * phi0 * phi0), 1e-8);
    // The library density integrates the same way.
    EXPECT_NEAR(oracle::integrate([&](double t) { return laplacian_pdf(t, phi0); }, -hi, hi), 1.0, 1e-8);
  }
  EXPECT_THROW(laplacian_pdf(0.0, 0.0), DomainError);
}

TEST(Laplacian, Phi0RoundTrip) {
  for (double n : {10.0, 100.0, 2000.0}) {
    for (double frac : {0.01, 0.2, 0.5, 0.8, 0.999}) {
      const double y = frac * n;
      const double phi0 = phi0_from_y(y, n);
      EXPECT_NEAR(1.0 / (1.0 + phi0 * phi0), frac, 1e-14);
    }
  }
}

TEST(Variances, DegenerateCases) {
  EXPECT_DOUBLE_EQ(variances(30, 100, {1.0, 1.0}).sigma1_sq, 0.0);
  for (double d0 : {0.05, 0.3, 1.0}) {
    EXPECT_NEAR(variances(100, 100, moments(make_dist(Family::kTwoPoint, d0))).sigma1_sq, 0.0, 1e-12);
  }
  EXPECT_THROW(variances(0, 100, kUniformPi30), DomainError);
}

TEST(Variances, NonNegativeOverGrid) {
  for (double frac : {0.01, 0.3, 0.7, 1.0}) {
    for (double d0 : {0.01, 0.3, 1.0, 1.5}) {
      const auto v = variances(frac * 100, 100, moments(make_dist(Family::kUniform, d0)));
      EXPECT_GE(v.sigma1_sq, 0.0);
      EXPECT_GE(v.sigma2_sq, 0.0);
    }
  }
}

// Per-sensor variance of cos(phi + d) - C cos(phi) summed over Laplacian
// phases: Var = (1 - C^2)/2 + (C2 - C^2)/2 cos(2 phi).
TEST(Variances, MatchesLaplacianSampledSum) {
  std::mt19937_64 gen(20240601);
  std::exponential_distribution<double> mag(1.0);  // phi0 = 1
  std::bernoulli_distribution sign(0.5);
  const double c = kUniformPi30.c_delta, c2 = kUniformPi30.c_2delta;
  constexpr int kSamples = 1000000;
  double sum = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    const double phi = (sign(gen) ? 1.0 : -1.0) * mag(gen);
    sum += 0.5 * (1 - c * c) + 0.5 * (c2 - c * c) * std::cos(2 * phi);
  }
  const double oracle_s1sq = 100.0 * sum / kSamples;
  EXPECT_NEAR(variances(50, 100, kUniformPi30).sigma1_sq, oracle_s1sq, 0.01 * oracle_s1sq);
}

TEST(ModelStep, IdentityWithoutPerturbation) {
  EXPECT_DOUBLE_EQ(model_step(25.0, 100, {1.0, 1.0}), 25.0);
}

TEST(ModelStep, FrozenValue) {
  // 30-digit evaluation of y + sigma1 g(x) at N = 100, y = 10.
  EXPECT_NEAR(model_step(10.0, 100, kUniformPi30), 10.1591387593397180, 1e-12);
  EXPECT_NEAR(model_state(10.0, 100, kUniformPi30).sigma1, 0.421400174789927282, 1e-13);
}

TEST(ModelStep, TwoFormsAgree) {
  for (double n : {1.0, 10.0, 100.0, 5000.0}) {
    for (double frac : {0.001, 0.05, 0.3, 0.6, 0.9, 1.0}) {
      for (double d0 : {1e-3, 0.05, 0.3, 1.0, kPi / 2}) {
        for (const auto& d : {make_dist(Family::kUniform, d0), make_dist(Family::kTwoPoint, d0),
                              make_dist(Family::kThreePoint, d0, 0.2)}) {
          const double y = std::max(frac * n, 1e-3);
          const double a = model_step(y, n, moments(d));
          const double b = model_step_tail_form(y, n, moments(d));
          EXPECT_NEAR(a, b, 1e-12 * a) << n << ' ' << y << ' ' << d0;
        }
      }
    }
  }
}

// E[max(C y + x1, y)], x1 ~ Normal(0, sigma1^2), by 1e7 draws.
TEST(ModelStep, MatchesGaussianOneStepExpectation) {
  const double y = 10.0, n = 100.0;
  const double s1 = std::sqrt(variances(y, n, kUniformPi30).sigma1_sq);
  std::mt19937_64 gen(777);
  std::normal_distribution<double> normal(0.0, s1);
  constexpr int kDraws = 10000000;
  double s = 0, ss = 0;
  for (int i = 0; i < kDraws; ++i) {
    const double v = std::max(kUniformPi30.c_delta * y + normal(gen), y);
    s += v;
    ss += v * v;
  }
  const double mean = s / kDraws;
  const double se = std::sqrt((ss / kDraws - mean * mean) / kDraws);
  EXPECT_LE(std::abs(model_step(y, n, kUniformPi30) - mean), 3 * se);
}

TEST(ModelStep, NondecreasingAndClamped) {
  for (double frac : {0.01, 0.5, 0.99, 1.0}) {
    for (double d0 : {0.01, 0.2, 1.2}) {
      const double y = frac * 50;
      const auto r = model_step_detail(y, 50, moments(make_dist(Family::kUniform, d0)));
      EXPECT_GE(r.y_next, y);
      EXPECT_LE(r.y_next, 50.0);
    }
  }
  // Two sensors, wide uniform perturbation: the surrogate overshoots N.
  const auto r = model_step_detail(1.99, 2, moments(make_dist(Family::kUniform, 2.0)));
  EXPECT_TRUE(r.clamped);
  EXPECT_DOUBLE_EQ(r.y_next, 2.0);
}

TEST(ModelStep, TwoPointFixedPointAtCoherence) {
  EXPECT_DOUBLE_EQ(model_step(100, 100, moments(make_dist(Family::kTwoPoint, 0.2))), 100.0);
}

TEST(ModelStep, DomainErrors) {
  EXPECT_THROW(model_step(0.0, 100, kUniformPi30), DomainError);
  EXPECT_THROW(model_step(101, 100, kUniformPi30), DomainError);
  EXPECT_THROW(model_step(-1, 100, kUniformPi30), DomainError);
}

// dF/dy with sigma1 held equals 1 - (1 - C) Q(x) and lies in (C, 1].
TEST(ModelStep, PartialDerivativeBand) {
  for (double n : {100.0, 1000.0}) {
    for (double frac : {0.05, 0.3, 0.6, 0.9}) {
      for (double d0 : {0.02, kPi / 30, kPi / 10, 0.6}) {
        const auto m = moments(make_dist(Family::kUniform, d0));
        const double y = frac * n;
        const double s1 = std::sqrt(variances(y, n, m).sigma1_sq);
        const auto f = [&](double t) { return t + s1 * g_func(t * (1 - m.c_delta) / s1); };
        const double h = 1e-4 * y;
        const double fd = (f(y + h) - f(y - h)) / (2 * h);
        EXPECT_GT(fd, m.c_delta);
        EXPECT_LE(fd, 1.0 + 1e-6);
        EXPECT_NEAR(fd, 1 - (1 - m.c_delta) * q_function(y * (1 - m.c_delta) / s1), 1e-6);
      }
    }
  }
}

TEST(RunModel, HorizonOneAndMonotone) {
  const DistSchedule s(make_dist(Family::kUniform, kPi / 30));
  const auto one = run_model(100, s, 1);
  ASSERT_EQ(one.y.size(), 1u);
  EXPECT_DOUBLE_EQ(one.y[0], 10.0);
  const auto t = run_model(100, s, 3000);
  ASSERT_EQ(t.y.size(), 3000u);
  for (std::size_t k = 1; k < t.y.size(); ++k) {
    EXPECT_GE(t.y[k], t.y[k - 1]);
    EXPECT_LE(t.y[k], 100.0);
  }
  EXPECT_NEAR(t.y[1], 10.1591387593397180, 1e-12);
  EXPECT_THROW(run_model(100, s, 0), ArgumentError);
  EXPECT_THROW(run_model(0, s, 10), ArgumentError);
}

TEST(RunModel, ScheduleIsFollowed) {
  const DistSchedule s({{1, make_dist(Family::kUniform, 0.3)}, {5, make_dist(Family::kUniform, 0.05)}});
  const auto t = run_model(100, s, 8);
  double y = 10.0;
  for (std::size_t slot = 1; slot < 8; ++slot) {
    y = model_step(y, 100, moments(slot < 5 ? make_dist(Family::kUniform, 0.3) : make_dist(Family::kUniform, 0.05)));
    EXPECT_DOUBLE_EQ(t.y[slot], y);
  }
}

TEST(RunModel, CustomStart) {
  const DistSchedule s(make_dist(Family::kUniform, kPi / 30));
  EXPECT_DOUBLE_EQ(run_model(100, s, 2, 8.0).y[0], 8.0);
  EXPECT_THROW(run_model(100, s, 2, 0.0), ArgumentError);
}

TEST(RequireUnitGains, RejectsHeterogeneous) {
  EXPECT_NO_THROW(require_unit_gains(std::vector<double>{1, 1}));
  EXPECT_THROW(require_unit_gains(std::vector<double>{1, 2}), ArgumentError);
}

}  // namespace
}  // namespace dbf
