// Copyright 2026 The becsq Authors
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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "becsq/schedule.hpp"

namespace becsq {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

TEST(Schedule, SingleFrequencyTrain) {
  const double w3 = 2.66171169;
  const double varpi = 2.0 * w3, dphi = kTwoPi * 0.05;
  const auto s = build_schedule({varpi}, dphi, 100.0);
  ASSERT_EQ(s.pulses.size(), 85u);  // 100 w3 / pi + 1
  const double tau = dphi / varpi;
  EXPECT_EQ(s.pulses[0].start, 0.0);
  EXPECT_NEAR(s.pulses[0].duration(), 0.5 * tau, 1e-14);
  for (std::size_t l = 1; l + 1 < s.pulses.size(); ++l) {
    EXPECT_NEAR(s.pulses[l].centre, l * std::numbers::pi / w3, 1e-12);
    EXPECT_NEAR(s.pulses[l].duration(), tau, 1e-12);
    EXPECT_GT(s.pulses[l].start, s.pulses[l - 1].end);
  }
  EXPECT_NEAR(s.duty_cycle(), 0.05, 1e-3);
  EXPECT_TRUE(s.is_on(s.pulses[7].centre));
  EXPECT_FALSE(s.is_on(0.5 * (s.pulses[7].end + s.pulses[8].start)));
  EXPECT_NEAR(s.probe_time(s.pulses[3].end), 0.5 * tau + 3 * tau, 1e-12);
}

TEST(Schedule, Continuous) {
  const auto s = build_schedule({}, 0.0, 12.5);
  ASSERT_EQ(s.pulses.size(), 1u);
  EXPECT_TRUE(s.continuous());
  EXPECT_EQ(s.duty_cycle(), 1.0);
  EXPECT_EQ(s.probe_time(5.0), 5.0);
}

// Overlap measure counted on a fine time grid as oracle.
TEST(Schedule, TwoFrequencyIntersection) {
  const double w1 = 1.0, w5 = 4.45883882;
  const double dphi = kTwoPi * 0.1, horizon = 2000.0;
  const auto s = build_schedule({2 * w1, 2 * w5}, dphi, horizon);
  const long samples = 4'000'000;
  long on = 0;
  for (long i = 0; i < samples; ++i) {
    const double t = (i + 0.5) * horizon / samples;
    bool all = true;
    for (double f : {2 * w1, 2 * w5}) {
      const double ph = std::remainder(f * t, kTwoPi);
      all = all && std::abs(ph) <= 0.5 * dphi;
    }
    on += all;
    EXPECT_EQ(all, s.is_on(t)) << t;
    if (::testing::Test::HasFailure()) break;
  }
  EXPECT_NEAR(s.duty_cycle(), static_cast<double>(on) / samples, 1e-4);
  const double product = 0.1 * 0.1;
  EXPECT_GT(s.duty_cycle(), 0.5 * product);
  EXPECT_LT(s.duty_cycle(), 2.0 * product);
}

TEST(Schedule, UnionMerges) {
  const auto s = build_schedule({2.0, 3.0}, 0.5, 50.0, GatingRule::Union);
  for (std::size_t i = 1; i < s.pulses.size(); ++i) EXPECT_GT(s.pulses[i].start, s.pulses[i - 1].end);
  for (double t = 0.01; t < 50.0; t += 0.37) {
    const bool a = std::abs(std::remainder(2.0 * t, kTwoPi)) <= 0.25;
    const bool b = std::abs(std::remainder(3.0 * t, kTwoPi)) <= 0.25;
    EXPECT_EQ(s.is_on(t), a || b) << t;
  }
}

TEST(Schedule, PhaseOrigin) {
  const double varpi = 2.0 * 4.45883882, origin = 25.0 * std::numbers::pi;
  const auto s = build_schedule({varpi}, kTwoPi * 0.1, 40.0, GatingRule::Intersection, origin);
  for (const auto& p : s.pulses) {
    if (p.start > 0.0 && p.end < 40.0) {
      EXPECT_NEAR(std::remainder(varpi * (origin + p.centre), kTwoPi), 0.0, 1e-9);
    }
  }
  for (double t = 0.013; t < 40.0; t += 0.11) {
    EXPECT_EQ(s.is_on(t), std::abs(std::remainder(varpi * (origin + t), kTwoPi)) <= kTwoPi * 0.05) << t;
  }
}

TEST(Schedule, SparseIntersectionWarns) {
  const auto s = build_schedule({2.0, 2.0 * std::numbers::sqrt2}, 0.01, 5.0);
  EXPECT_FALSE(s.warnings.empty());
}

TEST(Schedule, Errors) {
  EXPECT_THROW(build_schedule({1.0}, 0.0, 10.0), std::invalid_argument);
  EXPECT_THROW(build_schedule({1.0}, 7.0, 10.0), std::invalid_argument);
  EXPECT_THROW(build_schedule({-1.0}, 0.1, 10.0), std::invalid_argument);
  EXPECT_THROW(build_schedule({1.0}, 0.1, -1.0), std::invalid_argument);
  EXPECT_EQ(gating_rule_from_string("union"), GatingRule::Union);
  EXPECT_THROW(gating_rule_from_string("both"), std::invalid_argument);
}

}  // namespace
}  // namespace becsq
