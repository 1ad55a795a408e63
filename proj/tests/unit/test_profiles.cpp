// Copyright 2026 The APB Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "apb/profiles.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace
{
using apb::KinematicState;
using apb::ProfileId;
using apb::RssParams;

constexpr ProfileId kAllProfiles[] = {ProfileId::FrontMaxBrake, ProfileId::RssRear, ProfileId::JerkBounded};

RssParams random_params(std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RssParams p;
  p.rho = u(rng) < 0.3 ? 0.0 : 1.5 * u(rng);
  p.a_max_brake = 3.0 + 9.0 * u(rng);
  p.a_min_brake = 1.0 + 7.0 * u(rng);
  p.a_max_accel = 3.0 * u(rng);
  p.j_max = 0.5 + 9.5 * u(rng);
  return p;
}
}  // namespace

TEST(FrontMaxBrake, StopsAtSpeedOverDecel)
{
  const RssParams p;
  const apb::BrakingMotion m(ProfileId::FrontMaxBrake, {0.0, 20.0, 0.0}, p);
  EXPECT_DOUBLE_EQ(m.stop_time(), 2.5);
  EXPECT_DOUBLE_EQ(m.stop_distance(), 25.0);
  EXPECT_DOUBLE_EQ(m.velocity(1.0), 12.0);
  EXPECT_DOUBLE_EQ(m.velocity(3.0), 0.0);
}

TEST(RssRear, StopTimeIncludesResponseTime)
{
  RssParams p;
  p.rho = 1.0;
  const apb::BrakingMotion m(ProfileId::RssRear, {0.0, 20.0, 0.0}, p);
  // accelerates to 22 m/s during rho, then brakes at 4 m/s^2
  EXPECT_DOUBLE_EQ(m.stop_time(), 1.0 + 22.0 / 4.0);
  EXPECT_DOUBLE_EQ(m.stop_distance(), 21.0 + 484.0 / 8.0);
  EXPECT_NEAR(m.velocity(m.stop_time() - 1e-12), 0.0, 1e-9);
}

TEST(JerkBounded, RampPhaseThenConstant)
{
  const RssParams p;  // j = 2, a_min = 4
  const apb::BrakeSchedule s = apb::brake_schedule_jerk({0.0, 20.0, 0.0}, p);
  EXPECT_DOUBLE_EQ(s.t1, 2.0);
  EXPECT_GT(s.t2, s.t1);
  EXPECT_DOUBLE_EQ(s.t_switch, 2.0);
  EXPECT_DOUBLE_EQ(s.v_at_switch, 16.0);
  EXPECT_DOUBLE_EQ(s.t_stop, 6.0);
  EXPECT_NEAR(s.d_jerk, 40.0 - 8.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.d_total, 40.0 - 8.0 / 3.0 + 32.0, 1e-12);
}

TEST(JerkBounded, SlowCarStopsDuringRamp)
{
  const RssParams p;
  const apb::BrakeSchedule s = apb::brake_schedule_jerk({0.0, 1.0, 0.0}, p);
  // 1 - t^2 = 0 before the ramp saturates at t = 2
  EXPECT_DOUBLE_EQ(s.t2, 1.0);
  EXPECT_DOUBLE_EQ(s.t_stop, 1.0);
  EXPECT_DOUBLE_EQ(s.v_at_switch, 0.0);
  EXPECT_NEAR(s.d_total, 2.0 / 3.0, 1e-12);
}

TEST(JerkBounded, TieTakesRampBranch)
{
  const RssParams p;  // t1 = 2; v0 = j t1^2 / 2 = 4 reaches zero at the same instant
  const apb::BrakeSchedule s = apb::brake_schedule_jerk({0.0, 4.0, 0.0}, p);
  EXPECT_DOUBLE_EQ(s.t1, 2.0);
  EXPECT_DOUBLE_EQ(s.t2, 2.0);
  EXPECT_DOUBLE_EQ(s.t_stop, 2.0);
  EXPECT_DOUBLE_EQ(s.v_at_switch, 0.0);
  EXPECT_NEAR(s.d_total, 8.0 - 8.0 / 3.0, 1e-12);
}

TEST(JerkBounded, InitialAccelerationIsClamped)
{
  const RssParams p;
  EXPECT_DOUBLE_EQ(apb::effective_initial_accel({0.0, 10.0, 1.5}, p), 0.0);
  EXPECT_DOUBLE_EQ(apb::effective_initial_accel({0.0, 10.0, -9.0}, p), -4.0);
  EXPECT_DOUBLE_EQ(apb::effective_initial_accel({0.0, 10.0, -1.0}, p), -1.0);
  // already at full braking: no ramp, constant deceleration from the start
  const apb::BrakingMotion m(ProfileId::JerkBounded, {0.0, 8.0, -6.0}, p);
  EXPECT_DOUBLE_EQ(m.stop_time(), 2.0);
  EXPECT_DOUBLE_EQ(m.stop_distance(), 8.0);
}

TEST(JerkBounded, PhaseStateMatchesCubic)
{
  const KinematicState s = apb::jerk_phase_state({1.0, 20.0, -1.0}, 2.0, 1.5);
  EXPECT_DOUBLE_EQ(s.a, -4.0);
  EXPECT_DOUBLE_EQ(s.v, 20.0 - 1.5 - 2.25);
  EXPECT_NEAR(s.x, 1.0 + 30.0 - 0.5 * 2.25 - 2.0 * 3.375 / 6.0, 1e-12);
}

TEST(JerkBounded, PhaseStateRejectsBadInput)
{
  EXPECT_THROW(apb::jerk_phase_state({0.0, 10.0, 0.0}, 2.0, -0.1), std::invalid_argument);
  EXPECT_THROW(apb::jerk_phase_state({0.0, 10.0, 0.5}, 2.0, 0.1), std::invalid_argument);
  EXPECT_THROW(apb::jerk_phase_state({0.0, 10.0, 0.0}, 0.0, 0.1), std::invalid_argument);
  // 10 - t^2 = 0 at t = sqrt(10)
  EXPECT_THROW(apb::jerk_phase_state({0.0, 10.0, 0.0}, 2.0, 3.3), std::invalid_argument);
}

TEST(Profiles, StoppedCarStaysStopped)
{
  const RssParams p;
  for (const ProfileId id : {ProfileId::FrontMaxBrake, ProfileId::JerkBounded}) {
    const apb::BrakingMotion m(id, {0.0, 0.0, 0.0}, p);
    EXPECT_EQ(m.stop_time(), 0.0) << apb::to_string(id);
    EXPECT_EQ(m.stop_distance(), 0.0) << apb::to_string(id);
    EXPECT_EQ(m.velocity(5.0), 0.0) << apb::to_string(id);
  }
}

TEST(Profiles, NegativeTimeRejected)
{
  const RssParams p;
  EXPECT_THROW(apb::velocity_at(ProfileId::JerkBounded, {0.0, 10.0, 0.0}, p, -1.0), std::invalid_argument);
  EXPECT_THROW(apb::distance_traveled(ProfileId::JerkBounded, {0.0, 10.0, 0.0}, p, -1.0), std::invalid_argument);
}

TEST(Profiles, InfiniteHorizonIsStopDistance)
{
  const RssParams p;
  const KinematicState s{0.0, 20.0, 0.0};
  EXPECT_DOUBLE_EQ(
    apb::distance_traveled(ProfileId::JerkBounded, s, p, std::numeric_limits<double>::infinity()),
    apb::BrakingMotion(ProfileId::JerkBounded, s, p).stop_distance());
}

// Random states and parameters against the numeric oracle.
TEST(ProfilesProperty, MatchOracle)
{
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 60; ++i) {
    const RssParams p = random_params(rng);
    const KinematicState s{0.0, 30.0 * u(rng), -6.0 * u(rng)};
    for (const ProfileId id : kAllProfiles) {
      const apb::BrakingMotion m(id, s, p);
      const double t = u(rng) * (m.stop_time() + 0.5);
      EXPECT_NEAR(m.stop_distance(), apb_oracle::braking_distance(id, s, p), 1e-6) << apb::to_string(id);
      EXPECT_NEAR(m.velocity(t), apb_oracle::velocity_at(id, s, p, t), 1e-6) << apb::to_string(id);
      EXPECT_NEAR(m.distance(t), apb_oracle::distance_at(id, s, p, t), 1e-6) << apb::to_string(id);
    }
  }
}

TEST(ProfilesProperty, VelocityNonIncreasingOnceBraking)
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const RssParams p = random_params(rng);
    const KinematicState s{0.0, 40.0 * u(rng), -5.0 * u(rng)};
    for (const ProfileId id : {ProfileId::FrontMaxBrake, ProfileId::JerkBounded}) {
      const apb::BrakingMotion m(id, s, p);
      double prev = m.velocity(0.0);
      for (int k = 1; k <= 100; ++k) {
        const double v = m.velocity(m.stop_time() * k / 100.0);
        ASSERT_LE(v, prev + 1e-12);
        ASSERT_GE(v, 0.0);
        prev = v;
      }
      EXPECT_EQ(m.velocity(m.stop_time()), 0.0);
    }
  }
}
