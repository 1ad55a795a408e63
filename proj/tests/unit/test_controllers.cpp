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

#include "apb/controllers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace
{
using apb::ControllerMode;
using apb::RssParams;
using apb::SceneState;

const SceneState kTailgating{{0.0, 10.0, 0.0}, {0.03, 9.99, 0.0}, 0.03};

// Two-sided 99% interval of Binomial(n, p) from the exact CDF.
std::pair<int, int> binomial_interval(int n, double p)
{
  const auto pmf = [&](int k) {
    return std::exp(
      std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
      (n - k) * std::log1p(-p));
  };
  double cdf = 0.0;
  int lo = -1;
  int hi = n;
  for (int k = 0; k <= n; ++k) {
    cdf += pmf(k);
    if (lo < 0 && cdf >= 0.005) lo = k;
    if (cdf >= 0.995) {
      hi = k;
      break;
    }
  }
  return {lo, hi};
}
}  // namespace

TEST(Ttc, Examples)
{
  EXPECT_EQ(apb::ttc(0.03, 10.0, 9.99), 3.0);
  EXPECT_EQ(apb::ttc(50.0, 10.0, 10.0), std::numeric_limits<double>::infinity());
  EXPECT_EQ(apb::ttc(20.0, 20.0, 10.0), 2.0);
  EXPECT_EQ(apb::ttc(5.0, 10.0, 12.0), std::numeric_limits<double>::infinity());
  EXPECT_THROW(apb::ttc(0.0, 10.0, 9.0), std::invalid_argument);
  EXPECT_THROW(apb::ttc(-1.0, 10.0, 9.0), std::invalid_argument);
}

TEST(Aeb, TriggerBoundaryAtTwoCentimetres)
{
  const apb::AebConfig cfg;
  SceneState s = kTailgating;
  EXPECT_FALSE(apb::aeb_triggers(s, cfg));
  s.gap = 0.02;
  EXPECT_TRUE(apb::aeb_triggers(s, cfg));
  s.gap = 0.019;
  EXPECT_TRUE(apb::aeb_triggers(s, cfg));
  for (int k = 1; k <= 1000; ++k) {
    s.gap = 0.02 + 1e-5 * k;
    ASSERT_FALSE(apb::aeb_triggers(s, cfg)) << s.gap;
  }
}

TEST(Aeb, StepBrakeAndLatch)
{
  const apb::AebConfig cfg;
  apb::AebState st;
  auto out = apb::aeb_step(st, {{0, 20, 0}, {10, 10, 0}, 10.0}, cfg, 0.5, 0.0);
  EXPECT_EQ(out.state.mode, ControllerMode::AebBraking);
  EXPECT_EQ(out.command.initial(), -14.7);
  EXPECT_FALSE(out.command.ramp.has_value());
  // still closing, TTC now large: stays latched
  out = apb::aeb_step(out.state, {{0, 15, -14.7}, {100, 10, 0}, 100.0}, cfg, 0.5, 0.1);
  EXPECT_EQ(out.state.mode, ControllerMode::AebBraking);
  // closing ended: released
  out = apb::aeb_step(out.state, {{0, 9, -14.7}, {100, 10, 0}, 100.0}, cfg, 0.5, 0.2);
  EXPECT_EQ(out.state.mode, ControllerMode::AebArmed);
  EXPECT_EQ(out.command.initial(), 0.5);
}

TEST(Aeb, OpeningGapPassesDriverThrough)
{
  const apb::AebConfig cfg;
  const auto out = apb::aeb_step({}, {{0, 10, 0}, {10, 20, 0}, 10.0}, cfg, 1.2, 0.0);
  EXPECT_EQ(out.state.mode, ControllerMode::AebArmed);
  EXPECT_EQ(out.command.initial(), 1.2);
}

TEST(Aeb, ResponseTimeDelaysBraking)
{
  apb::AebConfig cfg;
  cfg.response_time = 0.5;
  const SceneState s{{0, 20, 0}, {10, 10, 0}, 10.0};
  auto out = apb::aeb_step({}, s, cfg, 0.0, 1.0);
  EXPECT_EQ(out.state.mode, ControllerMode::AebPending);
  EXPECT_EQ(out.command.initial(), 0.0);
  out = apb::aeb_step(out.state, s, cfg, 0.0, 1.4);
  EXPECT_EQ(out.state.mode, ControllerMode::AebPending);
  out = apb::aeb_step(out.state, s, cfg, 0.0, 1.5);
  EXPECT_EQ(out.state.mode, ControllerMode::AebBraking);
  EXPECT_EQ(out.command.initial(), -14.7);
}

TEST(AebConfig, Validation)
{
  apb::AebConfig cfg;
  EXPECT_NO_THROW(apb::validate(cfg));
  cfg.brake_magnitude = 16.0;
  EXPECT_THROW(apb::validate(cfg), apb::ConfigError);
  cfg = {};
  cfg.ttc_threshold = 0.0;
  EXPECT_THROW(apb::validate(cfg), apb::ConfigError);
}

TEST(Apb, SafeScenePassesThrough)
{
  const RssParams p;
  const auto out = apb::apb_step({}, {{0, 10, 0}, {100, 10, 0}, 100.0}, p, 0.7, 0.0, false);
  EXPECT_EQ(out.state.mode, ControllerMode::Monitoring);
  EXPECT_FALSE(out.command.ramp.has_value());
  EXPECT_EQ(out.command.initial(), 0.7);
  EXPECT_FALSE(out.state.commanded_accel.has_value());
}

TEST(Apb, TailgatingStartsJerkRamp)
{
  const RssParams p;
  const auto out = apb::apb_step({}, kTailgating, p, 0.0, 0.0, false);
  EXPECT_TRUE(out.started);
  EXPECT_EQ(out.state.mode, ControllerMode::Intervening);
  ASSERT_TRUE(out.command.ramp.has_value());
  EXPECT_EQ(out.command.ramp->jerk, -p.j_max);
  EXPECT_EQ(out.command.ramp->limit, -p.a_min_brake);
  EXPECT_EQ(out.command.at(0.0), 0.0);
  EXPECT_DOUBLE_EQ(out.command.at(0.5), -1.0);
  EXPECT_DOUBLE_EQ(out.command.at(5.0), -4.0);

  // next decision: ramp continues from where it is
  const auto next = apb::apb_step(out.state, kTailgating, p, 0.0, 0.5, false);
  EXPECT_FALSE(next.started);
  EXPECT_DOUBLE_EQ(next.command.initial(), -1.0);
}

TEST(Apb, HarderDriverBrakingWins)
{
  const RssParams p;
  const auto out = apb::apb_step({}, kTailgating, p, -9.0, 0.0, false);
  EXPECT_EQ(out.state.mode, ControllerMode::Intervening);
  EXPECT_EQ(out.command.initial(), -9.0);
  EXPECT_EQ(out.command.at(3.0), -9.0);
}

TEST(Apb, OverrideHandsBackControl)
{
  const RssParams p;
  const auto on = apb::apb_step({}, kTailgating, p, 0.0, 0.0, false);
  const auto off = apb::apb_step(on.state, kTailgating, p, 0.3, 0.01, true);
  EXPECT_EQ(off.state.mode, ControllerMode::Overridden);
  EXPECT_TRUE(off.ended);
  EXPECT_EQ(off.command.initial(), 0.3);
  EXPECT_FALSE(off.command.ramp.has_value());
  // still overridden while the switch is held
  const auto held = apb::apb_step(off.state, kTailgating, p, 0.3, 0.02, true);
  EXPECT_EQ(held.state.mode, ControllerMode::Overridden);
  // switch released: monitoring resumes and re-engages
  const auto back = apb::apb_step(held.state, kTailgating, p, 0.3, 0.03, false);
  EXPECT_EQ(back.state.mode, ControllerMode::Intervening);
}

TEST(Apb, StandstillEndsIntervention)
{
  const RssParams p;
  const auto on = apb::apb_step({}, kTailgating, p, 0.0, 0.0, false);
  const auto stop = apb::apb_step(on.state, {{0, 0, 0}, {0.03, 0, 0}, 0.03}, p, 0.0, 3.0, false);
  EXPECT_EQ(stop.state.mode, ControllerMode::Monitoring);
  EXPECT_TRUE(stop.ended);
}

TEST(Apb, SafeAgainReleasesWithBoundedJerk)
{
  const RssParams p;
  const auto on = apb::apb_step({}, kTailgating, p, 0.0, 0.0, false);
  // one second later the ramp sits at -2; the scene has become safe
  const SceneState safe{{0, 5, -2}, {500, 10, 0}, 500.0};
  const auto rel = apb::apb_step(on.state, safe, p, 0.0, 1.0, false);
  EXPECT_EQ(rel.state.mode, ControllerMode::Monitoring);
  EXPECT_TRUE(rel.ended);
  ASSERT_TRUE(rel.command.ramp.has_value());
  EXPECT_DOUBLE_EQ(rel.command.initial(), -2.0);
  EXPECT_EQ(rel.command.ramp->jerk, p.j_max);
  EXPECT_DOUBLE_EQ(rel.command.at(0.5), -1.0);
  EXPECT_DOUBLE_EQ(rel.command.at(2.0), 0.0);
  // ramp completed: the driver is back in control
  const auto done = apb::apb_step(rel.state, safe, p, 0.0, 2.0, false);
  EXPECT_FALSE(done.command.ramp.has_value());
  EXPECT_FALSE(done.state.commanded_accel.has_value());
}

TEST(Apb, ReleaseStopsAtZeroUnderPositiveDriver)
{
  const RssParams p;
  const auto on = apb::apb_step({}, kTailgating, p, 0.0, 0.0, false);
  const SceneState safe{{0, 5, -2}, {500, 10, 0}, 500.0};
  const auto rel = apb::apb_step(on.state, safe, p, 3.0, 1.0, false);
  ASSERT_TRUE(rel.command.ramp.has_value());
  EXPECT_EQ(rel.command.ramp->limit, 0.0);
  EXPECT_DOUBLE_EQ(rel.command.at(5.0), 0.0);
  const auto done = apb::apb_step(rel.state, safe, p, 3.0, 2.0, false);
  EXPECT_FALSE(done.command.ramp.has_value());
  EXPECT_EQ(done.command.initial(), 3.0);
}

TEST(Apb, LookaheadCatchesDangerBeforeItArrives)
{
  const RssParams p;
  const double d = apb::safe_distance_apb({0, 20, 0}, 20.0, p);
  const SceneState at_boundary{{0, 20, 0}, {d, 20, 0}, d};
  EXPECT_FALSE(apb::apb_monitor(at_boundary, p, 0.0).dangerous);
  EXPECT_TRUE(apb::apb_monitor(at_boundary, p, 0.0, apb::ApbConfig{0.01}).dangerous);
}

TEST(Drivers, ConstantSpeed)
{
  apb::DriverState st;
  EXPECT_EQ(apb::driver_step({}, st, kTailgating, 0.0), 0.0);
}

TEST(Drivers, TailgaterGain)
{
  apb::DriverPolicy pol;
  pol.kind = apb::DriverPolicy::Kind::Tailgater;
  pol.target_gap = 2.0;
  apb::DriverState st;
  EXPECT_DOUBLE_EQ(apb::driver_step(pol, st, {{0, 20, 0}, {10, 20, 0}, 10.0}, 0.0), 4.0);
  EXPECT_DOUBLE_EQ(apb::driver_step(pol, st, {{0, 20, 0}, {100, 20, 0}, 100.0}, 0.0), 15.0);
  EXPECT_DOUBLE_EQ(apb::driver_step(pol, st, {{0, 20, 0}, {10, 18, 0}, 10.0}, 0.0), 2.0);
}

TEST(Drivers, DistractedFollowerReactsLate)
{
  apb::DriverPolicy pol;
  pol.kind = apb::DriverPolicy::Kind::DistractedFollower;
  apb::DriverState st;
  const SceneState braking{{0, 20, 0}, {30, 15, -6}, 30.0};
  EXPECT_EQ(apb::driver_step(pol, st, braking, 0.0), 0.0);
  EXPECT_EQ(apb::driver_step(pol, st, braking, 1.0), 0.0);
  EXPECT_EQ(apb::driver_step(pol, st, braking, 1.5), -3.0);
  // keeps braking after the front stops decelerating, until stopped
  EXPECT_EQ(apb::driver_step(pol, st, {{0, 5, -3}, {30, 0, 0}, 30.0}, 3.0), -3.0);
  EXPECT_EQ(apb::driver_step(pol, st, {{0, 0, 0}, {30, 0, 0}, 30.0}, 4.0), 0.0);
}

TEST(Drivers, Validation)
{
  apb::DriverPolicy pol;
  pol.kind = apb::DriverPolicy::Kind::DistractedFollower;
  pol.comfort_decel = 20.0;
  EXPECT_THROW(apb::validate(pol), apb::ConfigError);
  pol.kind = apb::DriverPolicy::Kind::Tailgater;
  pol.target_gap = -1.0;
  EXPECT_THROW(apb::validate(pol), apb::ConfigError);
}

TEST(FailureInjector, ExtremesAndDeterminism)
{
  apb::FailureInjector never(0.0, 1);
  apb::FailureInjector always(1.0, 1);
  for (int e = 0; e < 50; ++e) {
    const double t = 10.0 * e;
    EXPECT_FALSE(never.suppress(true, t));
    EXPECT_TRUE(always.suppress(true, t));
    never.suppress(false, t + 0.01);
    always.suppress(false, t + 0.01);
  }
  EXPECT_EQ(never.episodes(), 50);
  EXPECT_EQ(always.suppressed_episodes(), 50);
  EXPECT_THROW(apb::FailureInjector(1.5, 0), apb::ConfigError);
}

TEST(FailureInjector, OneDrawPerEpisode)
{
  apb::FailureInjector inj(0.5, 9);
  const bool first = inj.suppress(true, 0.0);
  for (int k = 1; k < 100; ++k) EXPECT_EQ(inj.suppress(true, 0.01 * k), first);
  EXPECT_EQ(inj.episodes(), 1);
  // a short pause inside the merge window continues the same episode
  inj.suppress(false, 1.0);
  EXPECT_EQ(inj.suppress(true, 1.5), first);
  EXPECT_EQ(inj.episodes(), 1);
  inj.suppress(false, 1.6);
  inj.suppress(true, 10.0);
  EXPECT_EQ(inj.episodes(), 2);
}

TEST(FailureInjector, SuppressionRateIsBinomial)
{
  constexpr int kEpisodes = 10000;
  apb::FailureInjector inj(0.01, 2024);
  for (int e = 0; e < kEpisodes; ++e) {
    inj.suppress(true, 10.0 * e);
    inj.suppress(false, 10.0 * e + 0.01);
  }
  const auto [lo, hi] = binomial_interval(kEpisodes, 0.01);
  EXPECT_EQ(inj.episodes(), kEpisodes);
  EXPECT_GE(inj.suppressed_episodes(), lo);
  EXPECT_LE(inj.suppressed_episodes(), hi);
}

TEST(Controller, FailureWrapperAtZeroIsTransparent)
{
  const RssParams p;
  apb::Controller plain = apb::Controller::apb(p);
  apb::Controller wrapped = apb::with_failure(apb::Controller::apb(p), 0.0, 5);
  SceneState s = kTailgating;
  for (int k = 0; k < 50; ++k) {
    const double t = 0.01 * k;
    s.gap = 0.03 + 0.5 * k;
    const auto a = plain.step(s, 0.0, t, false);
    const auto b = wrapped.step(s, 0.0, t, false);
    EXPECT_EQ(a.mode, b.mode);
    EXPECT_EQ(a.command.initial(), b.command.initial());
  }
}

TEST(Controller, FailureWrapperAtOneNeverIntervenes)
{
  const RssParams p;
  apb::Controller c = apb::with_failure(apb::Controller::apb(p), 1.0, 5);
  for (int k = 0; k < 50; ++k) {
    const auto out = c.step(kTailgating, 0.4, 0.01 * k, false);
    EXPECT_FALSE(out.active);
    EXPECT_TRUE(out.suppressed);
    EXPECT_EQ(out.command.initial(), 0.4);
    EXPECT_FALSE(out.command.ramp.has_value());
  }
}
