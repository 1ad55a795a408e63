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

#include "apb/verify.hpp"

#include "apb/scenario_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>

namespace
{
using apb::ControllerKind;
using apb::Scenario;
using apb::SweepArm;
using apb::SweepOptions;

Scenario population_base()
{
  return apb::load_scenario(std::filesystem::path(APB_PRESET_DIR) / "tailgater_population.json");
}

std::vector<SweepArm> none_vs_apb(double p_fail)
{
  SweepArm none{"none", {}};
  SweepArm apb{"apb", {}};
  apb.controller.kind = ControllerKind::Apb;
  apb.controller.p_fail = p_fail;
  return {none, apb};
}
}  // namespace

TEST(Verify, SmallRunPasses)
{
  const auto rep = apb::verify_no_collision(200, 3, apb::RssParams{});
  EXPECT_EQ(rep.n, 200u);
  EXPECT_TRUE(rep.passed());
  EXPECT_FALSE(rep.counterexample.has_value());
  std::size_t binned = 0;
  for (auto c : rep.histogram) binned += c;
  EXPECT_EQ(binned, 200u);
  EXPECT_GE(rep.min_gap, -1e-9);
}

TEST(Verify, SingleRun)
{
  const auto rep = apb::verify_no_collision(1, 0, apb::RssParams{});
  EXPECT_EQ(rep.n, 1u);
  EXPECT_TRUE(rep.passed());
}

TEST(Verify, ScenarioStartsSafe)
{
  const apb::RssParams p;
  for (std::size_t i = 0; i < 100; ++i) {
    const Scenario sc = apb::verification_scenario(9, i, p);
    EXPECT_FALSE(apb::is_dangerous(sc.initial, p).dangerous);
    EXPECT_EQ(sc.controller.kind, ControllerKind::Apb);
    EXPECT_EQ(sc.controller.p_fail, 0.0);
    EXPECT_EQ(sc.driver.kind, apb::DriverPolicy::Kind::Tailgater);
  }
}

TEST(Sweep, ZeroSamplesGiveZeroCounts)
{
  SweepOptions opts;
  opts.arms = none_vs_apb(0.0);
  const auto rep = apb::sweep(population_base(), opts);
  ASSERT_EQ(rep.totals.size(), 2u);
  for (const auto & r : rep.totals) {
    EXPECT_EQ(r.n_scenarios, 0u);
    EXPECT_EQ(r.n_collisions, 0u);
    EXPECT_FALSE(r.elimination_rate.has_value());
  }
}

TEST(Sweep, WorkerCountDoesNotMatter)
{
  SweepOptions opts;
  opts.arms = none_vs_apb(0.01);
  opts.n = 40;
  opts.seed = 17;
  opts.axes = {{"params.j_max", {1.5, 3.0}}};
  opts.threads = 1;
  const auto one = apb::sweep(population_base(), opts);
  opts.threads = 4;
  const auto four = apb::sweep(population_base(), opts);
  ASSERT_EQ(one.points.size(), 2u);
  for (std::size_t a = 0; a < 2; ++a) {
    EXPECT_EQ(one.totals[a].n_collisions, four.totals[a].n_collisions);
    EXPECT_EQ(one.totals[a].n_interventions, four.totals[a].n_interventions);
    EXPECT_EQ(one.totals[a].n_dangerous_episodes, four.totals[a].n_dangerous_episodes);
    EXPECT_EQ(one.totals[a].max_commanded_jerk, four.totals[a].max_commanded_jerk);
    EXPECT_EQ(one.totals[a].n_scenarios, 80u);
  }
}

TEST(Sweep, PairedArmsSeeTheSameScenario)
{
  const Scenario base = population_base();
  for (std::size_t i = 0; i < 20; ++i) {
    Scenario a = base;
    Scenario b = base;
    b.controller.kind = ControllerKind::None;
    const Scenario sa = apb::sample_scenario(a, 4, i);
    const Scenario sb = apb::sample_scenario(b, 4, i);
    EXPECT_EQ(sa.initial.gap, sb.initial.gap);
    EXPECT_EQ(sa.initial.rear.v, sb.initial.rear.v);
    EXPECT_EQ(sa.front.seed, sb.front.seed);
    EXPECT_EQ(sa.driver.target_gap, sb.driver.target_gap);
    EXPECT_EQ(sa.seed, sb.seed);
  }
}

TEST(Sweep, AlwaysFailingApbEliminatesNothing)
{
  SweepOptions opts;
  opts.arms = none_vs_apb(1.0);
  opts.n = 60;
  opts.seed = 2;
  const auto rep = apb::sweep(population_base(), opts);
  ASSERT_GT(rep.totals[0].n_collisions, 0u);
  ASSERT_TRUE(rep.totals[1].elimination_rate.has_value());
  EXPECT_NEAR(*rep.totals[1].elimination_rate, 0.0, 1e-12);
  EXPECT_EQ(rep.totals[1].n_interventions, 0u);
}

TEST(Sweep, ApbEliminatesMostCollisions)
{
  SweepOptions opts;
  opts.arms = none_vs_apb(0.0);
  opts.n = 100;
  opts.seed = 8;
  const auto rep = apb::sweep(population_base(), opts);
  ASSERT_GT(rep.totals[0].n_collisions, 50u);
  EXPECT_EQ(rep.totals[1].n_collisions, 0u);
  EXPECT_EQ(*rep.totals[1].elimination_rate, 1.0);
  EXPECT_EQ(rep.totals[1].baseline, "none");
}

TEST(Sweep, RunCapIsEnforced)
{
  SweepOptions opts;
  opts.arms = none_vs_apb(0.0);
  opts.n = 1000;
  opts.max_runs = 1999;
  EXPECT_THROW(apb::sweep(population_base(), opts), apb::ConfigError);
}

TEST(Sweep, UnknownAxisRejected)
{
  SweepOptions opts;
  opts.n = 1;
  opts.axes = {{"params.warp_factor", {1.0}}};
  try {
    apb::sweep(population_base(), opts);
    FAIL() << "expected ConfigError";
  } catch (const apb::ConfigError & e) {
    EXPECT_NE(std::string(e.what()).find("warp_factor"), std::string::npos);
  }
}

TEST(Sweep, EveryAxisKeyApplies)
{
  for (const auto & key : apb::sweep_axis_keys()) {
    Scenario sc = population_base();
    EXPECT_NO_THROW(apb::apply_axis_value(sc, key, 0.5)) << key;
  }
}

TEST(Sweep, GhostsStayWithinApbLimits)
{
  const Scenario base =
    apb::load_scenario(std::filesystem::path(APB_PRESET_DIR) / "ghost_sweep.json");
  SweepArm apb_arm{"apb", base.controller};
  SweepArm aeb_arm{"aeb", {}};
  aeb_arm.controller.kind = ControllerKind::Aeb;
  SweepOptions opts;
  opts.arms = {apb_arm, aeb_arm};
  opts.n = 20;
  opts.seed = 1;
  const auto rep = apb::sweep(base, opts);
  const apb::RssParams & p = base.params;
  EXPECT_GT(rep.totals[0].n_interventions, 0u);
  EXPECT_LE(rep.totals[0].max_commanded_decel, p.a_min_brake + 1e-9);
  EXPECT_LE(rep.totals[0].max_commanded_jerk, p.j_max + 1e-9 / base.dt);
  EXPECT_EQ(rep.totals[0].n_collisions, 0u);
}

TEST(Summarize, JerkAndDecelFromControllerRequests)
{
  apb::Trace tr;
  tr.records.resize(4);
  tr.records[0].cmd_accel = 3.0;  // driver accelerating
  tr.records[1].t = 0.1;
  tr.records[1].cmd_accel = 0.0;
  tr.records[1].controller_active = true;
  tr.records[1].controller_accel = 0.0;
  tr.records[2].t = 0.2;
  tr.records[2].cmd_accel = -0.2;
  tr.records[2].controller_active = true;
  tr.records[2].controller_accel = -0.2;
  tr.records[3].t = 0.3;
  tr.records[3].cmd_accel = 1.0;
  const auto r = apb::summarize(tr, "x");
  // dropping the driver's +3 is not braking jerk; handing back is not the controller's
  EXPECT_NEAR(r.max_commanded_jerk, 2.0, 1e-9);
  EXPECT_NEAR(r.max_commanded_decel, 0.2, 1e-12);
}

TEST(Summarize, TakeoverBrakingCounts)
{
  apb::Trace tr;
  tr.records.resize(2);
  tr.records[1].t = 0.01;
  tr.records[1].cmd_accel = -14.7;
  tr.records[1].controller_active = true;
  tr.records[1].controller_accel = -14.7;
  EXPECT_NEAR(apb::summarize(tr, "aeb").max_commanded_jerk, 1470.0, 1e-9);
}
