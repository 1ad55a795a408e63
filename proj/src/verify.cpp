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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace apb
{
namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kScriptStream = 1;
constexpr std::uint64_t kPopulationStream = 4;

unsigned worker_count(unsigned requested, std::size_t jobs)
{
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs body(worker, job) for job in [0, jobs) on `workers` threads.
template <class Body>
void parallel_for(std::size_t jobs, unsigned workers, Body body)
{
  std::atomic<std::size_t> next{0};
  const auto loop = [&](unsigned w) {
    for (std::size_t j = next++; j < jobs; j = next++) body(w, j);
  };
  if (workers <= 1) {
    loop(0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(loop, w);
  for (auto & t : pool) t.join();
}

double draw(std::mt19937_64 & rng, const Range & r)
{
  if (!(r.hi > r.lo)) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

std::size_t histogram_bin(double gap)
{
  for (std::size_t i = 0; i < kMinGapBins.size(); ++i) {
    if (gap < kMinGapBins[i]) return i;
  }
  return kMinGapBins.size();
}

void set_rates(std::vector<SweepResult> & arms)
{
  if (arms.empty()) return;
  const SweepResult & base = arms.front();
  for (std::size_t k = 1; k < arms.size(); ++k) {
    arms[k].baseline = base.arm;
    arms[k].elimination_rate.reset();
    if (base.n_collisions > 0) {
      arms[k].elimination_rate = 1.0 - static_cast<double>(arms[k].n_collisions) /
                                         static_cast<double>(base.n_collisions);
    }
  }
}
}  // namespace

Scenario verification_scenario(
  std::uint64_t seed, std::size_t index, const RssParams & p, const VerifyOptions & opts)
{
  Scenario sc;
  sc.params = p;
  sc.dt = opts.dt;
  sc.horizon = opts.horizon;
  sc.seed = derive_seed(seed, index);

  std::mt19937_64 rng(derive_seed(sc.seed, kPopulationStream));
  const double v_rear = draw(rng, {0.0, opts.v_max});
  const double v_front = draw(rng, {0.0, opts.v_max});
  const double extra = draw(rng, {0.0, opts.extra_gap_max});
  sc.driver.kind = DriverPolicy::Kind::Tailgater;
  sc.driver.target_gap = draw(rng, opts.target_gap);

  sc.initial.rear = {0.0, v_rear, 0.0};
  sc.initial.front = {0.0, v_front, 0.0};
  sc.initial.gap = safe_distance_apb(sc.initial.rear, v_front, p) + extra;

  sc.front.kind = FrontSource::Kind::Adversarial;
  sc.front.compliant = true;
  sc.front.seed = derive_seed(sc.seed, kScriptStream);
  sc.controller.kind = ControllerKind::Apb;
  sc.controller.p_fail = 0.0;
  return sc;
}

VerifyReport verify_no_collision(
  std::size_t n, std::uint64_t seed, const RssParams & p, const VerifyOptions & opts)
{
  validate(p);
  struct Partial
  {
    std::size_t collisions{0};
    double min_gap{kInf};
    std::array<std::size_t, kMinGapBins.size() + 1> histogram{};
    std::size_t first_collision{std::numeric_limits<std::size_t>::max()};
  };
  const unsigned workers = worker_count(opts.threads, n);
  std::vector<Partial> parts(workers);
  parallel_for(n, workers, [&](unsigned w, std::size_t i) {
    const Trace tr = run(verification_scenario(seed, i, p, opts));
    Partial & part = parts[w];
    part.min_gap = std::min(part.min_gap, tr.min_gap);
    ++part.histogram[histogram_bin(tr.min_gap)];
    if (tr.collided()) {
      ++part.collisions;
      part.first_collision = std::min(part.first_collision, i);
    }
  });

  VerifyReport report;
  report.n = n;
  report.min_gap = n ? kInf : 0.0;
  std::size_t first = std::numeric_limits<std::size_t>::max();
  for (const Partial & part : parts) {
    report.collisions += part.collisions;
    report.min_gap = std::min(report.min_gap, part.min_gap);
    for (std::size_t b = 0; b < part.histogram.size(); ++b) report.histogram[b] += part.histogram[b];
    first = std::min(first, part.first_collision);
  }
  if (report.collisions > 0) {
    report.counterexample = verification_scenario(seed, first, p, opts);
    report.counterexample_trace = run(*report.counterexample);
  }
  return report;
}

std::vector<std::string> sweep_axis_keys()
{
  return {
    "params.rho",
    "params.a_max_brake",
    "params.a_min_brake",
    "params.a_max_accel",
    "params.j_max",
    "params.latency",
    "initial.gap_m",
    "initial.rear.v",
    "initial.front.v",
    "driver.target_gap",
    "driver.reaction_delay",
    "driver.comfort_decel",
    "controller.p_fail",
    "controller.ttc_threshold",
    "controller.brake_magnitude",
    "controller.response_time",
    "sensor.range_noise_sigma",
    "sensor.miss_rate",
    "sensor.ghost_rate",
    "sensor.ghost_gap",
    "sim.dt",
    "sim.horizon",
  };
}

void apply_axis_value(Scenario & sc, const std::string & key, double value)
{
  double * field = nullptr;
  if (key == "params.rho") field = &sc.params.rho;
  else if (key == "params.a_max_brake") field = &sc.params.a_max_brake;
  else if (key == "params.a_min_brake") field = &sc.params.a_min_brake;
  else if (key == "params.a_max_accel") field = &sc.params.a_max_accel;
  else if (key == "params.j_max") field = &sc.params.j_max;
  else if (key == "params.latency") field = &sc.params.latency;
  else if (key == "initial.gap_m") field = &sc.initial.gap;
  else if (key == "initial.rear.v") field = &sc.initial.rear.v;
  else if (key == "initial.front.v") field = &sc.initial.front.v;
  else if (key == "driver.target_gap") field = &sc.driver.target_gap;
  else if (key == "driver.reaction_delay") field = &sc.driver.reaction_delay;
  else if (key == "driver.comfort_decel") field = &sc.driver.comfort_decel;
  else if (key == "controller.p_fail") field = &sc.controller.p_fail;
  else if (key == "controller.ttc_threshold") field = &sc.controller.aeb.ttc_threshold;
  else if (key == "controller.brake_magnitude") field = &sc.controller.aeb.brake_magnitude;
  else if (key == "controller.response_time") field = &sc.controller.aeb.response_time;
  else if (key == "sensor.range_noise_sigma") field = &sc.sensor.range_noise_sigma;
  else if (key == "sensor.miss_rate") field = &sc.sensor.miss_rate;
  else if (key == "sensor.ghost_rate") field = &sc.sensor.ghost_rate;
  else if (key == "sensor.ghost_gap") field = &sc.sensor.ghost_gap;
  else if (key == "sim.dt") field = &sc.dt;
  else if (key == "sim.horizon") field = &sc.horizon;
  if (!field) throw ConfigError("axis", "unknown sweep key '" + key + "'");
  *field = value;
}

void SweepResult::merge(const SweepResult & other)
{
  n_scenarios += other.n_scenarios;
  n_dangerous_episodes += other.n_dangerous_episodes;
  n_collisions += other.n_collisions;
  n_interventions += other.n_interventions;
  max_commanded_jerk = std::max(max_commanded_jerk, other.max_commanded_jerk);
  max_commanded_decel = std::max(max_commanded_decel, other.max_commanded_decel);
}

Scenario sample_scenario(const Scenario & base, std::uint64_t seed, std::size_t index)
{
  Scenario sc = base;
  sc.seed = derive_seed(seed, index);
  if (sc.front.kind != FrontSource::Kind::Script) {
    sc.front.seed = derive_seed(sc.seed, kScriptStream);
  }
  if (sc.population) {
    const Population pop = *sc.population;
    std::mt19937_64 rng(derive_seed(sc.seed, kPopulationStream));
    const double v_rear = draw(rng, pop.v_rear);
    const double v_front = draw(rng, pop.v_front);
    const double gap = draw(rng, pop.gap);
    const double target = pop.target_gap ? draw(rng, *pop.target_gap) : sc.driver.target_gap;
    sc.initial.rear = {0.0, v_rear, 0.0};
    sc.initial.front = {0.0, v_front, 0.0};
    sc.initial.gap = pop.gap_above_safe ? safe_distance_apb(sc.initial.rear, v_front, sc.params) + gap : gap;
    sc.driver.target_gap = target;
    sc.population.reset();
  }
  return sc;
}

SweepResult summarize(const Trace & trace, const std::string & arm)
{
  SweepResult r;
  r.arm = arm;
  r.n_scenarios = 1;
  r.n_dangerous_episodes = static_cast<std::size_t>(trace.dangerous_episodes);
  r.n_collisions = trace.collided() ? 1 : 0;
  r.n_interventions = static_cast<std::size_t>(trace.interventions);
  const auto & recs = trace.records;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const TraceRecord & cur = recs[i];
    if (!cur.controller_active) continue;
    r.max_commanded_decel = std::max(r.max_commanded_decel, -cur.controller_accel);
    if (i == 0) continue;
    const TraceRecord & prev = recs[i - 1];
    double change = 0.0;
    if (prev.controller_active) {
      change = std::abs(cur.controller_accel - prev.controller_accel);
    } else {
      // takeover: only the braking added on top of what was applied counts
      change = std::max(0.0, std::min(prev.cmd_accel, 0.0) - cur.controller_accel);
    }
    r.max_commanded_jerk = std::max(r.max_commanded_jerk, change / (cur.t - prev.t));
  }
  return r;
}

SweepReport sweep(const Scenario & base, const SweepOptions & opts)
{
  std::vector<SweepArm> arms = opts.arms;
  if (arms.empty()) arms.push_back({"base", base.controller});

  // grid = cartesian product of the axes
  std::vector<std::vector<std::pair<std::string, double>>> grid{{}};
  for (const SweepAxis & axis : opts.axes) {
    if (axis.values.empty()) throw ConfigError("axis", "'" + axis.key + "' has no values");
    std::vector<std::vector<std::pair<std::string, double>>> next;
    for (const auto & point : grid) {
      for (const double v : axis.values) {
        auto p = point;
        p.emplace_back(axis.key, v);
        next.push_back(std::move(p));
      }
    }
    grid = std::move(next);
  }

  const std::size_t n_points = grid.size();
  const double total = static_cast<double>(n_points) * static_cast<double>(opts.n) *
                       static_cast<double>(arms.size());
  if (total > static_cast<double>(opts.max_runs)) {
    throw ConfigError(
      "max_runs", "sweep needs " + std::to_string(static_cast<std::size_t>(total)) +
                    " runs, cap is " + std::to_string(opts.max_runs));
  }

  // concrete scenario template per (point, arm); validated before any run starts
  std::vector<std::vector<Scenario>> templates(n_points);
  for (std::size_t pi = 0; pi < n_points; ++pi) {
    for (const SweepArm & arm : arms) {
      Scenario sc = base;
      sc.controller = arm.controller;
      for (const auto & [key, value] : grid[pi]) apply_axis_value(sc, key, value);
      validate(sc);
      templates[pi].push_back(std::move(sc));
    }
  }

  const std::size_t jobs = n_points * opts.n;
  const unsigned workers = worker_count(opts.threads, jobs);
  // partial[worker][point][arm]
  std::vector<std::vector<std::vector<SweepResult>>> partial(
    workers, std::vector<std::vector<SweepResult>>(n_points, std::vector<SweepResult>(arms.size())));

  parallel_for(jobs, workers, [&](unsigned w, std::size_t job) {
    const std::size_t pi = job / opts.n;
    const std::size_t sample = job % opts.n;
    for (std::size_t a = 0; a < arms.size(); ++a) {
      const Trace tr = run(sample_scenario(templates[pi][a], opts.seed, sample));
      partial[w][pi][a].merge(summarize(tr, arms[a].name));
    }
  });

  SweepReport report;
  report.totals.resize(arms.size());
  for (std::size_t a = 0; a < arms.size(); ++a) report.totals[a].arm = arms[a].name;
  for (std::size_t pi = 0; pi < n_points; ++pi) {
    SweepPoint point;
    point.coordinates = grid[pi];
    point.arms.resize(arms.size());
    for (std::size_t a = 0; a < arms.size(); ++a) {
      point.arms[a].arm = arms[a].name;
      for (unsigned w = 0; w < workers; ++w) point.arms[a].merge(partial[w][pi][a]);
      report.totals[a].merge(point.arms[a]);
    }
    set_rates(point.arms);
    report.points.push_back(std::move(point));
  }
  set_rates(report.totals);
  return report;
}

}  // namespace apb
