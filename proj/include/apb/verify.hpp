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

#ifndef APB__VERIFY_HPP_
#define APB__VERIFY_HPP_

#include "apb/sim.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace apb
{

// ---------------------------------------------------------------------------
// Empirical no-collision check

struct VerifyOptions
{
  double horizon{10.0};
  double dt{0.01};
  double v_max{40.0};           // speeds drawn from [0, v_max]
  double extra_gap_max{50.0};   // initial gap = d_safe + U[0, extra_gap_max]
  Range target_gap{1.0, 10.0};  // tailgating driver
  unsigned threads{0};          // 0 = hardware concurrency
};

/// Upper edges of the min-gap histogram bins [m]; the last bin is open.
inline constexpr std::array<double, 7> kMinGapBins{0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0};

struct VerifyReport
{
  std::size_t n{0};
  std::size_t collisions{0};
  double min_gap{0.0};  // smallest gap seen in any run
  std::array<std::size_t, kMinGapBins.size() + 1> histogram{};
  std::optional<Scenario> counterexample;
  std::optional<Trace> counterexample_trace;

  bool passed() const noexcept { return collisions == 0; }
};

/// The i-th randomized scenario of a verification run: compliant adversarial front,
/// APB without failures, tailgating driver, starting at a safe gap.
Scenario verification_scenario(
  std::uint64_t seed, std::size_t index, const RssParams & p, const VerifyOptions & opts = {});

VerifyReport verify_no_collision(
  std::size_t n, std::uint64_t seed, const RssParams & p, const VerifyOptions & opts = {});

// ---------------------------------------------------------------------------
// Monte Carlo sweeps

/// Overrides one scenario field per grid value. Supported keys are listed by
/// sweep_axis_keys().
struct SweepAxis
{
  std::string key;
  std::vector<double> values;
};

std::vector<std::string> sweep_axis_keys();

/// Sets a numeric scenario field by key; throws ConfigError on an unknown key.
void apply_axis_value(Scenario & sc, const std::string & key, double value);

struct SweepArm
{
  std::string name;
  ControllerSpec controller;
};

struct SweepOptions
{
  std::vector<SweepAxis> axes;
  std::vector<SweepArm> arms;   // arms[0] is the baseline for elimination rates
  std::size_t n{0};             // samples per grid point
  std::uint64_t seed{0};
  std::size_t max_runs{10'000'000};
  unsigned threads{0};
};

struct SweepResult
{
  std::string arm;
  std::size_t n_scenarios{0};
  std::size_t n_dangerous_episodes{0};
  std::size_t n_collisions{0};
  std::size_t n_interventions{0};
  double max_commanded_jerk{0.0};   // [m/s^3] of the controller's own requests
  double max_commanded_decel{0.0};  // [m/s^2] of the controller's own requests
  std::optional<double> elimination_rate;  // vs arms[0], only if it had collisions
  std::string baseline;

  void merge(const SweepResult & other);
};

struct SweepPoint
{
  std::vector<std::pair<std::string, double>> coordinates;
  std::vector<SweepResult> arms;
};

struct SweepReport
{
  std::vector<SweepResult> totals;  // one per arm
  std::vector<SweepPoint> points;
};

/// The sample-th scenario drawn from `base` for a sweep seed. Every arm of a paired sweep
/// sees the same scenario apart from its controller.
Scenario sample_scenario(const Scenario & base, std::uint64_t seed, std::size_t index);

/// Per-trace statistics used by the sweep aggregation. Jerk and deceleration are taken
/// from the controller's own requests; at a takeover only extra braking beyond the
/// previously applied command counts (dropping a positive driver command does not).
SweepResult summarize(const Trace & trace, const std::string & arm);

/// Runs arms x grid x n scenarios. Results do not depend on the worker count.
SweepReport sweep(const Scenario & base, const SweepOptions & opts);

}  // namespace apb

#endif  // APB__VERIFY_HPP_
