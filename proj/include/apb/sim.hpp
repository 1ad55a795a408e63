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

#ifndef APB__SIM_HPP_
#define APB__SIM_HPP_

#include "apb/controllers.hpp"
#include "apb/kinematics.hpp"
#include "apb/safety.hpp"
#include "apb/trace.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace apb
{

/// Front acceleration `accel` from time `t` until the next segment starts.
struct ScriptSegment
{
  double t{0.0};
  double accel{0.0};
};

struct FrontScript
{
  std::vector<ScriptSegment> segments;  // sorted by t; zero acceleration before the first
  bool compliant{true};

  double accel_at(double t) const;
};

/// Randomized front behavior: piecewise-constant segments of 0.1-3 s, values within
/// [-a_max_brake, a_max_accel] (compliant) or the physical ceiling. With probability
/// 0.05 the script is the worst case: sustained a_max_brake from t = 0.
FrontScript adversarial_front(std::uint64_t seed, const RssParams & p, double horizon, bool compliant);

/// Single segment at -a_max_brake covering the horizon.
FrontScript worst_case_front(const RssParams & p);

struct Range
{
  double lo{0.0};
  double hi{0.0};
};

/// Where the front behavior of a scenario comes from.
struct FrontSource
{
  enum class Kind { Script, Adversarial, BrakeEvent };
  Kind kind{Kind::Script};
  FrontScript script;             // Script
  std::uint64_t seed{0};          // Adversarial
  bool compliant{true};           // Adversarial
  Range brake_start{2.0, 2.0};    // BrakeEvent: cruise, then brake to a stop
  Range brake_decel{8.0, 8.0};
};

FrontScript resolve_front(const FrontSource & src, const RssParams & p, double horizon);

struct SensorModel
{
  double range_noise_sigma{0.0};  // [m]
  double miss_rate{0.0};          // per step
  double ghost_rate{0.0};         // per step
  double ghost_gap{10.0};         // [m] a ghost is a stationary object this far ahead
};

struct OverrideInterval
{
  double from{0.0};
  double to{0.0};
};

struct ControllerSpec
{
  ControllerKind kind{ControllerKind::None};
  AebConfig aeb;
  double p_fail{0.0};
  std::vector<OverrideInterval> overrides;
};

/// Randomized initial conditions used by sweeps. Each sample draws speeds and gap
/// uniformly; with `gap_above_safe` the gap is d_safe plus the drawn value.
struct Population
{
  Range v_rear{20.0, 20.0};
  Range v_front{20.0, 20.0};
  Range gap{10.0, 10.0};
  bool gap_above_safe{false};
  std::optional<Range> target_gap;  // Tailgater drivers only
};

struct Scenario
{
  RssParams params;
  SceneState initial;
  FrontSource front;
  DriverPolicy driver;
  ControllerSpec controller;
  SensorModel sensor;
  double dt{0.01};
  double horizon{10.0};
  std::uint64_t seed{0};
  double episode_window{2.0};  // dangerous intervals closer than this count as one episode
  std::optional<Population> population;
};

/// Throws ConfigError naming the offending field; returns soft warnings.
std::vector<std::string> validate(const Scenario & sc);

/// Stable 64-bit fingerprint of every field of the scenario.
std::uint64_t scenario_hash(const Scenario & sc);

/// Independent sub-seed of a master seed (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Acceleration request applied from `tau` (relative to the step start) until the next piece.
struct CommandPiece
{
  double tau{0.0};
  AccelCommand command;
};

struct StepResult
{
  SceneState scene;
  double min_gap{0.0};                   // smallest gap inside the step
  std::optional<double> collision_tau;   // first time within the step the cars overlap
};

/// Advances both cars by `dt`, integrating the commanded ramps exactly. Speeds stop at
/// zero (no reversing); the gap is tracked in closed form inside the step. Overlaps
/// below 1 nm are treated as rounding of an exact touch.
StepResult step(
  const SceneState & scene, std::span<const CommandPiece> rear, std::span<const CommandPiece> front,
  double dt);

StepResult step(
  const SceneState & scene, const AccelCommand & rear, const AccelCommand & front, double dt);

/// Deterministic simulation of one scenario.
Trace run(const Scenario & sc);

}  // namespace apb

#endif  // APB__SIM_HPP_
