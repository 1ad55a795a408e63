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

#ifndef APB__CONTROLLERS_HPP_
#define APB__CONTROLLERS_HPP_

#include "apb/kinematics.hpp"
#include "apb/safety.hpp"
#include "apb/trace.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace apb
{

/// Linear acceleration ramp saturating at `limit`. jerk < 0 ramps down, jerk > 0 up.
struct AccelRamp
{
  double start{0.0};
  double jerk{0.0};
  double limit{0.0};

  double at(double tau) const;
  /// Time at which the ramp saturates (+inf if it never does).
  double saturation_time() const;
};

/// Acceleration request for one step: a(tau) = min(base, ramp(tau)) when a ramp is set.
struct AccelCommand
{
  double base{0.0};
  std::optional<AccelRamp> ramp;

  double at(double tau) const;
  double initial() const { return at(0.0); }
};

// ---------------------------------------------------------------------------
// Time to collision and the AEB baseline

/// Closing speed resolved to 1 nm/s, so decimal inputs such as 10 and 9.99 give
/// exactly 0.01 m/s.
double closing_speed(double v_rear, double v_front);

/// gap / closing speed, +infinity when the gap is not closing. Throws on gap <= 0.
double ttc(double gap, double v_rear, double v_front);

struct AebConfig
{
  double ttc_threshold{2.0};
  double brake_magnitude{14.7};
  double response_time{0.0};  // delay between detection and brake application [s]
};

void validate(const AebConfig & cfg, double ceiling = kPhysicalCeiling);

/// True if the TTC of `scene` is at or below the threshold (a touching or
/// overlapping scene always triggers).
bool aeb_triggers(const SceneState & scene, const AebConfig & cfg);

struct AebState
{
  ControllerMode mode{ControllerMode::AebArmed};
  double trigger_time{0.0};
};

struct AebOutput
{
  AebState state;
  AccelCommand command;
};

/// Step brake once TTC drops below the threshold. Braking latches until the gap
/// stops closing (v_rear <= v_front) or the rear car stands still.
AebOutput aeb_step(
  const AebState & state, const SceneState & scene, const AebConfig & cfg, double driver_accel,
  double now);

// ---------------------------------------------------------------------------
// Automatic preventive braking

struct ApbConfig
{
  /// Extra time the monitor looks ahead, on top of the sensing latency. The simulator
  /// sets it to its decision period so that danger is caught before it is entered.
  double lookahead{0.0};
};

struct ControllerState
{
  ControllerMode mode{ControllerMode::Monitoring};
  std::optional<double> onset_time;         // set while intervening
  double onset_accel{0.0};
  std::optional<double> release_time;       // set while ramping back to the driver
  double release_accel{0.0};
  std::optional<double> commanded_accel;    // set while the controller shapes the command
};

struct ApbOutput
{
  ControllerState state;
  AccelCommand command;
  SafetyVerdict verdict;
  bool started{false};
  bool ended{false};
};

/// Danger as seen by the APB monitor: the current scene, and the scene after
/// latency + lookahead with the driver's request held and the front at full braking.
/// The returned verdict is the one with the smaller margin.
SafetyVerdict apb_monitor(
  const SceneState & scene, const RssParams & p, double driver_accel, const ApbConfig & cfg = {});

ApbOutput apb_step(
  const ControllerState & state, const SceneState & scene, const RssParams & p, double driver_accel,
  double now, bool override_active, const ApbConfig & cfg = {});

// ---------------------------------------------------------------------------
// Driver models (scenario plumbing)

inline constexpr double kTailgaterGapGain = 0.5;    // [1/s^2]
inline constexpr double kTailgaterSpeedGain = 1.0;  // [1/s]
inline constexpr double kFrontBrakeCue = 0.5;       // front deceleration a driver notices [m/s^2]

struct DriverPolicy
{
  enum class Kind { ConstantSpeed, Tailgater, DistractedFollower };
  Kind kind{Kind::ConstantSpeed};
  double target_gap{2.0};      // Tailgater [m]
  double reaction_delay{1.5};  // DistractedFollower [s]
  double comfort_decel{3.0};   // DistractedFollower [m/s^2]
};

void validate(const DriverPolicy & policy, double ceiling = kPhysicalCeiling);

struct DriverState
{
  std::optional<double> cue_since;
  bool braking{false};
};

/// Desired rear acceleration. ConstantSpeed holds speed; Tailgater is a PD law on the
/// gap error and relative speed clamped to the physical ceiling; DistractedFollower
/// notices front braking only after its reaction delay and then brakes at its
/// comfort deceleration until stopped or the front pulls away.
double driver_step(
  const DriverPolicy & policy, DriverState & state, const SceneState & scene, double now);

// ---------------------------------------------------------------------------
// Failure injection and the controller used by the simulator

/// One Bernoulli draw per dangerous episode. An episode opens when the controller
/// wants to engage after not wanting to, unless its last wish lies within
/// `merge_window` seconds; the whole episode shares the draw.
class FailureInjector
{
public:
  FailureInjector(double p_fail, std::uint64_t seed, double merge_window = 2.0);

  /// Reports the controller's wish for this step; returns true if it is suppressed.
  bool suppress(bool wants_engagement, double now);

  int episodes() const noexcept { return episodes_; }
  int suppressed_episodes() const noexcept { return suppressed_episodes_; }
  double p_fail() const noexcept { return p_fail_; }

private:
  double p_fail_;
  double merge_window_;
  std::mt19937_64 rng_;
  std::bernoulli_distribution draw_;
  bool episode_open_{false};
  bool previous_wish_{false};
  bool suppressed_{false};
  double last_wish_{0.0};
  int episodes_{0};
  int suppressed_episodes_{0};
};

enum class ControllerKind { None, Apb, Aeb };

class Controller
{
public:
  struct Output
  {
    AccelCommand command;
    ControllerMode mode{ControllerMode::None};
    bool active{false};      // controller shapes the command this step
    bool started{false};
    bool ended{false};
    bool suppressed{false};
  };

  static Controller none();
  static Controller apb(const RssParams & p, const ApbConfig & cfg = {});
  static Controller aeb(const AebConfig & cfg);

  Output step(const SceneState & observed, double driver_accel, double now, bool override_active);

  ControllerKind kind() const noexcept { return kind_; }
  ControllerMode mode() const noexcept;
  const FailureInjector * failure() const noexcept { return failure_ ? &*failure_ : nullptr; }

  friend Controller with_failure(Controller c, double p_fail, std::uint64_t seed, double merge_window);

private:
  ControllerKind kind_{ControllerKind::None};
  RssParams params_;
  ApbConfig apb_cfg_;
  AebConfig aeb_cfg_;
  ControllerState apb_state_;
  AebState aeb_state_;
  std::optional<FailureInjector> failure_;
};

/// Wraps `c` so that with probability `p_fail` it sits out an entire dangerous episode.
Controller with_failure(Controller c, double p_fail, std::uint64_t seed, double merge_window = 2.0);

}  // namespace apb

#endif  // APB__CONTROLLERS_HPP_
