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

#ifndef APB__PROFILES_HPP_
#define APB__PROFILES_HPP_

#include "apb/kinematics.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

namespace apb
{

enum class ProfileId {
  FrontMaxBrake,  // immediate braking at a_max_brake
  RssRear,        // accelerate at a_max_accel for rho, then brake at a_min_brake
  JerkBounded,    // ramp the deceleration at j_max down to a_min_brake, then hold
};

std::string_view to_string(ProfileId id);

/// Phase boundaries of a jerk-bounded stop.
struct BrakeSchedule
{
  double t1{0.0};           // time the ramp reaches -a_min_brake
  double t2{0.0};           // time the ramp alone brings the car to rest
  double t_switch{0.0};     // min(t1, t2)
  double t_stop{0.0};       // first time the velocity is zero
  double v_at_switch{0.0};
  double d_jerk{0.0};       // distance covered during [0, t_switch]
  double d_total{0.0};      // full braking distance
};

/// Acceleration the jerk-bounded profile starts from: positive values are released
/// instantly, values below -a_min_brake are relaxed to it.
double effective_initial_accel(const KinematicState & s0, const RssParams & p);

/// State after braking for `t` seconds at constant jerk -j_max from `s0`.
/// Requires s0.a <= 0 and t within the interval where the polynomial speed is >= 0.
KinematicState jerk_phase_state(const KinematicState & s0, double j_max, double t);

BrakeSchedule brake_schedule_jerk(const KinematicState & s0, const RssParams & p);

/// One polynomial piece of a braking motion, time measured from the profile start.
/// Within [t_begin, t_end): a(t) = a + jerk * (t - t_begin); `x` is the distance
/// already covered at t_begin.
struct MotionSegment
{
  double t_begin{0.0};
  double t_end{0.0};
  double x{0.0};
  double v{0.0};
  double a{0.0};
  double jerk{0.0};

  double velocity(double t) const;
  double distance(double t) const;
};

/// The future motion a braking profile prescribes for a given initial state:
/// at most two polynomial pieces followed by standstill.
class BrakingMotion
{
public:
  BrakingMotion(ProfileId id, const KinematicState & s0, const RssParams & p);

  ProfileId profile() const noexcept { return profile_; }
  std::span<const MotionSegment> segments() const noexcept { return {segments_.data(), count_}; }
  double stop_time() const noexcept { return stop_time_; }
  double stop_distance() const noexcept { return stop_distance_; }

  /// Speed at time `t` >= 0; zero from stop_time() on.
  double velocity(double t) const;
  /// Distance covered during [0, t]; `t` may be +infinity.
  double distance(double t) const;
  /// Acceleration at time `t` (right-continuous, zero once stopped).
  double acceleration(double t) const;

private:
  void push(const MotionSegment & s);

  ProfileId profile_;
  std::array<MotionSegment, 2> segments_{};
  std::size_t count_{0};
  double stop_time_{0.0};
  double stop_distance_{0.0};
};

double velocity_at(ProfileId profile, const KinematicState & s0, const RssParams & p, double t);
double distance_traveled(ProfileId profile, const KinematicState & s0, const RssParams & p, double t);

}  // namespace apb

#endif  // APB__PROFILES_HPP_
