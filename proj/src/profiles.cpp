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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace apb
{
namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();

// Positive root of v0 + a0 t - j t^2 / 2 = 0 for a0 <= 0, written without cancellation.
double ramp_stop_time(double v0, double a0, double j)
{
  if (v0 <= 0.0) return 0.0;
  const double root = std::sqrt(a0 * a0 + 2.0 * j * v0);
  return 2.0 * v0 / (root - a0);
}
}  // namespace

std::string_view to_string(ProfileId id)
{
  switch (id) {
    case ProfileId::FrontMaxBrake:
      return "front_max_brake";
    case ProfileId::RssRear:
      return "rss_rear";
    case ProfileId::JerkBounded:
      return "jerk_bounded";
  }
  return "unknown";
}

double effective_initial_accel(const KinematicState & s0, const RssParams & p)
{
  return std::max(std::min(s0.a, 0.0), -p.a_min_brake);
}

KinematicState jerk_phase_state(const KinematicState & s0, double j_max, double t)
{
  if (t < 0.0) throw std::invalid_argument("jerk_phase_state: negative duration");
  if (s0.a > 0.0) throw std::invalid_argument("jerk_phase_state: initial acceleration must be <= 0");
  if (j_max <= 0.0) throw std::invalid_argument("jerk_phase_state: j_max must be > 0");
  const double t2 = ramp_stop_time(s0.v, s0.a, j_max);
  if (t > t2 * (1.0 + 1e-12) + 1e-12) {
    throw std::invalid_argument("jerk_phase_state: duration past the velocity zero-crossing");
  }
  KinematicState out;
  out.a = s0.a - j_max * t;
  out.v = std::max(0.0, s0.v + s0.a * t - 0.5 * j_max * t * t);
  out.x = s0.x + s0.v * t + 0.5 * s0.a * t * t - j_max * t * t * t / 6.0;
  return out;
}

BrakeSchedule brake_schedule_jerk(const KinematicState & s0, const RssParams & p)
{
  const double a0 = effective_initial_accel(s0, p);
  const double j = p.j_max;
  const double v0 = std::max(s0.v, 0.0);

  BrakeSchedule s;
  s.t1 = (a0 + p.a_min_brake) / j;
  s.t2 = ramp_stop_time(v0, a0, j);
  if (s.t2 <= s.t1) {
    // the ramp stops the car before (or exactly when) full deceleration is reached
    s.t_switch = s.t2;
    s.t_stop = s.t2;
    s.v_at_switch = 0.0;
  } else {
    s.t_switch = s.t1;
    const double t = s.t1;
    s.v_at_switch = std::max(0.0, v0 + a0 * t - 0.5 * j * t * t);
    s.t_stop = t + s.v_at_switch / p.a_min_brake;
  }
  const double t = s.t_switch;
  s.d_jerk = v0 * t + 0.5 * a0 * t * t - j * t * t * t / 6.0;
  s.d_total = s.d_jerk + s.v_at_switch * s.v_at_switch / (2.0 * p.a_min_brake);
  return s;
}

double MotionSegment::velocity(double t) const
{
  const double tau = t - t_begin;
  return v + a * tau + 0.5 * jerk * tau * tau;
}

double MotionSegment::distance(double t) const
{
  const double tau = t - t_begin;
  return x + v * tau + 0.5 * a * tau * tau + jerk * tau * tau * tau / 6.0;
}

BrakingMotion::BrakingMotion(ProfileId id, const KinematicState & s0, const RssParams & p)
: profile_(id)
{
  const double v0 = std::max(s0.v, 0.0);
  switch (id) {
    case ProfileId::FrontMaxBrake: {
      if (v0 > 0.0) {
        stop_time_ = v0 / p.a_max_brake;
        push({0.0, stop_time_, 0.0, v0, -p.a_max_brake, 0.0});
        stop_distance_ = v0 * v0 / (2.0 * p.a_max_brake);
      }
      break;
    }
    case ProfileId::RssRear: {
      const double v1 = v0 + p.rho * p.a_max_accel;
      if (v1 > 0.0) {
        const double d1 = v0 * p.rho + 0.5 * p.a_max_accel * p.rho * p.rho;
        if (p.rho > 0.0) push({0.0, p.rho, 0.0, v0, p.a_max_accel, 0.0});
        stop_time_ = p.rho + v1 / p.a_min_brake;
        push({p.rho, stop_time_, d1, v1, -p.a_min_brake, 0.0});
        stop_distance_ = d1 + v1 * v1 / (2.0 * p.a_min_brake);
      }
      break;
    }
    case ProfileId::JerkBounded: {
      const BrakeSchedule s = brake_schedule_jerk(s0, p);
      const double a0 = effective_initial_accel(s0, p);
      if (s.t_switch > 0.0) push({0.0, s.t_switch, 0.0, v0, a0, -p.j_max});
      if (s.v_at_switch > 0.0) {
        push({s.t_switch, s.t_stop, s.d_jerk, s.v_at_switch, -p.a_min_brake, 0.0});
      }
      stop_time_ = s.t_stop;
      stop_distance_ = s.d_total;
      break;
    }
  }
}

void BrakingMotion::push(const MotionSegment & s)
{
  segments_[count_++] = s;
}

double BrakingMotion::velocity(double t) const
{
  if (t >= stop_time_) return 0.0;
  for (std::size_t i = 0; i < count_; ++i) {
    if (t < segments_[i].t_end) return std::max(0.0, segments_[i].velocity(t));
  }
  return 0.0;
}

double BrakingMotion::distance(double t) const
{
  if (t <= 0.0) return 0.0;
  if (t >= stop_time_) return stop_distance_;
  for (std::size_t i = 0; i < count_; ++i) {
    if (t < segments_[i].t_end) return segments_[i].distance(t);
  }
  return stop_distance_;
}

double BrakingMotion::acceleration(double t) const
{
  if (t >= stop_time_) return 0.0;
  for (std::size_t i = 0; i < count_; ++i) {
    if (t < segments_[i].t_end) return segments_[i].a + segments_[i].jerk * (t - segments_[i].t_begin);
  }
  return 0.0;
}

double velocity_at(ProfileId profile, const KinematicState & s0, const RssParams & p, double t)
{
  if (t < 0.0) throw std::invalid_argument("velocity_at: negative time");
  return BrakingMotion(profile, s0, p).velocity(t);
}

double distance_traveled(ProfileId profile, const KinematicState & s0, const RssParams & p, double t)
{
  if (t < 0.0) throw std::invalid_argument("distance_traveled: negative time");
  if (t == kInf) return BrakingMotion(profile, s0, p).stop_distance();
  return BrakingMotion(profile, s0, p).distance(t);
}

}  // namespace apb
