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

#ifndef APB__SAFETY_HPP_
#define APB__SAFETY_HPP_

#include "apb/kinematics.hpp"
#include "apb/profiles.hpp"
#include "apb/trace.hpp"

#include <optional>

namespace apb
{

/// Two cars on one lane. `gap` is bumper to bumper, car lengths already removed;
/// gap <= 0 means contact.
struct SceneState
{
  KinematicState rear;
  KinematicState front;
  double gap{0.0};
};

struct SafetyVerdict
{
  bool dangerous{false};
  double d_safe{0.0};
  double margin{0.0};  // gap - d_safe
};

/// sup over t >= 0 of (rear displacement - front displacement) under the two
/// profiles, clamped at zero. Exact: the relative speed is piecewise quadratic so
/// only segment boundaries and crossing points need to be examined.
double safe_distance_generalized(
  const KinematicState & rear0, const KinematicState & front0, ProfileId bf, ProfileId br,
  const RssParams & p);

/// Classic safe distance: front at a_max_brake, rear with response time rho.
double safe_distance_rss(double v_rear, double v_front, const RssParams & p);

/// Safe distance for a jerk-bounded rear behind a front braking at a_max_brake.
double safe_distance_apb(const KinematicState & rear0, double v_front, const RssParams & p);

/// The textbook stop-point expression [d_rear_stop - v_f^2 / (2 a_max_brake)]_+.
/// Matches safe_distance_apb whenever the rear never out-brakes the front.
double safe_distance_apb_closed_form(const KinematicState & rear0, double v_front, const RssParams & p);

SafetyVerdict is_dangerous(const SceneState & scene, const RssParams & p);

/// Scene after `horizon` seconds assuming the front brakes at a_max_brake and the
/// rear holds `rear_accel` (velocities never go negative).
SceneState predict_worst_case(
  const SceneState & scene, double rear_accel, double horizon, const RssParams & p);

/// Velocity bounds each car must respect from the onset of a dangerous situation.
class ResponseEnvelope
{
public:
  ResponseEnvelope(double t0, const SceneState & scene, const RssParams & p);

  double t0() const noexcept { return t0_; }
  double front_min_velocity(double since_onset) const { return front_.velocity(since_onset); }
  double rear_max_velocity(double since_onset) const { return rear_.velocity(since_onset); }
  const BrakingMotion & front_motion() const noexcept { return front_; }
  const BrakingMotion & rear_motion() const noexcept { return rear_; }

private:
  double t0_;
  BrakingMotion front_;
  BrakingMotion rear_;
};

/// Throws std::invalid_argument if the scene is still safe at t0.
ResponseEnvelope response_envelope(const SceneState & scene_at_t0, const RssParams & p, double t0 = 0.0);

struct ComplianceReport
{
  bool pass{true};
  std::optional<double> front_first_violation;
  std::optional<double> rear_first_violation;
  double front_max_violation{0.0};  // m/s below the front envelope
  double rear_max_violation{0.0};   // m/s above the rear envelope
  int episodes_checked{0};
};

/// Checks every dangerous interval of `trace` against the envelopes frozen at its onset,
/// with a tolerance of 1e-6 m/s plus `slack` (the simulator integrates exactly, so the
/// default slack is zero). Throws std::invalid_argument on non-increasing timestamps.
ComplianceReport check_compliance(const Trace & trace, const RssParams & p, double slack = 0.0);

}  // namespace apb

#endif  // APB__SAFETY_HPP_
