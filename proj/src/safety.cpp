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

#include "apb/safety.hpp"

#include "apb/kernels/safe_distance_batch.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace apb
{
namespace
{
struct LocalPoly
{
  double v{0.0};
  double a{0.0};
  double jerk{0.0};
};

// Right-continuous local motion of a profile at time t.
LocalPoly local_poly(const BrakingMotion & m, double t)
{
  if (t >= m.stop_time()) return {};
  for (const auto & s : m.segments()) {
    if (t < s.t_end) {
      const double tau = t - s.t_begin;
      return {s.velocity(t), s.a + s.jerk * tau, s.jerk};
    }
  }
  return {};
}

// Real roots of c2 s^2 + c1 s + c0 = 0 (at most two; degenerate forms handled).
int solve_quadratic(double c2, double c1, double c0, std::array<double, 2> & roots)
{
  const double scale = std::max({std::abs(c2), std::abs(c1), std::abs(c0)});
  if (scale == 0.0) return 0;
  if (std::abs(c2) <= 1e-14 * scale) {
    if (c1 == 0.0) return 0;
    roots[0] = -c0 / c1;
    return 1;
  }
  const double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc < 0.0) return 0;
  const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
  int n = 0;
  roots[n++] = q / c2;
  if (q != 0.0) roots[n++] = c0 / q;
  return n;
}

void add_time(std::array<double, 8> & ts, std::size_t & n, double t)
{
  if (std::isfinite(t) && t > 0.0) ts[n++] = t;
}
}  // namespace

double safe_distance_generalized(
  const KinematicState & rear0, const KinematicState & front0, ProfileId bf, ProfileId br,
  const RssParams & p)
{
  const BrakingMotion rear(br, rear0, p);
  const BrakingMotion front(bf, front0, p);
  const auto displacement = [&](double t) { return rear.distance(t) - front.distance(t); };

  std::array<double, 8> breaks{};
  std::size_t n = 0;
  breaks[n++] = 0.0;
  for (const auto & s : rear.segments()) add_time(breaks, n, s.t_end);
  for (const auto & s : front.segments()) add_time(breaks, n, s.t_end);
  std::sort(breaks.begin(), breaks.begin() + static_cast<std::ptrdiff_t>(n));

  double best = rear.stop_distance() - front.stop_distance();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double tb = breaks[i];
    const double te = breaks[i + 1];
    if (te <= tb) continue;
    best = std::max(best, displacement(te));
    const LocalPoly r = local_poly(rear, tb);
    const LocalPoly f = local_poly(front, tb);
    // relative speed on [tb, te): dv + da s + dj s^2 / 2
    std::array<double, 2> roots{};
    const int k = solve_quadratic(0.5 * (r.jerk - f.jerk), r.a - f.a, r.v - f.v, roots);
    for (int m = 0; m < k; ++m) {
      const double s = roots[static_cast<std::size_t>(m)];
      if (s > 0.0 && tb + s < te) best = std::max(best, displacement(tb + s));
    }
  }
  return std::max(best, 0.0);
}

double safe_distance_rss(double v_rear, double v_front, const RssParams & p)
{
  if (v_rear < 0.0 || v_front < 0.0) throw std::invalid_argument("safe_distance_rss: negative speed");
  return safe_distance_generalized(
    {0.0, v_rear, 0.0}, {0.0, v_front, 0.0}, ProfileId::FrontMaxBrake, ProfileId::RssRear, p);
}

double safe_distance_apb_closed_form(const KinematicState & rear0, double v_front, const RssParams & p)
{
  const BrakeSchedule s = brake_schedule_jerk(rear0, p);
  return std::max(s.d_total - v_front * v_front / (2.0 * p.a_max_brake), 0.0);
}

double safe_distance_apb(const KinematicState & rear0, double v_front, const RssParams & p)
{
  const double d = kernels::scalar::safe_distance_apb(rear0.v, rear0.a, v_front, p);
#ifndef NDEBUG
  if (p.a_min_brake <= p.a_max_brake) {
    const double closed = safe_distance_apb_closed_form(rear0, v_front, p);
    assert(d >= closed - 1e-9 * (1.0 + std::abs(closed)));
  }
#endif
  return d;
}

SafetyVerdict is_dangerous(const SceneState & scene, const RssParams & p)
{
  SafetyVerdict v;
  v.d_safe = safe_distance_apb(scene.rear, scene.front.v, p);
  v.margin = scene.gap - v.d_safe;
  v.dangerous = scene.gap < v.d_safe;
  return v;
}

SceneState predict_worst_case(
  const SceneState & scene, double rear_accel, double horizon, const RssParams & p)
{
  if (horizon <= 0.0) return scene;
  SceneState out = scene;

  const BrakingMotion front(ProfileId::FrontMaxBrake, scene.front, p);
  const double dx_front = front.distance(horizon);
  out.front.x = scene.front.x + dx_front;
  out.front.v = front.velocity(horizon);
  out.front.a = out.front.v > 0.0 ? -p.a_max_brake : 0.0;

  const double v = scene.rear.v;
  double dx_rear = 0.0;
  if (rear_accel >= 0.0) {
    dx_rear = v * horizon + 0.5 * rear_accel * horizon * horizon;
    out.rear.v = v + rear_accel * horizon;
    out.rear.a = rear_accel;
  } else {
    const double t_stop = v / -rear_accel;
    if (horizon >= t_stop) {
      dx_rear = v * v / (-2.0 * rear_accel);
      out.rear.v = 0.0;
      out.rear.a = 0.0;
    } else {
      dx_rear = v * horizon + 0.5 * rear_accel * horizon * horizon;
      out.rear.v = v + rear_accel * horizon;
      out.rear.a = rear_accel;
    }
  }
  out.rear.x = scene.rear.x + dx_rear;
  out.gap = scene.gap + dx_front - dx_rear;
  return out;
}

ResponseEnvelope::ResponseEnvelope(double t0, const SceneState & scene, const RssParams & p)
: t0_(t0),
  front_(ProfileId::FrontMaxBrake, scene.front, p),
  rear_(ProfileId::JerkBounded, scene.rear, p)
{
}

ResponseEnvelope response_envelope(const SceneState & scene_at_t0, const RssParams & p, double t0)
{
  if (!is_dangerous(scene_at_t0, p).dangerous) {
    throw std::invalid_argument("response_envelope: scene is safe at the requested onset");
  }
  return ResponseEnvelope(t0, scene_at_t0, p);
}

ComplianceReport check_compliance(const Trace & trace, const RssParams & p, double slack)
{
  const auto & recs = trace.records;
  for (std::size_t i = 1; i < recs.size(); ++i) {
    if (!(recs[i].t > recs[i - 1].t)) {
      throw std::invalid_argument("check_compliance: timestamps must be strictly increasing");
    }
  }
  const double tol = 1e-6 + slack;

  ComplianceReport report;
  std::optional<ResponseEnvelope> env;
  for (const auto & r : recs) {
    if (!r.dangerous) {
      env.reset();
      continue;
    }
    if (!env) {
      env.emplace(r.t, SceneState{r.rear, r.front, r.gap}, p);
      ++report.episodes_checked;
      continue;
    }
    const double since = r.t - env->t0();
    const double front_deficit = env->front_min_velocity(since) - r.front.v;
    const double rear_excess = r.rear.v - env->rear_max_velocity(since);
    if (front_deficit > tol) {
      if (!report.front_first_violation) report.front_first_violation = r.t;
      report.front_max_violation = std::max(report.front_max_violation, front_deficit);
    }
    if (rear_excess > tol) {
      if (!report.rear_first_violation) report.rear_first_violation = r.t;
      report.rear_max_violation = std::max(report.rear_max_violation, rear_excess);
    }
  }
  report.pass = !report.front_first_violation && !report.rear_first_violation;
  return report;
}

}  // namespace apb
