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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace apb
{
namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();
// speeds are resolved to 1 nm/s when forming the closing speed
constexpr double kSpeedResolution = 1e9;
}  // namespace

double AccelRamp::at(double tau) const
{
  const double a = start + jerk * tau;
  if (jerk < 0.0) return std::max(a, limit);
  if (jerk > 0.0) return std::min(a, limit);
  return start;
}

double AccelRamp::saturation_time() const
{
  if (jerk == 0.0) return kInf;
  return std::max(0.0, (limit - start) / jerk);
}

double AccelCommand::at(double tau) const
{
  return ramp ? std::min(base, ramp->at(tau)) : base;
}

double closing_speed(double v_rear, double v_front)
{
  return std::round((v_rear - v_front) * kSpeedResolution) / kSpeedResolution;
}

double ttc(double gap, double v_rear, double v_front)
{
  if (!(gap > 0.0)) throw std::invalid_argument("ttc: gap must be > 0");
  const double closing = closing_speed(v_rear, v_front);
  return closing > 0.0 ? gap / closing : kInf;
}

void validate(const AebConfig & cfg, double ceiling)
{
  if (!(cfg.ttc_threshold > 0.0)) throw ConfigError("ttc_threshold", "must be > 0");
  if (!(cfg.brake_magnitude > 0.0)) throw ConfigError("brake_magnitude", "must be > 0");
  if (cfg.brake_magnitude > ceiling) throw ConfigError("brake_magnitude", "exceeds physical ceiling");
  if (!(cfg.response_time >= 0.0)) throw ConfigError("response_time", "must be >= 0");
}

bool aeb_triggers(const SceneState & scene, const AebConfig & cfg)
{
  if (!(scene.gap > 0.0)) return true;
  return ttc(scene.gap, scene.rear.v, scene.front.v) <= cfg.ttc_threshold;
}

AebOutput aeb_step(
  const AebState & state, const SceneState & scene, const AebConfig & cfg, double driver_accel,
  double now)
{
  AebOutput out{state, AccelCommand{driver_accel, std::nullopt}};
  AebState & s = out.state;

  if (s.mode == ControllerMode::AebBraking &&
      (scene.rear.v <= scene.front.v || scene.rear.v <= 0.0)) {
    s.mode = ControllerMode::AebArmed;
  }
  if (s.mode == ControllerMode::AebArmed && aeb_triggers(scene, cfg)) {
    s.trigger_time = now;
    s.mode = ControllerMode::AebPending;
  }
  if (s.mode == ControllerMode::AebPending && now - s.trigger_time >= cfg.response_time - 1e-9) {
    s.mode = ControllerMode::AebBraking;
  }
  if (s.mode == ControllerMode::AebBraking) {
    out.command.base = std::min(driver_accel, -cfg.brake_magnitude);
  }
  return out;
}

SafetyVerdict apb_monitor(
  const SceneState & scene, const RssParams & p, double driver_accel, const ApbConfig & cfg)
{
  SafetyVerdict now = is_dangerous(scene, p);
  const double horizon = p.latency + cfg.lookahead;
  if (horizon <= 0.0) return now;
  const SafetyVerdict ahead = is_dangerous(predict_worst_case(scene, driver_accel, horizon, p), p);
  return ahead.margin < now.margin ? ahead : now;
}

ApbOutput apb_step(
  const ControllerState & state, const SceneState & scene, const RssParams & p, double driver_accel,
  double now, bool override_active, const ApbConfig & cfg)
{
  ApbOutput out;
  out.state = state;
  out.command = AccelCommand{driver_accel, std::nullopt};
  ControllerState & s = out.state;

  if (override_active) {
    out.ended = state.mode == ControllerMode::Intervening;
    s = ControllerState{};
    s.mode = ControllerMode::Overridden;
    out.verdict = is_dangerous(scene, p);
    return out;
  }
  if (s.mode == ControllerMode::Overridden) s = ControllerState{};

  out.verdict = apb_monitor(scene, p, driver_accel, cfg);
  // a car at rest whose driver does not ask to move cannot close the gap
  const bool parked = scene.rear.v <= 0.0 && driver_accel <= 0.0;

  if (s.mode == ControllerMode::Intervening && (parked || !out.verdict.dangerous)) {
    const double ramp_now =
      std::max(s.onset_accel - p.j_max * (now - *s.onset_time), -p.a_min_brake);
    s.mode = ControllerMode::Monitoring;
    s.onset_time.reset();
    s.release_time = now;
    s.release_accel = ramp_now;
    out.ended = true;
  }
  if (s.mode == ControllerMode::Monitoring && out.verdict.dangerous && !parked) {
    s.mode = ControllerMode::Intervening;
    s.onset_time = now;
    s.onset_accel = std::min({scene.rear.a, driver_accel, 0.0});
    s.release_time.reset();
    out.started = true;
  }

  s.commanded_accel.reset();
  if (s.mode == ControllerMode::Intervening) {
    const double ramp_now =
      std::max(s.onset_accel - p.j_max * (now - *s.onset_time), -p.a_min_brake);
    out.command.ramp = AccelRamp{ramp_now, -p.j_max, -p.a_min_brake};
    s.commanded_accel = out.command.initial();
  } else if (s.release_time) {
    // unwind the braking only; a positive driver request is the driver's own business
    const double target = std::min(driver_accel, 0.0);
    const double release_now = s.release_accel + p.j_max * (now - *s.release_time);
    if (release_now >= target) {
      s.release_time.reset();
    } else {
      out.command.ramp = AccelRamp{release_now, p.j_max, target};
      s.commanded_accel = out.command.initial();
    }
  }
  return out;
}

void validate(const DriverPolicy & policy, double ceiling)
{
  switch (policy.kind) {
    case DriverPolicy::Kind::ConstantSpeed:
      break;
    case DriverPolicy::Kind::Tailgater:
      if (!(policy.target_gap >= 0.0) || !std::isfinite(policy.target_gap)) {
        throw ConfigError("driver.target_gap", "must be finite and >= 0");
      }
      break;
    case DriverPolicy::Kind::DistractedFollower:
      if (!(policy.reaction_delay >= 0.0) || !std::isfinite(policy.reaction_delay)) {
        throw ConfigError("driver.reaction_delay", "must be finite and >= 0");
      }
      if (!(policy.comfort_decel > 0.0) || policy.comfort_decel > ceiling) {
        throw ConfigError("driver.comfort_decel", "must be in (0, ceiling]");
      }
      break;
  }
}

double driver_step(
  const DriverPolicy & policy, DriverState & state, const SceneState & scene, double now)
{
  switch (policy.kind) {
    case DriverPolicy::Kind::ConstantSpeed:
      return 0.0;
    case DriverPolicy::Kind::Tailgater: {
      const double a = kTailgaterGapGain * (scene.gap - policy.target_gap) +
                       kTailgaterSpeedGain * (scene.front.v - scene.rear.v);
      return std::clamp(a, -kPhysicalCeiling, kPhysicalCeiling);
    }
    case DriverPolicy::Kind::DistractedFollower: {
      const bool cue = scene.front.a < -kFrontBrakeCue;
      if (state.braking) {
        const bool pulled_away = !cue && scene.front.v > scene.rear.v;
        if (scene.rear.v <= 0.0 || pulled_away) {
          state.braking = false;
          state.cue_since.reset();
        }
      } else if (cue) {
        if (!state.cue_since) state.cue_since = now;
        if (now - *state.cue_since >= policy.reaction_delay) state.braking = true;
      } else {
        state.cue_since.reset();
      }
      return state.braking ? -policy.comfort_decel : 0.0;
    }
  }
  return 0.0;
}

FailureInjector::FailureInjector(double p_fail, std::uint64_t seed, double merge_window)
: p_fail_(p_fail), merge_window_(merge_window), rng_(seed), draw_(std::clamp(p_fail, 0.0, 1.0))
{
  if (!(p_fail >= 0.0 && p_fail <= 1.0)) throw ConfigError("p_fail", "must be in [0, 1]");
  if (!(merge_window >= 0.0)) throw ConfigError("episode_window", "must be >= 0");
}

bool FailureInjector::suppress(bool wants_engagement, double now)
{
  if (!wants_engagement) {
    previous_wish_ = false;
    return false;
  }
  const bool new_episode =
    !previous_wish_ && (!episode_open_ || now - last_wish_ > merge_window_);
  if (new_episode) {
    episode_open_ = true;
    suppressed_ = draw_(rng_);
    ++episodes_;
    if (suppressed_) ++suppressed_episodes_;
  }
  previous_wish_ = true;
  last_wish_ = now;
  return suppressed_;
}

Controller Controller::none()
{
  return Controller{};
}

Controller Controller::apb(const RssParams & p, const ApbConfig & cfg)
{
  Controller c;
  c.kind_ = ControllerKind::Apb;
  c.params_ = p;
  c.apb_cfg_ = cfg;
  return c;
}

Controller Controller::aeb(const AebConfig & cfg)
{
  Controller c;
  c.kind_ = ControllerKind::Aeb;
  c.aeb_cfg_ = cfg;
  return c;
}

ControllerMode Controller::mode() const noexcept
{
  switch (kind_) {
    case ControllerKind::Apb:
      return apb_state_.mode;
    case ControllerKind::Aeb:
      return aeb_state_.mode;
    case ControllerKind::None:
      break;
  }
  return ControllerMode::None;
}

Controller::Output Controller::step(
  const SceneState & observed, double driver_accel, double now, bool override_active)
{
  Output out;
  out.command = AccelCommand{driver_accel, std::nullopt};
  switch (kind_) {
    case ControllerKind::None:
      out.mode = ControllerMode::None;
      return out;
    case ControllerKind::Apb: {
      const ApbOutput r =
        apb_step(apb_state_, observed, params_, driver_accel, now, override_active, apb_cfg_);
      const bool engaged = r.state.mode == ControllerMode::Intervening;
      if (failure_ && failure_->suppress(engaged, now)) {
        apb_state_ = ControllerState{};
        out.mode = apb_state_.mode;
        out.suppressed = true;
        return out;
      }
      apb_state_ = r.state;
      out.command = r.command;
      out.mode = r.state.mode;
      out.active = r.state.commanded_accel.has_value();
      out.started = r.started;
      out.ended = r.ended;
      return out;
    }
    case ControllerKind::Aeb: {
      const AebOutput r = aeb_step(aeb_state_, observed, aeb_cfg_, driver_accel, now);
      const bool engaged = r.state.mode != ControllerMode::AebArmed;
      if (failure_ && failure_->suppress(engaged, now)) {
        aeb_state_ = AebState{};
        out.mode = aeb_state_.mode;
        out.suppressed = true;
        return out;
      }
      const bool was_engaged = aeb_state_.mode != ControllerMode::AebArmed;
      aeb_state_ = r.state;
      out.command = r.command;
      out.mode = r.state.mode;
      out.active = r.state.mode == ControllerMode::AebBraking;
      out.started = engaged && !was_engaged;
      out.ended = was_engaged && !engaged;
      return out;
    }
  }
  return out;
}

Controller with_failure(Controller c, double p_fail, std::uint64_t seed, double merge_window)
{
  c.failure_.emplace(p_fail, seed, merge_window);
  return c;
}

}  // namespace apb
