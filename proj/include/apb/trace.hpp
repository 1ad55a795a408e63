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

#ifndef APB__TRACE_HPP_
#define APB__TRACE_HPP_

#include "apb/kinematics.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace apb
{

enum class ControllerMode {
  None,        // no controller installed, driver command passes through
  Monitoring,  // APB watching, driver in control
  Intervening, // APB ramp active
  Overridden,  // APB switched off by the driver
  AebArmed,
  AebPending,  // AEB triggered, waiting out its response time
  AebBraking,
};

std::string_view to_string(ControllerMode mode);

/// One decision instant of a simulation.
struct TraceRecord
{
  double t{0.0};
  KinematicState rear;
  KinematicState front;
  double gap{0.0};
  double d_safe{0.0};       // ground-truth safe distance
  bool dangerous{false};    // ground-truth verdict
  ControllerMode mode{ControllerMode::None};
  double cmd_accel{0.0};    // acceleration applied to the rear at the start of the step
  double driver_accel{0.0};
  bool controller_active{false};  // command shaped by the controller rather than the driver
  double controller_accel{0.0};   // the controller's own request; meaningful only when active
};

enum class EventKind {
  DangerOnset,
  DangerExit,
  InterventionStart,
  InterventionEnd,
  InterventionSuppressed,
  Collision,
  Standstill,
};

std::string_view to_string(EventKind kind);

struct TraceEvent
{
  double t{0.0};
  EventKind kind{EventKind::DangerOnset};
};

struct TraceHeader
{
  std::uint64_t scenario_hash{0};
  std::uint64_t seed{0};
  std::uint64_t script_seed{0};
  RssParams params;
  double dt{0.01};
};

struct Trace
{
  TraceHeader header;
  std::vector<TraceRecord> records;
  std::vector<TraceEvent> events;
  double min_gap{0.0};                    // over the whole run, including inside steps
  std::optional<double> collision_time;
  int dangerous_episodes{0};
  int interventions{0};

  bool collided() const noexcept { return collision_time.has_value(); }
};

}  // namespace apb

#endif  // APB__TRACE_HPP_
