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

#include "apb/trace.hpp"

namespace apb
{

std::string_view to_string(ControllerMode mode)
{
  switch (mode) {
    case ControllerMode::None:
      return "none";
    case ControllerMode::Monitoring:
      return "monitoring";
    case ControllerMode::Intervening:
      return "intervening";
    case ControllerMode::Overridden:
      return "overridden";
    case ControllerMode::AebArmed:
      return "armed";
    case ControllerMode::AebPending:
      return "pending";
    case ControllerMode::AebBraking:
      return "braking";
  }
  return "unknown";
}

std::string_view to_string(EventKind kind)
{
  switch (kind) {
    case EventKind::DangerOnset:
      return "danger_onset";
    case EventKind::DangerExit:
      return "danger_exit";
    case EventKind::InterventionStart:
      return "intervention_start";
    case EventKind::InterventionEnd:
      return "intervention_end";
    case EventKind::InterventionSuppressed:
      return "intervention_suppressed";
    case EventKind::Collision:
      return "collision";
    case EventKind::Standstill:
      return "standstill";
  }
  return "unknown";
}

}  // namespace apb
