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

#ifndef APB__SCENARIO_IO_HPP_
#define APB__SCENARIO_IO_HPP_

#include "apb/sim.hpp"
#include "apb/trace.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>

namespace apb
{

/// Parses a scenario document (JSON). Unknown keys are rejected; every error is a
/// ConfigError whose field is the dotted path of the offending entry.
Scenario scenario_from_json(std::string_view text);

/// Canonical form: every field written, keys in a fixed order.
std::string scenario_to_json(const Scenario & sc);

Scenario load_scenario(const std::filesystem::path & path);

/// Parameter files hold the members of the scenario "params" section at top level,
/// or a full scenario whose "params" section is used.
RssParams params_from_json(std::string_view text);
std::string params_to_json(const RssParams & p);
RssParams load_params(const std::filesystem::path & path);

/// Number formatting used by every table the toolkit writes (9 significant digits).
std::string format_number(double value);

inline constexpr std::string_view kTraceColumns =
  "t,x_r,v_r,a_r,x_f,v_f,a_f,gap,d_safe,dangerous,mode,cmd_accel";

/// '#'-prefixed header (hash, seeds, parameters, events) followed by one row per step.
void write_trace_csv(std::ostream & os, const Trace & trace);

}  // namespace apb

#endif  // APB__SCENARIO_IO_HPP_
