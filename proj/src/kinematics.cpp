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

#include "apb/kinematics.hpp"

#include <cmath>

namespace apb
{
namespace
{
void require_finite(double value, const char * field)
{
  if (!std::isfinite(value)) {
    throw ConfigError(field, "must be finite");
  }
}
}  // namespace

std::vector<std::string> validate(const RssParams & p, double ceiling)
{
  require_finite(p.rho, "rho");
  require_finite(p.a_max_brake, "a_max_brake");
  require_finite(p.a_min_brake, "a_min_brake");
  require_finite(p.a_max_accel, "a_max_accel");
  require_finite(p.j_max, "j_max");
  require_finite(p.latency, "latency");

  if (p.rho < 0.0) throw ConfigError("rho", "must be >= 0");
  if (p.latency < 0.0) throw ConfigError("latency", "must be >= 0");
  if (p.a_max_accel < 0.0) throw ConfigError("a_max_accel", "must be >= 0");
  if (p.a_max_brake <= 0.0) throw ConfigError("a_max_brake", "must be > 0");
  if (p.a_min_brake <= 0.0) throw ConfigError("a_min_brake", "must be > 0");
  if (p.j_max <= 0.0) throw ConfigError("j_max", "must be > 0");
  if (p.a_max_brake > ceiling) throw ConfigError("a_max_brake", "exceeds physical ceiling");
  if (p.a_min_brake > ceiling) throw ConfigError("a_min_brake", "exceeds physical ceiling");
  if (p.a_max_accel > ceiling) throw ConfigError("a_max_accel", "exceeds physical ceiling");

  std::vector<std::string> warnings;
  if (p.a_min_brake > p.a_max_brake) {
    warnings.emplace_back(
      "a_min_brake: exceeds a_max_brake; rear braking assumed stronger than the front's worst case");
  }
  return warnings;
}

void validate(const KinematicState & s, const std::string & field, double ceiling)
{
  if (!std::isfinite(s.x) || !std::isfinite(s.v) || !std::isfinite(s.a)) {
    throw ConfigError(field, "state must be finite");
  }
  if (s.v < 0.0) throw ConfigError(field + ".v", "must be >= 0");
  if (std::abs(s.a) > ceiling) throw ConfigError(field + ".a", "exceeds physical ceiling");
}

}  // namespace apb
