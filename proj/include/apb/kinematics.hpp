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

#ifndef APB__KINEMATICS_HPP_
#define APB__KINEMATICS_HPP_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace apb
{

/// Largest acceleration magnitude any vehicle may command or experience [m/s^2] (~1.5g).
inline constexpr double kPhysicalCeiling = 15.0;

/// Longitudinal state of one vehicle. Positions grow in the direction of travel,
/// `a` is signed (negative = braking).
struct KinematicState
{
  double x{0.0};
  double v{0.0};
  double a{0.0};
};

/// Parameter set of the safety formulas. All braking/jerk values are magnitudes.
struct RssParams
{
  double rho{0.0};          // response time of the classic rear profile [s]
  double a_max_brake{8.0};  // strongest braking assumed for the front car
  double a_min_brake{4.0};  // braking the rear car guarantees
  double a_max_accel{2.0};  // rear acceleration during the response time
  double j_max{2.0};        // slope of the braking ramp [m/s^3]
  double latency{0.0};      // sensing latency the monitor extrapolates over [s]
};

/// Raised for invalid inputs. `field` names the offending parameter so that
/// command-line front ends can print a single-line reason.
class ConfigError : public std::invalid_argument
{
public:
  ConfigError(std::string field, const std::string & what)
  : std::invalid_argument(field + ": " + what), field_(std::move(field))
  {
  }
  const std::string & field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Validates `p`; hard violations throw ConfigError, soft ones are returned as warnings.
std::vector<std::string> validate(const RssParams & p, double ceiling = kPhysicalCeiling);

/// Throws ConfigError if the state is not physical (negative speed, non-finite values).
void validate(const KinematicState & s, const std::string & field, double ceiling = kPhysicalCeiling);

}  // namespace apb

#endif  // APB__KINEMATICS_HPP_
