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

#ifndef APB__KERNELS__SAFE_DISTANCE_BATCH_HPP_
#define APB__KERNELS__SAFE_DISTANCE_BATCH_HPP_

#include "apb/kinematics.hpp"

#include <span>
#include <string_view>

// Element-wise safe distance between a jerk-bounded rear car and a front car braking
// at a_max_brake, evaluated exactly (including the interior velocity-crossing case).
// The scalar routine is the reference; the AVX2 routine must agree with it to
// rounding and is selected at runtime when the CPU supports it.
namespace apb::kernels
{

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// Best instruction set available on this machine. Setting the environment variable
/// APB_FORCE_SCALAR=1 pins the scalar path.
Isa detected_isa();

/// True if the AVX2 translation unit was compiled in.
bool avx2_compiled() noexcept;

/// Dispatching entry point: out[i] = d_safe(v_rear[i], a_rear[i], v_front[i]).
/// All spans must have the same length.
void safe_distance_apb_batch(
  std::span<const double> v_rear, std::span<const double> a_rear, std::span<const double> v_front,
  const RssParams & p, std::span<double> out);

void safe_distance_apb_batch(
  Isa isa, std::span<const double> v_rear, std::span<const double> a_rear,
  std::span<const double> v_front, const RssParams & p, std::span<double> out);

namespace scalar
{
double safe_distance_apb(double v_rear, double a_rear, double v_front, const RssParams & p);

void safe_distance_apb_batch(
  std::span<const double> v_rear, std::span<const double> a_rear, std::span<const double> v_front,
  const RssParams & p, std::span<double> out);
}  // namespace scalar

namespace avx2
{
void safe_distance_apb_batch(
  std::span<const double> v_rear, std::span<const double> a_rear, std::span<const double> v_front,
  const RssParams & p, std::span<double> out);
}  // namespace avx2

}  // namespace apb::kernels

#endif  // APB__KERNELS__SAFE_DISTANCE_BATCH_HPP_
