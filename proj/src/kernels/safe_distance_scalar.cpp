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

#include "apb/kernels/safe_distance_batch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace apb::kernels::scalar
{

double safe_distance_apb(double v_rear, double a_rear, double v_front, const RssParams & p)
{
  const double big_a = p.a_max_brake;
  const double amin = p.a_min_brake;
  const double j = p.j_max;

  const double v0 = std::max(v_rear, 0.0);
  const double vf = std::max(v_front, 0.0);
  const double a0 = std::max(std::min(a_rear, 0.0), -amin);

  // rear schedule
  const double t1 = (a0 + amin) / j;
  const double root = std::sqrt(a0 * a0 + 2.0 * j * v0);
  const double den = root - a0;
  const double t2 = den > 0.0 ? (2.0 * v0) / den : 0.0;
  const bool stop_in_ramp = t2 <= t1;
  const double t_sw = stop_in_ramp ? t2 : t1;
  const double v_sw = stop_in_ramp ? 0.0 : std::max(v0 + a0 * t_sw - 0.5 * j * (t_sw * t_sw), 0.0);
  const double d_jerk = t_sw * (v0 + t_sw * (0.5 * a0 - j * t_sw / 6.0));
  const double t_stop = stop_in_ramp ? t2 : t_sw + v_sw / amin;
  const double d_rear = d_jerk + v_sw * v_sw / (2.0 * amin);

  // front schedule
  const double t_front = vf / big_a;
  const double d_front = vf * vf / (2.0 * big_a);

  double best = std::max(d_rear - d_front, 0.0);

  // speeds cross from rear-faster to front-faster during the ramp
  const double b = a0 + big_a;
  const double c = v0 - vf;
  const double disc = b * b + 2.0 * j * c;
  const double tq = (b + std::sqrt(std::max(disc, 0.0))) / j;
  if (disc >= 0.0 && tq >= 0.0 && tq <= t_sw && tq <= t_front) {
    const double dq = tq * (v0 + tq * (0.5 * a0 - j * tq / 6.0)) - tq * (vf - 0.5 * big_a * tq);
    best = std::max(best, dq);
  }

  // ... or during the constant-deceleration phase (only if the rear decelerates harder)
  const double slope = amin - big_a;
  if (slope > 0.0) {
    const double tl = (v_sw + amin * t_sw - vf) / slope;
    if (tl >= t_sw && tl <= t_stop && tl <= t_front) {
      const double s = tl - t_sw;
      const double dl = d_jerk + s * (v_sw - 0.5 * amin * s) - tl * (vf - 0.5 * big_a * tl);
      best = std::max(best, dl);
    }
  }
  return best;
}

void safe_distance_apb_batch(
  std::span<const double> v_rear, std::span<const double> a_rear, std::span<const double> v_front,
  const RssParams & p, std::span<double> out)
{
  if (a_rear.size() != v_rear.size() || v_front.size() != v_rear.size() || out.size() != v_rear.size()) {
    throw std::invalid_argument("safe_distance_apb_batch: span sizes differ");
  }
  for (std::size_t i = 0; i < v_rear.size(); ++i) {
    out[i] = safe_distance_apb(v_rear[i], a_rear[i], v_front[i], p);
  }
}

}  // namespace apb::kernels::scalar
