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

#include <immintrin.h>

#include <stdexcept>

// Built with -mavx2; only reached through the runtime dispatcher after a CPU check.
namespace apb::kernels::avx2
{
namespace
{
inline __m256d max0(__m256d x) { return _mm256_max_pd(x, _mm256_setzero_pd()); }
}  // namespace

void safe_distance_apb_batch(
  std::span<const double> v_rear, std::span<const double> a_rear, std::span<const double> v_front,
  const RssParams & p, std::span<double> out)
{
  const std::size_t n = v_rear.size();
  if (a_rear.size() != n || v_front.size() != n || out.size() != n) {
    throw std::invalid_argument("safe_distance_apb_batch: span sizes differ");
  }

  const __m256d zero = _mm256_setzero_pd();
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d six = _mm256_set1_pd(6.0);
  const __m256d big_a = _mm256_set1_pd(p.a_max_brake);
  const __m256d amin = _mm256_set1_pd(p.a_min_brake);
  const __m256d neg_amin = _mm256_set1_pd(-p.a_min_brake);
  const __m256d j = _mm256_set1_pd(p.j_max);
  const __m256d slope = _mm256_set1_pd(p.a_min_brake - p.a_max_brake);
  const bool rear_outbrakes_front = p.a_min_brake - p.a_max_brake > 0.0;

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v0 = max0(_mm256_loadu_pd(v_rear.data() + i));
    const __m256d vf = max0(_mm256_loadu_pd(v_front.data() + i));
    const __m256d a0 =
      _mm256_max_pd(_mm256_min_pd(_mm256_loadu_pd(a_rear.data() + i), zero), neg_amin);

    const __m256d t1 = _mm256_div_pd(_mm256_add_pd(a0, amin), j);
    const __m256d root =
      _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(a0, a0), _mm256_mul_pd(_mm256_mul_pd(two, j), v0)));
    const __m256d den = _mm256_sub_pd(root, a0);
    const __m256d den_pos = _mm256_cmp_pd(den, zero, _CMP_GT_OQ);
    const __m256d t2 = _mm256_and_pd(_mm256_div_pd(_mm256_mul_pd(two, v0), den), den_pos);
    const __m256d stop_in_ramp = _mm256_cmp_pd(t2, t1, _CMP_LE_OQ);
    const __m256d t_sw = _mm256_blendv_pd(t1, t2, stop_in_ramp);

    const __m256d v_sw_raw = _mm256_sub_pd(
      _mm256_add_pd(v0, _mm256_mul_pd(a0, t_sw)), _mm256_mul_pd(_mm256_mul_pd(half, j), _mm256_mul_pd(t_sw, t_sw)));
    const __m256d v_sw = _mm256_andnot_pd(stop_in_ramp, max0(v_sw_raw));
    const __m256d inner = _mm256_sub_pd(_mm256_mul_pd(half, a0), _mm256_div_pd(_mm256_mul_pd(j, t_sw), six));
    const __m256d d_jerk = _mm256_mul_pd(t_sw, _mm256_add_pd(v0, _mm256_mul_pd(t_sw, inner)));
    const __m256d t_stop =
      _mm256_blendv_pd(_mm256_add_pd(t_sw, _mm256_div_pd(v_sw, amin)), t2, stop_in_ramp);
    const __m256d d_rear =
      _mm256_add_pd(d_jerk, _mm256_div_pd(_mm256_mul_pd(v_sw, v_sw), _mm256_mul_pd(two, amin)));

    const __m256d t_front = _mm256_div_pd(vf, big_a);
    const __m256d d_front = _mm256_div_pd(_mm256_mul_pd(vf, vf), _mm256_mul_pd(two, big_a));

    __m256d best = max0(_mm256_sub_pd(d_rear, d_front));

    // crossing during the ramp
    const __m256d b = _mm256_add_pd(a0, big_a);
    const __m256d c = _mm256_sub_pd(v0, vf);
    const __m256d disc = _mm256_add_pd(_mm256_mul_pd(b, b), _mm256_mul_pd(_mm256_mul_pd(two, j), c));
    const __m256d tq = _mm256_div_pd(_mm256_add_pd(b, _mm256_sqrt_pd(max0(disc))), j);
    __m256d valid = _mm256_cmp_pd(disc, zero, _CMP_GE_OQ);
    valid = _mm256_and_pd(valid, _mm256_cmp_pd(tq, zero, _CMP_GE_OQ));
    valid = _mm256_and_pd(valid, _mm256_cmp_pd(tq, t_sw, _CMP_LE_OQ));
    valid = _mm256_and_pd(valid, _mm256_cmp_pd(tq, t_front, _CMP_LE_OQ));
    const __m256d inner_q = _mm256_sub_pd(_mm256_mul_pd(half, a0), _mm256_div_pd(_mm256_mul_pd(j, tq), six));
    const __m256d rear_q = _mm256_mul_pd(tq, _mm256_add_pd(v0, _mm256_mul_pd(tq, inner_q)));
    const __m256d front_q =
      _mm256_mul_pd(tq, _mm256_sub_pd(vf, _mm256_mul_pd(_mm256_mul_pd(half, big_a), tq)));
    const __m256d dq = _mm256_sub_pd(rear_q, front_q);
    best = _mm256_blendv_pd(best, _mm256_max_pd(best, dq), valid);

    // crossing during the constant-deceleration phase
    if (rear_outbrakes_front) {
      const __m256d tl =
        _mm256_div_pd(_mm256_sub_pd(_mm256_add_pd(v_sw, _mm256_mul_pd(amin, t_sw)), vf), slope);
      __m256d valid_l = _mm256_cmp_pd(tl, t_sw, _CMP_GE_OQ);
      valid_l = _mm256_and_pd(valid_l, _mm256_cmp_pd(tl, t_stop, _CMP_LE_OQ));
      valid_l = _mm256_and_pd(valid_l, _mm256_cmp_pd(tl, t_front, _CMP_LE_OQ));
      const __m256d s = _mm256_sub_pd(tl, t_sw);
      const __m256d rear_l = _mm256_add_pd(
        d_jerk, _mm256_mul_pd(s, _mm256_sub_pd(v_sw, _mm256_mul_pd(_mm256_mul_pd(half, amin), s))));
      const __m256d front_l =
        _mm256_mul_pd(tl, _mm256_sub_pd(vf, _mm256_mul_pd(_mm256_mul_pd(half, big_a), tl)));
      const __m256d dl = _mm256_sub_pd(rear_l, front_l);
      best = _mm256_blendv_pd(best, _mm256_max_pd(best, dl), valid_l);
    }
    _mm256_storeu_pd(out.data() + i, best);
  }
  for (; i < n; ++i) {
    out[i] = scalar::safe_distance_apb(v_rear[i], a_rear[i], v_front[i], p);
  }
}

}  // namespace apb::kernels::avx2
