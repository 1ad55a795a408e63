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

#include <cstdlib>
#include <cstring>

namespace apb::kernels
{

std::string_view to_string(Isa isa)
{
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

bool avx2_compiled() noexcept
{
#if defined(APB_HAVE_AVX2)
  return true;
#else
  return false;
#endif
}

Isa detected_isa()
{
  static const Isa isa = [] {
    const char * force = std::getenv("APB_FORCE_SCALAR");
    if (force != nullptr && std::strcmp(force, "0") != 0 && force[0] != '\0') return Isa::Scalar;
#if defined(APB_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
    return Isa::Scalar;
  }();
  return isa;
}

void safe_distance_apb_batch(
  Isa isa, std::span<const double> v_rear, std::span<const double> a_rear,
  std::span<const double> v_front, const RssParams & p, std::span<double> out)
{
#if defined(APB_HAVE_AVX2)
  if (isa == Isa::Avx2) {
    avx2::safe_distance_apb_batch(v_rear, a_rear, v_front, p, out);
    return;
  }
#else
  (void)isa;
#endif
  scalar::safe_distance_apb_batch(v_rear, a_rear, v_front, p, out);
}

void safe_distance_apb_batch(
  std::span<const double> v_rear, std::span<const double> a_rear, std::span<const double> v_front,
  const RssParams & p, std::span<double> out)
{
  safe_distance_apb_batch(detected_isa(), v_rear, a_rear, v_front, p, out);
}

}  // namespace apb::kernels
