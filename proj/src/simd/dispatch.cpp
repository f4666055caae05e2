// Copyright 2026 The Duet Authors
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

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "duet/simd/kernels.hpp"

namespace duet::simd {
namespace {

bool host_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& select() {
  const char* env = std::getenv("DUET_SIMD");
  if (env != nullptr) {
    const std::string want(env);
    if (want == "scalar") return detail::scalar_table();
    if (want == "avx2") return kernels_for(Isa::kAvx2);
  }
  if (isa_available(Isa::kAvx2)) return kernels_for(Isa::kAvx2);
  return detail::scalar_table();
}

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(DUET_HAVE_AVX2)
      return host_has_avx2();
#else
      return false;
#endif
  }
  return false;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("SIMD variant not available: " +
                                std::string(isa_name(isa)));
  }
#if defined(DUET_HAVE_AVX2)
  if (isa == Isa::kAvx2) return detail::avx2_table();
#endif
  return detail::scalar_table();
}

const KernelTable& kernels() {
  static const KernelTable& active = select();
  return active;
}

}  // namespace duet::simd
