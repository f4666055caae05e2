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

#ifndef DUET_SIMD_KERNELS_HPP_
#define DUET_SIMD_KERNELS_HPP_

// Data-parallel inner loops used by the body model and the metrics.
//
// Every kernel has a scalar reference implementation and, where the build
// and the host allow it, an AVX2 variant. The variant is chosen once at
// first use from CPUID; the DUET_SIMD environment variable ("scalar" or
// "avx2") overrides the choice.
//
// Elementwise kernels (axpy, skin) perform the same IEEE operations in the
// same order in every variant and are bit-identical across ISAs. Reductions
// (dot, sum_norms3) reassociate and agree to rounding only.

#include <cstddef>
#include <span>
#include <string_view>

namespace duet::simd {

enum class Isa { kScalar, kAvx2 };

struct SkinArgs {
  std::size_t num_vertices = 0;
  std::size_t num_joints = 0;
  // Shaped rest vertices, structure-of-arrays.
  const double* x = nullptr;
  const double* y = nullptr;
  const double* z = nullptr;
  // Skinning weights, joint-major: weights_t[j * num_vertices + v].
  const double* weights_t = nullptr;
  // Per-joint 3x4 row-major affine transforms, 12 doubles each.
  const double* transforms = nullptr;
  double* out_x = nullptr;
  double* out_y = nullptr;
  double* out_z = nullptr;
};

struct KernelTable {
  Isa isa;
  // out[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* out, std::size_t n);
  // Linear blend skinning.
  void (*skin)(const SkinArgs& args);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // Sum over i of the Euclidean norm of the 3-vector at d[3i..3i+2].
  double (*sum_norms3)(const double* d, std::size_t n);
};

bool isa_available(Isa isa);
std::string_view isa_name(Isa isa);

// Kernels for the active ISA.
const KernelTable& kernels();

// Kernels for a specific ISA; throws std::invalid_argument when the ISA was
// not compiled in or the host lacks it.
const KernelTable& kernels_for(Isa isa);

// Thin span wrappers over the active table.
inline void axpy(double a, std::span<const double> x, std::span<double> out) {
  kernels().axpy(a, x.data(), out.data(), out.size());
}
inline double dot(std::span<const double> a, std::span<const double> b) {
  return kernels().dot(a.data(), b.data(), a.size());
}

namespace detail {
const KernelTable& scalar_table();
#if defined(DUET_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
}  // namespace detail

}  // namespace duet::simd

#endif  // DUET_SIMD_KERNELS_HPP_
