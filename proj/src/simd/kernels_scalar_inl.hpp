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

#ifndef DUET_SRC_SIMD_KERNELS_SCALAR_INL_HPP_
#define DUET_SRC_SIMD_KERNELS_SCALAR_INL_HPP_

// Single-vertex skinning shared by the scalar kernel and the vector tails.
// The accumulation order here defines the reference result.

#include "duet/simd/kernels.hpp"

namespace duet::simd::detail {

inline void skin_one_vertex(const SkinArgs& args, std::size_t v) {
  double m[12] = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  for (std::size_t j = 0; j < args.num_joints; ++j) {
    const double w = args.weights_t[j * args.num_vertices + v];
    const double* t = args.transforms + 12 * j;
    for (int e = 0; e < 12; ++e) m[e] += w * t[e];
  }
  const double x = args.x[v], y = args.y[v], z = args.z[v];
  args.out_x[v] = m[0] * x + m[1] * y + m[2] * z + m[3];
  args.out_y[v] = m[4] * x + m[5] * y + m[6] * z + m[7];
  args.out_z[v] = m[8] * x + m[9] * y + m[10] * z + m[11];
}

}  // namespace duet::simd::detail

#endif  // DUET_SRC_SIMD_KERNELS_SCALAR_INL_HPP_
