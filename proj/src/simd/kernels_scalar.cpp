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

#include <cmath>

#include "duet/simd/kernels.hpp"
#include "kernels_scalar_inl.hpp"

namespace duet::simd {
namespace {

void axpy_scalar(double a, const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += a * x[i];
}

void skin_scalar(const SkinArgs& args) {
  for (std::size_t v = 0; v < args.num_vertices; ++v) {
    detail::skin_one_vertex(args, v);
  }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double sum_norms3_scalar(const double* d, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = d + 3 * i;
    sum += std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  }
  return sum;
}

}  // namespace

namespace detail {
const KernelTable& scalar_table() {
  static const KernelTable table{Isa::kScalar, axpy_scalar, skin_scalar,
                                 dot_scalar, sum_norms3_scalar};
  return table;
}
}  // namespace detail

}  // namespace duet::simd
