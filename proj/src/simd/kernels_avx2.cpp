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

// Compiled with -mavx2 only (no -mfma) so every multiply and add rounds
// exactly as in the scalar reference.

#include <immintrin.h>

#include <cmath>

#include "duet/simd/kernels.hpp"
#include "kernels_scalar_inl.hpp"

namespace duet::simd {
namespace {

void axpy_avx2(double a, const double* x, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vo = _mm256_loadu_pd(out + i);
    _mm256_storeu_pd(out + i, _mm256_add_pd(vo, _mm256_mul_pd(va, vx)));
  }
  for (; i < n; ++i) out[i] += a * x[i];
}

void skin_avx2(const SkinArgs& args) {
  const std::size_t nv = args.num_vertices;
  std::size_t v = 0;
  for (; v + 4 <= nv; v += 4) {
    __m256d m[12];
    for (auto& r : m) r = _mm256_setzero_pd();
    for (std::size_t j = 0; j < args.num_joints; ++j) {
      const __m256d w = _mm256_loadu_pd(args.weights_t + j * nv + v);
      const double* t = args.transforms + 12 * j;
      for (int e = 0; e < 12; ++e) {
        m[e] = _mm256_add_pd(m[e], _mm256_mul_pd(w, _mm256_set1_pd(t[e])));
      }
    }
    const __m256d x = _mm256_loadu_pd(args.x + v);
    const __m256d y = _mm256_loadu_pd(args.y + v);
    const __m256d z = _mm256_loadu_pd(args.z + v);
    double* outs[3] = {args.out_x, args.out_y, args.out_z};
    for (int r = 0; r < 3; ++r) {
      __m256d acc = _mm256_mul_pd(m[4 * r + 0], x);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(m[4 * r + 1], y));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(m[4 * r + 2], z));
      acc = _mm256_add_pd(acc, m[4 * r + 3]);
      _mm256_storeu_pd(outs[r] + v, acc);
    }
  }
  for (; v < nv; ++v) detail::skin_one_vertex(args, v);
}

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(
        acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double sum_norms3_avx2(const double* d, std::size_t n) {
  const __m256i idx = _mm256_setr_epi64x(0, 3, 6, 9);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double* p = d + 3 * i;
    const __m256d x = _mm256_i64gather_pd(p, idx, 8);
    const __m256d y = _mm256_i64gather_pd(p + 1, idx, 8);
    const __m256d z = _mm256_i64gather_pd(p + 2, idx, 8);
    __m256d sq = _mm256_mul_pd(x, x);
    sq = _mm256_add_pd(sq, _mm256_mul_pd(y, y));
    sq = _mm256_add_pd(sq, _mm256_mul_pd(z, z));
    acc = _mm256_add_pd(acc, _mm256_sqrt_pd(sq));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) {
    const double* p = d + 3 * i;
    sum += std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  }
  return sum;
}

}  // namespace

namespace detail {
const KernelTable& avx2_table() {
  static const KernelTable table{Isa::kAvx2, axpy_avx2, skin_avx2, dot_avx2,
                                 sum_norms3_avx2};
  return table;
}
}  // namespace detail

}  // namespace duet::simd
