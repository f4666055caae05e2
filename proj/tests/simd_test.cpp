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

// The vector kernels must reproduce the scalar reference: bit-for-bit on
// elementwise paths (axpy, skinning), to rounding on reductions.

#include "duet/simd/kernels.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "duet/fixtures.hpp"

namespace duet::simd {
namespace {

using fixtures::Rng;

std::vector<double> random_vector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-10, 10);
  return v;
}

class SimdEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!isa_available(Isa::kAvx2)) GTEST_SKIP() << "AVX2 not available on this host";
  }
  const KernelTable& scalar_ = kernels_for(Isa::kScalar);
  const KernelTable& vec() const { return kernels_for(Isa::kAvx2); }
};

TEST(SimdDispatch, ScalarAlwaysAvailable) {
  EXPECT_TRUE(isa_available(Isa::kScalar));
  EXPECT_EQ(kernels_for(Isa::kScalar).isa, Isa::kScalar);
  EXPECT_EQ(isa_name(Isa::kScalar), "scalar");
  EXPECT_EQ(isa_name(Isa::kAvx2), "avx2");
  if (!isa_available(Isa::kAvx2)) {
    EXPECT_THROW(kernels_for(Isa::kAvx2), std::invalid_argument);
  }
}

TEST(SimdDispatch, ScalarReferenceValues) {
  const KernelTable& k = kernels_for(Isa::kScalar);
  std::vector<double> out = {1, 2, 3};
  const std::vector<double> x = {1, 1, 2};
  k.axpy(2.0, x.data(), out.data(), 3);
  EXPECT_EQ(out, (std::vector<double>{3, 4, 7}));
  EXPECT_EQ(k.dot(x.data(), out.data(), 3), 3 + 4 + 14);
  const std::vector<double> d = {3, 4, 0, 0, 0, 2};
  EXPECT_EQ(k.sum_norms3(d.data(), 2), 7.0);
}

TEST_F(SimdEquivalence, AxpyIsBitExact) {
  Rng rng(1);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u, 1001u}) {
    const std::vector<double> x = random_vector(rng, n);
    std::vector<double> a = random_vector(rng, n);
    std::vector<double> b = a;
    scalar_.axpy(0.37, x.data(), a.data(), n);
    vec().axpy(0.37, x.data(), b.data(), n);
    EXPECT_EQ(a, b) << "n = " << n;
  }
}

TEST_F(SimdEquivalence, DotAgreesToRounding) {
  Rng rng(2);
  for (std::size_t n : {0u, 1u, 7u, 8u, 33u, 1000u}) {
    const std::vector<double> x = random_vector(rng, n), y = random_vector(rng, n);
    const double s = scalar_.dot(x.data(), y.data(), n);
    const double v = vec().dot(x.data(), y.data(), n);
    double mag = 0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y[i]);
    EXPECT_LE(std::abs(s - v), 1e-14 * std::max(1.0, mag)) << "n = " << n;
  }
}

TEST_F(SimdEquivalence, SumNorms3AgreesToRounding) {
  Rng rng(3);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 250u}) {
    const std::vector<double> d = random_vector(rng, 3 * n);
    const double s = scalar_.sum_norms3(d.data(), n);
    const double v = vec().sum_norms3(d.data(), n);
    EXPECT_LE(std::abs(s - v), 1e-13 * std::max(1.0, s)) << "n = " << n;
  }
}

TEST_F(SimdEquivalence, SkinningIsBitExact) {
  const BodyTemplate& body = fixtures::synthetic_body();
  Rng rng(4);
  const std::size_t nv = body.num_vertices(), nj = body.num_joints();
  std::vector<double> transforms(12 * nj);
  for (double& t : transforms) t = rng.uniform(-1, 1);
  const std::vector<double>& soa = body.soa_vertices();
  std::vector<double> out_s(3 * nv), out_v(3 * nv);
  SkinArgs args;
  args.num_vertices = nv;
  args.num_joints = nj;
  args.x = soa.data();
  args.y = soa.data() + nv;
  args.z = soa.data() + 2 * nv;
  args.weights_t = body.weights_joint_major().data();
  args.transforms = transforms.data();
  args.out_x = out_s.data();
  args.out_y = out_s.data() + nv;
  args.out_z = out_s.data() + 2 * nv;
  scalar_.skin(args);
  args.out_x = out_v.data();
  args.out_y = out_v.data() + nv;
  args.out_z = out_v.data() + 2 * nv;
  vec().skin(args);
  EXPECT_EQ(out_s, out_v);
}

TEST_F(SimdEquivalence, SkinningHandlesRaggedCounts) {
  Rng rng(5);
  for (std::size_t nv : {1u, 3u, 5u, 6u, 7u}) {
    const std::size_t nj = 3;
    std::vector<double> xyz = random_vector(rng, 3 * nv);
    std::vector<double> w(nj * nv);
    for (std::size_t v = 0; v < nv; ++v) {
      double sum = 0;
      for (std::size_t j = 0; j < nj; ++j) sum += (w[j * nv + v] = rng.uniform(0, 1));
      for (std::size_t j = 0; j < nj; ++j) w[j * nv + v] /= sum;
    }
    std::vector<double> tr = random_vector(rng, 12 * nj);
    std::vector<double> a(3 * nv), b(3 * nv);
    SkinArgs args{nv, nj, xyz.data(), xyz.data() + nv, xyz.data() + 2 * nv, w.data(),
                  tr.data(), a.data(), a.data() + nv, a.data() + 2 * nv};
    scalar_.skin(args);
    args.out_x = b.data();
    args.out_y = b.data() + nv;
    args.out_z = b.data() + 2 * nv;
    vec().skin(args);
    EXPECT_EQ(a, b) << "nv = " << nv;
  }
}

}  // namespace
}  // namespace duet::simd
