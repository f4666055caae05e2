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

#include "duet/root_opt.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "duet/contact.hpp"
#include "duet/errors.hpp"
#include "duet/fixtures.hpp"
#include "duet/rotation.hpp"

namespace duet {
namespace {

using fixtures::Rng;

constexpr double kDeg = std::numbers::pi / 180.0;

Eigen::MatrixX3d zero_pivots(int frames) { return Eigen::MatrixX3d::Zero(frames, 3); }

HumanMotion random_motion(const BodyTemplate& body, Rng& rng, int frames) {
  HumanMotion m;
  m.beta = Eigen::VectorXd::Zero(body.num_shapes());
  m.theta.resize(frames, 3 * body.num_body_joints());
  m.root_translation.resize(frames, 3);
  m.root_rotation.resize(frames, 3);
  for (Eigen::Index i = 0; i < m.theta.size(); ++i) m.theta.data()[i] = rng.uniform(-0.3, 0.3);
  for (Eigen::Index i = 0; i < m.root_translation.size(); ++i) {
    m.root_translation.data()[i] = rng.uniform(-1, 1);
    m.root_rotation.data()[i] = rng.uniform(-0.8, 0.8);
  }
  return m;
}

TEST(ContactCentroids, EmptyContactsGiveNoPairs) {
  const BodyTemplate& body = fixtures::synthetic_body();
  const auto fx = fixtures::generate_fixture(body, {}, 1);
  ContactSet empty;
  empty.per_frame.resize(fx.a.num_frames());
  EXPECT_TRUE(contact_centroids(body, fx.a.beta, fx.a, fx.b, empty).empty());
  ContactSet short_set;
  short_set.per_frame.resize(3);
  EXPECT_THROW(contact_centroids(body, fx.a.beta, fx.a, fx.b, short_set), InvalidInput);
}

TEST(ContactCentroids, CentroidIsVertexMean) {
  // A posed mesh with one known face; centroid arithmetic through the
  // transform helper at zero offset.
  const Vec3 c = (Vec3(0, 0, 0) + Vec3(3, 0, 0) + Vec3(0, 3, 0)) / 3.0;
  EXPECT_EQ(c, Vec3(1, 1, 0));
  EXPECT_EQ(transform_centroid(c, Vec3(5, 5, 5), RootOffset{}), c);
}

TEST(ContactCentroids, HandshakeCentroidsLieInsideFaceBoxes) {
  const BodyTemplate& body = fixtures::synthetic_body();
  const auto fx = fixtures::generate_fixture(body, {}, 1);
  const ContactSet cs = detect_sequence(body, fx.a, fx.b, 0.0);
  const Eigen::VectorXd beta = Eigen::VectorXd::Zero(body.num_shapes());
  const auto pairs = contact_centroids(body, beta, fx.a, fx.b, cs);
  ASSERT_EQ(pairs.size(), cs.total_pairs());
  std::size_t k = 0;
  for (std::size_t t = 0; t < cs.num_frames(); ++t) {
    if (cs.per_frame[t].empty()) continue;
    const PosedMesh a = pose_frame(body, beta, fx.a, t);
    const PosedMesh b = pose_frame(body, beta, fx.b, t);
    for (const ContactPair& p : cs.per_frame[t]) {
      const CentroidPair& cp = pairs[k++];
      EXPECT_EQ(cp.frame, int(t));
      Aabb box;
      for (int c = 0; c < 3; ++c) {
        box.extend(Vec3(a.vertices.row(body.faces()(p.face_a, c)).transpose()));
        box.extend(Vec3(b.vertices.row(body.faces()(p.face_b, c)).transpose()));
      }
      Aabb points;
      points.extend(cp.c_a);
      points.extend(cp.c_b);
      EXPECT_TRUE(box.contains(points, 1e-12));
    }
  }
}

TEST(OptimizeRootOffset, SinglePairTranslation) {
  const std::vector<CentroidPair> pairs = {{0, Vec3(0, 0, 0), Vec3(1, 0, 0)}};
  const RootOptResult r =
      optimize_root_offset(pairs, zero_pivots(1), RootOptMode::kTranslationOnly);
  EXPECT_EQ(r.offset.delta_p, Vec3(1, 0, 0));
  EXPECT_EQ(r.offset.delta_theta, Vec3::Zero());
  EXPECT_EQ(r.final_objective, 0.0);
  EXPECT_EQ(r.initial_objective, 1.0);
}

TEST(OptimizeRootOffset, CommonOffsetTranslation) {
  const std::vector<CentroidPair> pairs = {{0, Vec3(0, 0, 0), Vec3(1, 0, 0)},
                                           {0, Vec3(0, 1, 0), Vec3(1, 1, 0)}};
  const RootOptResult r =
      optimize_root_offset(pairs, zero_pivots(1), RootOptMode::kTranslationOnly);
  EXPECT_EQ(r.offset.delta_p, Vec3(1, 0, 0));
}

TEST(OptimizeRootOffset, EmptyPairsHaveNoContact) {
  EXPECT_THROW(optimize_root_offset({}, zero_pivots(1), RootOptMode::kFull), NoContact);
  EXPECT_THROW(optimize_root_offset({}, zero_pivots(1), RootOptMode::kTranslationOnly),
               NoContact);
}

TEST(OptimizeRootOffset, RejectsFrameWithoutPivot) {
  const std::vector<CentroidPair> pairs = {{4, Vec3::Zero(), Vec3::UnitX()}};
  EXPECT_THROW(optimize_root_offset(pairs, zero_pivots(2), RootOptMode::kTranslationOnly),
               InvalidInput);
}

TEST(OptimizeRootOffset, TranslationObjectiveIsResidualSpread) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto fx = fixtures::random_centroid_pairs(rng, 6, 5);
    const RootOptResult r =
        optimize_root_offset(fx.pairs, fx.pivots, RootOptMode::kTranslationOnly);
    Vec3 mean = Vec3::Zero();
    for (const auto& p : fx.pairs) mean += p.c_b - p.c_a;
    mean /= double(fx.pairs.size());
    double spread = 0.0;
    for (const auto& p : fx.pairs) spread += ((p.c_b - p.c_a) - mean).squaredNorm();
    EXPECT_LE((r.offset.delta_p - mean).norm(), 1e-12);
    EXPECT_NEAR(r.final_objective, spread, 1e-10);
  }
}

TEST(OptimizeRootOffset, FullModeRecoversRotatedFixture) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto fx = fixtures::rotated_contact_fixture(seed);
    const RootOptResult r = optimize_root_offset(fx.pairs, fx.pivots, RootOptMode::kFull);
    const double angle = geodesic_angle(quat_from_rotvec(r.offset.delta_theta),
                                        quat_from_rotvec(fx.truth.delta_theta));
    EXPECT_LE(angle, 0.1 * kDeg) << "seed " << seed;
    EXPECT_LE((r.offset.delta_p - fx.truth.delta_p).norm(), 1e-3) << "seed " << seed;
    EXPECT_LE(r.final_objective, 1e-6) << "seed " << seed;
    EXPECT_LE(r.final_objective, r.initial_objective);
    EXPECT_LT(r.offset.delta_theta.norm(), std::numbers::pi);
  }
}

TEST(OptimizeRootOffset, FullModeNeverWorseThanZero) {
  Rng rng(44);
  for (int trial = 0; trial < 10; ++trial) {
    const auto fx = fixtures::random_centroid_pairs(rng, 4, 3);
    const RootOptResult r = optimize_root_offset(fx.pairs, fx.pivots, RootOptMode::kFull);
    EXPECT_LE(r.final_objective, r.initial_objective);
    const RootOptResult t =
        optimize_root_offset(fx.pairs, fx.pivots, RootOptMode::kTranslationOnly);
    EXPECT_LE(r.final_objective, t.final_objective + 1e-9);
  }
}

TEST(ApplyRootOffset, ZeroOffsetIsIdentity) {
  Rng rng(2);
  const HumanMotion m = random_motion(fixtures::synthetic_body(), rng, 5);
  for (auto mode : {RootComposition::kAdditive, RootComposition::kRotational}) {
    const HumanMotion out = apply_root_offset(m, RootOffset{}, mode);
    EXPECT_EQ(out.root_translation, m.root_translation);
    EXPECT_EQ(out.root_rotation, m.root_rotation);
    EXPECT_EQ(out.theta, m.theta);
  }
}

TEST(ApplyRootOffset, AdditiveShiftsEveryFrame) {
  Rng rng(3);
  const HumanMotion m = random_motion(fixtures::synthetic_body(), rng, 5);
  const HumanMotion out =
      apply_root_offset(m, {Vec3(1, 2, 3), Vec3::Zero()}, RootComposition::kAdditive);
  for (Eigen::Index t = 0; t < 5; ++t) {
    EXPECT_EQ(out.root_translation.row(t), m.root_translation.row(t) + Eigen::RowVector3d(1, 2, 3));
  }
}

TEST(ApplyRootOffset, AdditiveInverseRestoresDyadicMotion) {
  Rng rng(4);
  HumanMotion m = random_motion(fixtures::synthetic_body(), rng, 4);
  // Quantize to multiples of 2^-10 so both additions are exact.
  m.root_translation = (m.root_translation * 1024.0).array().round() / 1024.0;
  m.root_rotation = (m.root_rotation * 1024.0).array().round() / 1024.0;
  const RootOffset fwd{Vec3(0.25, -0.5, 0.125), Vec3(0.0625, 0.03125, -0.25)};
  const RootOffset back{-fwd.delta_p, -fwd.delta_theta};
  const HumanMotion round = apply_root_offset(
      apply_root_offset(m, fwd, RootComposition::kAdditive), back, RootComposition::kAdditive);
  EXPECT_EQ(round.root_translation, m.root_translation);
  EXPECT_EQ(round.root_rotation, m.root_rotation);
}

TEST(ApplyRootOffset, AdditiveInverseWithinRoundingForArbitraryMotion) {
  Rng rng(5);
  const HumanMotion m = random_motion(fixtures::synthetic_body(), rng, 6);
  const RootOffset fwd{Vec3(0.31, -0.72, 0.05), Vec3(0.2, -0.1, 0.3)};
  const HumanMotion round =
      apply_root_offset(apply_root_offset(m, fwd, RootComposition::kAdditive),
                        {-fwd.delta_p, -fwd.delta_theta}, RootComposition::kAdditive);
  EXPECT_LE((round.root_translation - m.root_translation).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((round.root_rotation - m.root_rotation).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ApplyRootOffset, RotationalComposesQuaternions) {
  Rng seed_rng(6);
  HumanMotion m = random_motion(fixtures::synthetic_body(), seed_rng, 3);
  m.root_rotation.setZero();
  const Vec3 dtheta(0, 0, std::numbers::pi / 2);
  const HumanMotion out =
      apply_root_offset(m, {Vec3::Zero(), dtheta}, RootComposition::kRotational);
  for (Eigen::Index t = 0; t < 3; ++t) {
    EXPECT_LE((out.root_rotation.row(t).transpose() - dtheta).norm(), 1e-12);
  }

  // General case against an explicit quaternion product.
  Rng rng(7);
  const HumanMotion g = random_motion(fixtures::synthetic_body(), rng, 8);
  const Vec3 d(0.4, -0.3, 0.9);
  const HumanMotion go = apply_root_offset(g, {Vec3::Zero(), d}, RootComposition::kRotational);
  for (Eigen::Index t = 0; t < 8; ++t) {
    const Eigen::Quaterniond want =
        Eigen::Quaterniond(Eigen::AngleAxisd(d.norm(), d.normalized())) *
        quat_from_rotvec(g.root_rotation.row(t).transpose());
    EXPECT_LE(geodesic_angle(quat_from_rotvec(go.root_rotation.row(t).transpose()), want),
              1e-12);
  }
}

// The offset applied to the motion moves posed face centroids exactly as
// the objective models them.
TEST(ApplyRootOffset, RotationalMatchesCentroidModel) {
  const BodyTemplate& body = fixtures::synthetic_body();
  Rng rng(8);
  const HumanMotion m = random_motion(body, rng, 4);
  Eigen::VectorXd beta(body.num_shapes());
  for (Eigen::Index i = 0; i < beta.size(); ++i) beta[i] = rng.uniform(-1, 1);
  const RootOffset off{Vec3(0.1, -0.2, 0.05), Vec3(0.3, 0.2, -0.4)};
  const HumanMotion moved = apply_root_offset(m, off, RootComposition::kRotational);
  const Eigen::MatrixX3d pivots = root_pivots(body, beta, m);
  for (std::size_t t = 0; t < 4; ++t) {
    const PosedMesh before = pose_frame(body, beta, m, t);
    const PosedMesh after = pose_frame(body, beta, moved, t);
    for (int v = 0; v < int(body.num_vertices()); v += 37) {
      const Vec3 want =
          transform_centroid(before.vertices.row(v).transpose(), pivots.row(t).transpose(), off);
      EXPECT_LE((after.vertices.row(v).transpose() - want).norm(), 1e-9);
    }
  }
}

}  // namespace
}  // namespace duet
