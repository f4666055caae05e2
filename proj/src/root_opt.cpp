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

#include <array>
#include <cmath>

#include "duet/errors.hpp"

namespace duet {
namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

constexpr double kGradientStep = 1e-6;
constexpr int kMaxIters = 1000;
constexpr double kSeedAngle = 0.3;

RootOffset unpack(const Vec6& x) {
  return {x.head<3>(), x.tail<3>()};
}

Vec3 pivot_of(const Eigen::MatrixX3d& pivots, int frame) {
  if (frame < 0 || frame >= pivots.rows()) {
    throw InvalidInput("centroid pair frame " + std::to_string(frame) +
                       " has no pivot");
  }
  return pivots.row(frame).transpose();
}

// Best translation for a fixed rotation: mean residual.
Vec3 best_translation(std::span<const CentroidPair> pairs,
                      const Eigen::MatrixX3d& pivots, const Vec3& delta_theta) {
  const Mat3 r = matrix_from_rotvec(delta_theta);
  Vec3 sum = Vec3::Zero();
  for (const auto& p : pairs) {
    const Vec3 pivot = pivot_of(pivots, p.frame);
    sum += p.c_b - (r * (p.c_a - pivot) + pivot);
  }
  return sum / static_cast<double>(pairs.size());
}

struct Descent {
  Vec6 x;
  double value;
  int iterations;
};

// Steepest descent with central-difference gradients and halving line
// search (Armijo).
Descent descend(std::span<const CentroidPair> pairs, const Eigen::MatrixX3d& pivots,
                Vec6 x) {
  auto f = [&](const Vec6& v) { return root_objective(pairs, pivots, unpack(v)); };
  double fx = f(x);
  double step = 1.0 / static_cast<double>(pairs.size());
  int iter = 0;
  for (; iter < kMaxIters; ++iter) {
    Vec6 g;
    for (int i = 0; i < 6; ++i) {
      Vec6 hi = x, lo = x;
      hi[i] += kGradientStep;
      lo[i] -= kGradientStep;
      g[i] = (f(hi) - f(lo)) / (2.0 * kGradientStep);
    }
    const double g2 = g.squaredNorm();
    if (!(g2 > 1e-30)) break;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      const Vec6 candidate = x - step * g;
      const double fc = f(candidate);
      if (fc <= fx - 1e-4 * step * g2) {
        x = candidate;
        fx = fc;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    step *= 2.0;
  }
  return {x, fx, iter};
}

}  // namespace

std::vector<CentroidPair> contact_centroids(const BodyTemplate& body,
                                            const Eigen::VectorXd& beta_prime,
                                            const HumanMotion& motion_a,
                                            const HumanMotion& motion_b,
                                            const ContactSet& contacts) {
  if (contacts.num_frames() != motion_a.num_frames() ||
      contacts.num_frames() != motion_b.num_frames()) {
    throw InvalidInput("contact set and motions have different lengths");
  }
  const Faces& faces = body.faces();
  auto centroid = [&](const PosedMesh& m, int f) {
    Vec3 c = Vec3::Zero();
    for (int k = 0; k < 3; ++k) c += m.vertices.row(faces(f, k)).transpose();
    return Vec3(c / 3.0);
  };
  std::vector<CentroidPair> out;
  for (std::size_t t = 0; t < contacts.num_frames(); ++t) {
    const auto& frame = contacts.per_frame[t];
    if (frame.empty()) continue;
    const PosedMesh a = pose_frame(body, beta_prime, motion_a, t);
    const PosedMesh b = pose_frame(body, beta_prime, motion_b, t);
    for (const ContactPair& p : frame) {
      out.push_back({static_cast<int>(t), centroid(a, p.face_a), centroid(b, p.face_b)});
    }
  }
  return out;
}

Eigen::MatrixX3d root_pivots(const BodyTemplate& body,
                             const Eigen::VectorXd& beta_prime,
                             const HumanMotion& motion) {
  const Vec3 root = rest_joints(body, beta_prime).row(0).transpose();
  Eigen::MatrixX3d pivots = motion.root_translation;
  pivots.rowwise() += root.transpose();
  return pivots;
}

Vec3 transform_centroid(const Vec3& c_a, const Vec3& pivot, const RootOffset& offset) {
  return quat_from_rotvec(offset.delta_theta) * (c_a - pivot) + pivot + offset.delta_p;
}

double root_objective(std::span<const CentroidPair> pairs,
                      const Eigen::MatrixX3d& pivots, const RootOffset& offset) {
  const Mat3 r = matrix_from_rotvec(offset.delta_theta);
  double sum = 0.0;
  for (const auto& p : pairs) {
    const Vec3 pivot = pivot_of(pivots, p.frame);
    sum += (r * (p.c_a - pivot) + pivot + offset.delta_p - p.c_b).squaredNorm();
  }
  return sum;
}

double mean_centroid_gap(std::span<const CentroidPair> pairs,
                         const Eigen::MatrixX3d& pivots, const RootOffset& offset) {
  if (pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : pairs) {
    sum += (transform_centroid(p.c_a, pivot_of(pivots, p.frame), offset) - p.c_b).norm();
  }
  return sum / static_cast<double>(pairs.size());
}

RootOptResult optimize_root_offset(std::span<const CentroidPair> pairs,
                                   const Eigen::MatrixX3d& pivots, RootOptMode mode) {
  if (pairs.empty()) throw NoContact("no contact pairs: root offset is undefined");
  RootOptResult result;
  result.initial_objective = root_objective(pairs, pivots, RootOffset{});

  if (mode == RootOptMode::kTranslationOnly) {
    result.offset.delta_p = best_translation(pairs, pivots, Vec3::Zero());
    result.final_objective = root_objective(pairs, pivots, result.offset);
    return result;
  }

  // Zero seed plus one seed per octant of rotation space.
  std::vector<Vec3> seeds{Vec3::Zero()};
  for (int s = 0; s < 8; ++s) {
    seeds.emplace_back((s & 1 ? 1.0 : -1.0) * kSeedAngle,
                       (s & 2 ? 1.0 : -1.0) * kSeedAngle,
                       (s & 4 ? 1.0 : -1.0) * kSeedAngle);
  }
  bool have = false;
  Descent best{};
  for (const Vec3& seed : seeds) {
    Vec6 x;
    x.head<3>() = best_translation(pairs, pivots, seed);
    x.tail<3>() = seed;
    const Descent d = descend(pairs, pivots, x);
    result.iterations += d.iterations;
    if (!have || d.value < best.value) {
      best = d;
      have = true;
    }
  }
  result.offset = unpack(best.x);
  result.offset.delta_theta = principal_rotvec(result.offset.delta_theta);
  result.final_objective = root_objective(pairs, pivots, result.offset);
  if (!(result.final_objective <= result.initial_objective)) {
    result.offset = RootOffset{};
    result.final_objective = result.initial_objective;
  }
  return result;
}

HumanMotion apply_root_offset(const HumanMotion& motion, const RootOffset& offset,
                              RootComposition composition) {
  HumanMotion out = motion;
  const Quat dq = quat_from_rotvec(offset.delta_theta);
  for (Eigen::Index t = 0; t < motion.root_translation.rows(); ++t) {
    out.root_translation.row(t) += offset.delta_p.transpose();
    if (composition == RootComposition::kAdditive) {
      out.root_rotation.row(t) += offset.delta_theta.transpose();
    } else if (!offset.delta_theta.isZero(0.0)) {
      const Quat q = dq * quat_from_rotvec(motion.root_rotation.row(t).transpose());
      out.root_rotation.row(t) = rotvec_from_quat(q).transpose();
    }
  }
  return out;
}

}  // namespace duet
