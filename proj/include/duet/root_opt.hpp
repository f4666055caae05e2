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

#ifndef DUET_ROOT_OPT_HPP_
#define DUET_ROOT_OPT_HPP_

#include <span>
#include <vector>

#include <Eigen/Core>

#include "duet/body_model.hpp"
#include "duet/contact.hpp"

namespace duet {

// Constant root correction for agent 1 over a whole clip.
struct RootOffset {
  Vec3 delta_p = Vec3::Zero();
  Vec3 delta_theta = Vec3::Zero();  // axis-angle, norm < pi
};

struct CentroidPair {
  int frame = 0;
  Vec3 c_a = Vec3::Zero();
  Vec3 c_b = Vec3::Zero();
};

enum class RootOptMode { kTranslationOnly, kFull };
enum class RootComposition { kAdditive, kRotational };

struct RootOptResult {
  RootOffset offset;
  double initial_objective = 0.0;  // at the zero offset
  double final_objective = 0.0;
  int iterations = 0;
};

// Centroids of every contact face pair, on bodies shaped by beta_prime.
std::vector<CentroidPair> contact_centroids(const BodyTemplate& body,
                                            const Eigen::VectorXd& beta_prime,
                                            const HumanMotion& motion_a,
                                            const HumanMotion& motion_b,
                                            const ContactSet& contacts);

// Agent-1 root joint world position per frame, the rotation pivot.
Eigen::MatrixX3d root_pivots(const BodyTemplate& body,
                             const Eigen::VectorXd& beta_prime,
                             const HumanMotion& motion);

// c_a moved by the offset about its frame's pivot.
Vec3 transform_centroid(const Vec3& c_a, const Vec3& pivot, const RootOffset& offset);

// sum over pairs of |transform(c_a) - c_b|^2
double root_objective(std::span<const CentroidPair> pairs,
                      const Eigen::MatrixX3d& pivots, const RootOffset& offset);

// Mean |transform(c_a) - c_b| over pairs.
double mean_centroid_gap(std::span<const CentroidPair> pairs,
                         const Eigen::MatrixX3d& pivots, const RootOffset& offset);

// Throws NoContact when pairs is empty.
RootOptResult optimize_root_offset(std::span<const CentroidPair> pairs,
                                   const Eigen::MatrixX3d& pivots, RootOptMode mode);

HumanMotion apply_root_offset(const HumanMotion& motion, const RootOffset& offset,
                              RootComposition composition);

}  // namespace duet

#endif  // DUET_ROOT_OPT_HPP_
