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

#ifndef DUET_RETARGET_HPP_
#define DUET_RETARGET_HPP_

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "duet/body_model.hpp"
#include "duet/contact.hpp"

namespace duet {

// Robot configuration for one frame.
struct RobotPose {
  Eigen::VectorXd q;
  Vec3 root_position = Vec3::Zero();
  Vec3 root_rotation = Vec3::Zero();  // axis-angle
};

struct RetargetSettings {
  int max_iters = 100;
  double initial_damping = 1e-3;
  double step_tolerance = 1e-12;
};

struct RetargetFrameResult {
  RobotPose pose;
  double cost = 0.0;  // sum of squared keypoint residuals
  int iterations = 0;
  bool diverged = false;
};

// Minimizes sum_k |FK(q)_link(k) - human_k|^2 over root pose and joint
// angles, clamped to the joint limits, starting from `previous`. On
// divergence the previous pose is returned with the flag set.
RetargetFrameResult retarget_frame(const RobotModel& robot, const Points& human_keypoints,
                                   const RobotPose& previous,
                                   const RetargetSettings& settings = {});

struct Velocities {
  Eigen::MatrixXd omega;  // T x 3L, rad/s
  Eigen::MatrixXd v;      // T x 3L, m/s
  bool single_frame = false;
};

// Backward differences; frame 0 repeats frame 1. `rotations[t][l]` are link
// orientations. A single frame yields zeros and sets single_frame.
Velocities derive_velocities(const Eigen::MatrixXd& p_hat,
                             const std::vector<std::vector<Quat>>& rotations,
                             double dt);

struct RobotReferenceMotion {
  double dt = 1.0 / 30.0;
  Eigen::MatrixXd theta_hat;         // T x DOF
  Eigen::MatrixX3d root_position;    // T x 3
  Eigen::MatrixX3d root_rotation;    // T x 3, axis-angle
  Eigen::MatrixXi contact_mask;      // T x L, 0/1
  std::vector<int> diverged_frames;

  // Regenerated from the above by complete_reference().
  Eigen::MatrixXd p_hat;      // T x 3L
  Eigen::MatrixXd omega_hat;  // T x 3L
  Eigen::MatrixXd v_hat;      // T x 3L
  std::vector<std::vector<Quat>> link_rotations;

  std::size_t num_frames() const { return theta_hat.rows(); }
  Vec3 link_position(std::size_t t, int link) const {
    return p_hat.block<1, 3>(t, 3 * link).transpose();
  }
};

// Backward-difference joint velocities of theta_hat (T x DOF, rad/s); frame
// 0 repeats frame 1, a single frame gives zeros.
Eigen::MatrixXd joint_velocities(const RobotReferenceMotion& ref);

// Runs forward kinematics per frame and derives velocities.
void complete_reference(const RobotModel& robot, RobotReferenceMotion& ref);

// Per-agent masks (T x L) from the contact set; face labels are the
// majority part label of the face's vertices, ties to the lower label.
std::pair<Eigen::MatrixXi, Eigen::MatrixXi> project_contact_mask(
    const ContactSet& contacts, const BodyTemplate& body, const RobotModel& robot);

// Human keypoints (rows follow robot.keypoint_map) on the shaped body.
Points human_keypoints(const BodyTemplate& body, const RobotModel& robot,
                       const PosedMesh& posed);

// Sequential warm-started retargeting of one agent's motion.
RobotReferenceMotion retarget_motion(const BodyTemplate& body, const RobotModel& robot,
                                     const Eigen::VectorXd& beta_prime,
                                     const HumanMotion& motion,
                                     const Eigen::MatrixXi& contact_mask,
                                     const RetargetSettings& settings = {});

}  // namespace duet

#endif  // DUET_RETARGET_HPP_
