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

#include "duet/retarget.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <map>
#include <string>

#include <Eigen/Cholesky>

#include "duet/errors.hpp"
#include "duet/root_opt.hpp"

namespace duet {
namespace {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

// ancestors[l]: links whose joint moves link l (including l itself).
std::vector<std::vector<int>> moving_joints(const RobotModel& robot) {
  std::vector<std::vector<int>> out(robot.num_links());
  for (std::size_t l = 0; l < robot.num_links(); ++l) {
    for (int a = static_cast<int>(l); a > 0; a = robot.links[a].parent) {
      if (robot.links[a].dof >= 0) out[l].push_back(a);
    }
  }
  return out;
}

struct Evaluation {
  Eigen::VectorXd residual;
  FkResult fk;
};

Evaluation evaluate(const RobotModel& robot, const Points& targets,
                    const RobotPose& pose) {
  Evaluation e;
  e.fk = forward_kinematics(robot, pose.q, pose.root_position, pose.root_rotation);
  const std::size_t k = robot.keypoint_map.size();
  e.residual.resize(3 * k);
  for (std::size_t i = 0; i < k; ++i) {
    e.residual.segment<3>(3 * i) =
        e.fk.positions[robot.keypoint_map[i].robot_link] - targets.row(i).transpose();
  }
  return e;
}

}  // namespace

RetargetFrameResult retarget_frame(const RobotModel& robot, const Points& human_keypoints,
                                   const RobotPose& previous,
                                   const RetargetSettings& settings) {
  const std::size_t k = robot.keypoint_map.size();
  const std::size_t ndof = robot.num_dofs();
  if (human_keypoints.rows() != static_cast<Eigen::Index>(k)) {
    throw InvalidInput("expected one human keypoint per keypoint_map entry");
  }
  if (previous.q.size() != static_cast<Eigen::Index>(ndof)) {
    throw InvalidInput("previous solution has wrong joint count");
  }
  const auto movers = moving_joints(robot);
  const Eigen::Index np = 6 + static_cast<Eigen::Index>(ndof);

  RetargetFrameResult result;
  RobotPose pose = previous;
  for (std::size_t d = 0; d < ndof; ++d) {
    pose.q[d] = std::clamp(pose.q[d], robot.joint_limits[d].first,
                           robot.joint_limits[d].second);
  }
  Evaluation cur = evaluate(robot, human_keypoints, pose);
  double cost = cur.residual.squaredNorm();
  double damping = settings.initial_damping;

  for (int iter = 0; iter < settings.max_iters; ++iter) {
    result.iterations = iter + 1;
    // Jacobian: root translation, world-frame root rotation increment, joints.
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(3 * k, np);
    const Vec3& root = cur.fk.positions[0];
    for (std::size_t i = 0; i < k; ++i) {
      const int link = robot.keypoint_map[i].robot_link;
      const Vec3& p = cur.fk.positions[link];
      jac.block<3, 3>(3 * i, 0).setIdentity();
      jac.block<3, 3>(3 * i, 3) = -skew(p - root);
      for (int a : movers[link]) {
        const Vec3 axis = cur.fk.orientations[a] * robot.links[a].axis;
        jac.block<3, 1>(3 * i, 6 + robot.links[a].dof) =
            axis.cross(p - cur.fk.positions[a]);
      }
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * cur.residual;

    bool improved = false;
    double step_norm = 0.0;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::MatrixXd a = jtj;
      a.diagonal().array() += damping * (1.0 + jtj.diagonal().array());
      const Eigen::VectorXd delta = a.ldlt().solve(-jtr);
      if (!delta.allFinite()) break;
      RobotPose cand = pose;
      cand.root_position += delta.head<3>();
      cand.root_rotation = rotvec_from_quat(quat_from_rotvec(delta.segment<3>(3)) *
                                            quat_from_rotvec(pose.root_rotation));
      for (std::size_t d = 0; d < ndof; ++d) {
        cand.q[d] = std::clamp(pose.q[d] + delta[6 + d], robot.joint_limits[d].first,
                               robot.joint_limits[d].second);
      }
      Evaluation next = evaluate(robot, human_keypoints, cand);
      const double next_cost = next.residual.squaredNorm();
      if (std::isfinite(next_cost) && next_cost < cost) {
        step_norm = delta.norm();
        pose = cand;
        cur = std::move(next);
        cost = next_cost;
        damping = std::max(damping / 3.0, 1e-12);
        improved = true;
        break;
      }
      damping *= 4.0;
    }
    if (!improved || step_norm < settings.step_tolerance) break;
  }

  if (!std::isfinite(cost) || !pose.q.allFinite()) {
    result.pose = previous;
    result.diverged = true;
    result.cost = std::numeric_limits<double>::infinity();
    return result;
  }
  result.pose = pose;
  result.cost = cost;
  return result;
}

Velocities derive_velocities(const Eigen::MatrixXd& p_hat,
                             const std::vector<std::vector<Quat>>& rotations,
                             double dt) {
  if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
  const Eigen::Index t_count = p_hat.rows();
  if (static_cast<Eigen::Index>(rotations.size()) != t_count) {
    throw InvalidInput("rotations must have one entry per frame");
  }
  Velocities out;
  out.v = Eigen::MatrixXd::Zero(t_count, p_hat.cols());
  out.omega = Eigen::MatrixXd::Zero(t_count, p_hat.cols());
  if (t_count < 2) {
    out.single_frame = true;
    return out;
  }
  const Eigen::Index nl = p_hat.cols() / 3;
  for (Eigen::Index t = 1; t < t_count; ++t) {
    out.v.row(t) = (p_hat.row(t) - p_hat.row(t - 1)) / dt;
    for (Eigen::Index l = 0; l < nl; ++l) {
      const Quat rel = rotations[t - 1][l].conjugate() * rotations[t][l];
      out.omega.block<1, 3>(t, 3 * l) = rotvec_from_quat(rel).transpose() / dt;
    }
  }
  out.v.row(0) = out.v.row(1);
  out.omega.row(0) = out.omega.row(1);
  return out;
}

Eigen::MatrixXd joint_velocities(const RobotReferenceMotion& ref) {
  const Eigen::Index t_count = ref.theta_hat.rows();
  Eigen::MatrixXd qd = Eigen::MatrixXd::Zero(t_count, ref.theta_hat.cols());
  if (t_count < 2) return qd;
  for (Eigen::Index t = 1; t < t_count; ++t) {
    qd.row(t) = (ref.theta_hat.row(t) - ref.theta_hat.row(t - 1)) / ref.dt;
  }
  qd.row(0) = qd.row(1);
  return qd;
}

void complete_reference(const RobotModel& robot, RobotReferenceMotion& ref) {
  const std::size_t t_count = ref.num_frames();
  const std::size_t nl = robot.num_links();
  if (ref.theta_hat.cols() != static_cast<Eigen::Index>(robot.num_dofs())) {
    throw InvalidInput("reference motion has wrong joint count for this robot");
  }
  if (static_cast<std::size_t>(ref.root_position.rows()) != t_count ||
      static_cast<std::size_t>(ref.root_rotation.rows()) != t_count) {
    throw InvalidInput("reference root arrays must have one row per frame");
  }
  if (ref.contact_mask.size() == 0) {
    ref.contact_mask = Eigen::MatrixXi::Zero(t_count, nl);
  }
  if (static_cast<std::size_t>(ref.contact_mask.rows()) != t_count ||
      static_cast<std::size_t>(ref.contact_mask.cols()) != nl) {
    throw InvalidInput("contact mask must be T x L");
  }
  ref.p_hat.resize(t_count, 3 * nl);
  ref.link_rotations.assign(t_count, {});
  for (std::size_t t = 0; t < t_count; ++t) {
    const FkResult fk =
        forward_kinematics(robot, ref.theta_hat.row(t).transpose(),
                           ref.root_position.row(t).transpose(),
                           ref.root_rotation.row(t).transpose());
    for (std::size_t l = 0; l < nl; ++l) {
      ref.p_hat.block<1, 3>(t, 3 * l) = fk.positions[l].transpose();
    }
    ref.link_rotations[t] = fk.orientations;
  }
  const Velocities vel = derive_velocities(ref.p_hat, ref.link_rotations, ref.dt);
  ref.omega_hat = vel.omega;
  ref.v_hat = vel.v;
}

std::pair<Eigen::MatrixXi, Eigen::MatrixXi> project_contact_mask(
    const ContactSet& contacts, const BodyTemplate& body, const RobotModel& robot) {
  if (robot.part_labels.size() != body.num_vertices()) {
    throw ConfigError("part_labels must have one entry per template vertex");
  }
  const Faces& faces = body.faces();
  auto face_link = [&](int f) {
    std::array<int, 3> labels;
    for (int k = 0; k < 3; ++k) labels[k] = robot.part_labels[faces(f, k)];
    int part = labels[0];
    int best_votes = 0;
    for (int candidate : labels) {
      const int votes = static_cast<int>(std::count(labels.begin(), labels.end(), candidate));
      if (votes > best_votes || (votes == best_votes && candidate < part)) {
        part = candidate;
        best_votes = votes;
      }
    }
    const auto it = robot.part_to_link.find(part);
    if (it == robot.part_to_link.end()) {
      throw ConfigError("body part " + std::to_string(part) + " is not mapped to a robot link");
    }
    return it->second;
  };
  const Eigen::Index t_count = static_cast<Eigen::Index>(contacts.num_frames());
  const Eigen::Index nl = static_cast<Eigen::Index>(robot.num_links());
  Eigen::MatrixXi mask_a = Eigen::MatrixXi::Zero(t_count, nl);
  Eigen::MatrixXi mask_b = Eigen::MatrixXi::Zero(t_count, nl);
  for (Eigen::Index t = 0; t < t_count; ++t) {
    for (const ContactPair& p : contacts.per_frame[t]) {
      mask_a(t, face_link(p.face_a)) = 1;
      mask_b(t, face_link(p.face_b)) = 1;
    }
  }
  return {mask_a, mask_b};
}

Points human_keypoints(const BodyTemplate& body, const RobotModel& robot,
                       const PosedMesh& posed) {
  const Points joints = joint_positions(body, posed);
  Points out(robot.keypoint_map.size(), 3);
  for (std::size_t i = 0; i < robot.keypoint_map.size(); ++i) {
    out.row(i) = joints.row(robot.keypoint_map[i].human_joint);
  }
  return out;
}

RobotReferenceMotion retarget_motion(const BodyTemplate& body, const RobotModel& robot,
                                     const Eigen::VectorXd& beta_prime,
                                     const HumanMotion& motion,
                                     const Eigen::MatrixXi& contact_mask,
                                     const RetargetSettings& settings) {
  motion.validate(body);
  const std::size_t t_count = motion.num_frames();
  RobotReferenceMotion ref;
  ref.dt = motion.dt;
  ref.theta_hat.resize(t_count, robot.num_dofs());
  ref.root_position.resize(t_count, 3);
  ref.root_rotation.resize(t_count, 3);
  ref.contact_mask = contact_mask;

  // Seed the first frame at the human root.
  RobotPose pose;
  pose.q = Eigen::VectorXd::Zero(robot.num_dofs());
  pose.root_position =
      root_pivots(body, beta_prime, motion).row(0).transpose();
  pose.root_rotation = motion.root_rotation.row(0).transpose();
  for (std::size_t t = 0; t < t_count; ++t) {
    const PosedMesh posed = pose_frame(body, beta_prime, motion, t);
    const RetargetFrameResult r =
        retarget_frame(robot, human_keypoints(body, robot, posed), pose, settings);
    if (r.diverged) ref.diverged_frames.push_back(static_cast<int>(t));
    pose = r.pose;
    ref.theta_hat.row(t) = pose.q.transpose();
    ref.root_position.row(t) = pose.root_position.transpose();
    ref.root_rotation.row(t) = pose.root_rotation.transpose();
  }
  complete_reference(robot, ref);
  return ref;
}

}  // namespace duet
