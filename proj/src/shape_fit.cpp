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

#include "duet/shape_fit.hpp"

#include <cmath>
#include <string>

#include <Eigen/QR>

#include "duet/errors.hpp"

namespace duet {

void ShapeFitConfig::validate() const {
  if (!(lambda >= 0.0)) throw InvalidInput("lambda must be >= 0");
  if (max_iters < 1) throw InvalidInput("max_iters must be >= 1");
  if (!(step_tolerance > 0.0)) throw InvalidInput("step_tolerance must be > 0");
  for (double w : keypoint_weights) {
    if (!(w >= 0.0)) throw InvalidInput("keypoint weights must be >= 0");
  }
}

ShapeObjective::ShapeObjective(const BodyTemplate& body, const RobotModel& robot,
                               const Points& robot_keypoints,
                               std::vector<double> weights, double lambda)
    : body_(body), lambda_(lambda) {
  const std::size_t k = robot.keypoint_map.size();
  if (k == 0) throw InvalidInput("keypoint map is empty");
  if (robot_keypoints.rows() != static_cast<Eigen::Index>(k)) {
    throw InvalidInput("expected one robot keypoint per keypoint_map entry");
  }
  if (weights.empty()) weights.assign(k, 1.0);
  if (weights.size() != k) throw InvalidInput("keypoint_weights has wrong length");

  targets_.resize(3 * k);
  weights3_.resize(3 * k);
  for (std::size_t i = 0; i < k; ++i) {
    const int hj = robot.keypoint_map[i].human_joint;
    if (hj < 0 || hj >= static_cast<int>(body.num_joints())) {
      throw InvalidInput("keypoint map references a missing human joint");
    }
    human_joints_.push_back(hj);
    targets_.segment<3>(3 * i) = robot_keypoints.row(i).transpose();
    weights3_.segment<3>(3 * i).setConstant(weights[i]);
  }

  // At the zero pose the joints are linear in beta: R (T + sum_b beta_b S_b).
  const Eigen::MatrixXd& reg = body.joint_regressor();
  const Points base = reg * body.vertices();
  offset_.resize(3 * k);
  for (std::size_t i = 0; i < k; ++i) {
    offset_.segment<3>(3 * i) =
        base.row(human_joints_[i]).transpose() - targets_.segment<3>(3 * i);
  }
  jacobian_.resize(3 * k, body.num_shapes());
  for (std::size_t b = 0; b < body.num_shapes(); ++b) {
    const Points d = reg * body.blendshapes()[b];
    for (std::size_t i = 0; i < k; ++i) {
      jacobian_.block<3, 1>(3 * i, b) = d.row(human_joints_[i]).transpose();
    }
  }
}

Eigen::VectorXd ShapeObjective::residual(const Eigen::VectorXd& beta) const {
  const Points joints = rest_joints(body_, beta);
  Eigen::VectorXd r(targets_.size());
  for (std::size_t i = 0; i < human_joints_.size(); ++i) {
    r.segment<3>(3 * i) =
        joints.row(human_joints_[i]).transpose() - targets_.segment<3>(3 * i);
  }
  return r;
}

double ShapeObjective::keypoint_loss(const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd r = residual(beta);
  return (weights3_.array() * r.array().square()).sum();
}

double ShapeObjective::value(const Eigen::VectorXd& beta) const {
  return keypoint_loss(beta) + lambda_ * beta.squaredNorm();
}

Eigen::VectorXd ShapeObjective::gradient(const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd r = residual(beta);
  return 2.0 * jacobian_.transpose() * (weights3_.asDiagonal() * r) +
         2.0 * lambda_ * beta;
}

Points robot_rest_keypoints(const RobotModel& robot, const BodyTemplate& body) {
  const Points joints = rest_joints(body, Eigen::VectorXd::Zero(body.num_shapes()));
  const FkResult fk =
      forward_kinematics(robot, Eigen::VectorXd::Zero(robot.num_dofs()),
                         joints.row(0).transpose(), Vec3::Zero());
  Points out(robot.keypoint_map.size(), 3);
  for (std::size_t i = 0; i < robot.keypoint_map.size(); ++i) {
    out.row(i) = fk.positions[robot.keypoint_map[i].robot_link].transpose();
  }
  return out;
}

ShapeFitResult fit_shape(const BodyTemplate& body, const RobotModel& robot,
                         const Points& rest_robot_keypoints,
                         const ShapeFitConfig& config) {
  config.validate();
  const ShapeObjective objective(body, robot, rest_robot_keypoints,
                                 config.keypoint_weights, config.lambda);
  const Eigen::Index nb = static_cast<Eigen::Index>(body.num_shapes());

  // Normal matrix of the (linear) keypoint residual.
  const Eigen::MatrixXd& jac = objective.jacobian();
  Eigen::MatrixXd normal = 2.0 * jac.transpose() * objective.weights3().asDiagonal() * jac;
  normal.diagonal().array() += 2.0 * config.lambda;
  // Rank-revealing, so a blendshape the keypoints cannot see (lambda = 0)
  // gets no step instead of a huge one along rounding noise.
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> solver(normal);

  ShapeFitResult result;
  result.beta_prime = Eigen::VectorXd::Zero(nb);
  double loss = objective.value(result.beta_prime);
  if (!std::isfinite(loss)) throw Diverged("shape fit loss is not finite", 0);
  result.loss_history.push_back(loss);

  constexpr double kArmijo = 1e-4;
  double gd_step = 1.0;
  for (int iter = 1; iter <= config.max_iters; ++iter) {
    result.iterations = iter;
    const Eigen::VectorXd grad = objective.gradient(result.beta_prime);
    Eigen::VectorXd direction = config.method == ShapeFitMethod::kGaussNewton
                                    ? Eigen::VectorXd(solver.solve(-grad))
                                    : Eigen::VectorXd(-grad);
    double slope = grad.dot(direction);
    if (!(slope < 0.0)) {
      // Stationary (or the solve lost descent): fall back to steepest descent.
      direction = -grad;
      slope = -grad.squaredNorm();
    }
    if (slope == 0.0) {
      result.converged = true;
      break;
    }
    double step = config.method == ShapeFitMethod::kGaussNewton ? 1.0 : gd_step;
    Eigen::VectorXd candidate;
    double candidate_loss = loss;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      candidate = result.beta_prime + step * direction;
      candidate_loss = objective.value(candidate);
      if (!std::isfinite(candidate_loss)) {
        throw Diverged("shape fit loss is not finite", static_cast<std::size_t>(iter));
      }
      if (candidate_loss <= loss + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No decrease is representable any more: at a minimizer to rounding.
      result.converged = true;
      break;
    }
    const double step_norm = (candidate - result.beta_prime).norm();
    result.beta_prime = candidate;
    loss = candidate_loss;
    result.loss_history.push_back(loss);
    gd_step = std::min(1e6, 2.0 * step);
    if (step_norm < config.step_tolerance) {
      result.converged = true;
      break;
    }
  }

  result.keypoint_loss = objective.keypoint_loss(result.beta_prime);
  result.reg_loss = config.lambda * result.beta_prime.squaredNorm();
  result.final_loss = result.keypoint_loss + result.reg_loss;
  return result;
}

}  // namespace duet
