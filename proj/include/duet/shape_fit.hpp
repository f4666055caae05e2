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

#ifndef DUET_SHAPE_FIT_HPP_
#define DUET_SHAPE_FIT_HPP_

#include <vector>

#include <Eigen/Core>

#include "duet/body_model.hpp"

namespace duet {

enum class ShapeFitMethod {
  kGaussNewton,      // normal-equation direction
  kGradientDescent,  // steepest descent
};

struct ShapeFitConfig {
  double lambda = 0.0016;
  int max_iters = 500;
  double step_tolerance = 1e-10;
  // One weight per keypoint_map entry; empty means unit weights.
  std::vector<double> keypoint_weights;
  ShapeFitMethod method = ShapeFitMethod::kGaussNewton;

  void validate() const;
};

struct ShapeFitResult {
  Eigen::VectorXd beta_prime;
  double final_loss = 0.0;
  double keypoint_loss = 0.0;
  double reg_loss = 0.0;  // lambda * |beta'|^2
  int iterations = 0;
  bool converged = false;
  std::vector<double> loss_history;  // loss after each accepted step, [0] at start
};

// Keypoint loss sum_k w_k |J(beta)_k - target_k|^2 + lambda |beta|^2 with
// the human joints evaluated on the shaped body in its zero pose.
class ShapeObjective {
 public:
  ShapeObjective(const BodyTemplate& body, const RobotModel& robot,
                 const Points& robot_keypoints, std::vector<double> weights,
                 double lambda);

  double keypoint_loss(const Eigen::VectorXd& beta) const;
  double value(const Eigen::VectorXd& beta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& beta) const;
  // d(keypoints)/d(beta), 3K x B.
  const Eigen::MatrixXd& jacobian() const { return jacobian_; }
  // Keypoint positions minus targets at beta = 0, flattened 3K.
  const Eigen::VectorXd& offset() const { return offset_; }
  const Eigen::VectorXd& weights3() const { return weights3_; }
  double lambda() const { return lambda_; }

 private:
  Eigen::VectorXd residual(const Eigen::VectorXd& beta) const;

  const BodyTemplate& body_;
  std::vector<int> human_joints_;
  Eigen::VectorXd targets_;   // 3K
  Eigen::VectorXd weights3_;  // per coordinate
  Eigen::MatrixXd jacobian_;
  Eigen::VectorXd offset_;
  double lambda_;
};

// Robot keypoint targets: link positions at zero joint angles with the root
// placed at the human root joint's rest position.
Points robot_rest_keypoints(const RobotModel& robot, const BodyTemplate& body);

ShapeFitResult fit_shape(const BodyTemplate& body, const RobotModel& robot,
                         const Points& rest_robot_keypoints,
                         const ShapeFitConfig& config);

}  // namespace duet

#endif  // DUET_SHAPE_FIT_HPP_
