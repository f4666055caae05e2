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
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "duet/errors.hpp"
#include "duet/fixtures.hpp"

namespace duet {
namespace {

using fixtures::Rng;

// One limb whose length grows 0.1 m per unit of the single shape coefficient.
BodyTemplate limb_body() {
  Points v(4, 3);
  v << 0, 0, 0,  0, 1, 0,  1, 0, 0,  1, 1, 0;
  Faces f(2, 3);
  f << 0, 2, 1,  1, 2, 3;
  Points stretch = Points::Zero(4, 3);
  stretch(2, 0) = 0.1;
  stretch(3, 0) = 0.1;
  Eigen::MatrixXd w(4, 2);
  w << 1, 0,  1, 0,  0, 1,  0, 1;
  Eigen::MatrixXd reg(2, 4);
  reg << 0.5, 0.5, 0, 0,  0, 0, 0.5, 0.5;
  return BodyTemplate::create(v, f, {stretch}, w, reg, {-1, 0});
}

RobotModel limb_robot(double length) {
  RobotModel r;
  r.links = {{"base", -1, Vec3::Zero(), Vec3::Zero(), -1},
             {"tip", 0, Vec3(length, 0, 0), Vec3::Zero(), -1}};
  r.keypoint_map = {{0, 0}, {1, 1}};
  return r;
}

// Weighted ridge regression on the linear keypoint model. At lambda = 0 the
// girth coefficient is unobservable, so take the minimum-norm solution.
Eigen::VectorXd ridge_oracle(const ShapeObjective& obj, double lambda) {
  const Eigen::MatrixXd& a = obj.jacobian();
  const Eigen::MatrixXd w = obj.weights3().asDiagonal();
  Eigen::MatrixXd lhs = a.transpose() * w * a;
  lhs.diagonal().array() += lambda;
  return lhs.completeOrthogonalDecomposition().solve(-a.transpose() * w * obj.offset());
}

Points perturbed_targets(const BodyTemplate& body, const RobotModel& robot, Rng& rng) {
  Points t = robot_rest_keypoints(robot, body);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] += rng.uniform(-0.03, 0.03);
  return t;
}

TEST(FitShape, LimbLengthMatchesScalarClosedForm) {
  const BodyTemplate body = limb_body();
  const RobotModel robot = limb_robot(1.3);
  const Points targets = robot_rest_keypoints(robot, body);
  for (double lambda : {0.0, 1e-3, 0.0016, 0.1}) {
    ShapeFitConfig cfg;
    cfg.lambda = lambda;
    const ShapeFitResult res = fit_shape(body, robot, targets, cfg);
    // Residual is 0.1 beta - 0.3 on a single coordinate.
    EXPECT_NEAR(res.beta_prime[0], 0.03 / (0.01 + lambda), 1e-6) << "lambda " << lambda;
    EXPECT_TRUE(res.converged);
  }
}

TEST(FitShape, GradientDescentReachesSameMinimum) {
  const BodyTemplate body = limb_body();
  const RobotModel robot = limb_robot(1.3);
  ShapeFitConfig cfg;
  cfg.method = ShapeFitMethod::kGradientDescent;
  cfg.max_iters = 5000;
  const ShapeFitResult res = fit_shape(body, robot, robot_rest_keypoints(robot, body), cfg);
  EXPECT_NEAR(res.beta_prime[0], 0.03 / (0.01 + cfg.lambda), 1e-6);
}

TEST(FitShape, FixtureMatchesRidgeRegression) {
  const BodyTemplate& body = fixtures::synthetic_body();
  const RobotModel robot = fixtures::h1_robot(body);
  const Points targets = robot_rest_keypoints(robot, body);
  for (double lambda : {0.0, 1e-3, 0.0016, 0.1}) {
    ShapeFitConfig cfg;
    cfg.lambda = lambda;
    const ShapeFitResult res = fit_shape(body, robot, targets, cfg);
    const ShapeObjective obj(body, robot, targets, {}, lambda);
    EXPECT_LE((res.beta_prime - ridge_oracle(obj, lambda)).cwiseAbs().maxCoeff(), 1e-6)
        << "lambda " << lambda;
  }
}

TEST(FitShape, ZeroResidualTargetsGiveZeroShape) {
  const BodyTemplate& body = fixtures::synthetic_body();
  const RobotModel robot = fixtures::h1_robot(body);
  const Points joints = rest_joints(body, Eigen::VectorXd::Zero(body.num_shapes()));
  Points targets(robot.keypoint_map.size(), 3);
  for (std::size_t i = 0; i < robot.keypoint_map.size(); ++i) {
    targets.row(i) = joints.row(robot.keypoint_map[i].human_joint);
  }
  const ShapeFitResult res = fit_shape(body, robot, targets, {});
  EXPECT_LE(res.beta_prime.norm(), 1e-6);
}

TEST(FitShape, HugeLambdaPinsShapeToZero) {
  const BodyTemplate& body = fixtures::synthetic_body();
  const RobotModel robot = fixtures::h1_robot(body);
  Rng rng(4);
  ShapeFitConfig cfg;
  cfg.lambda = 1e9;
  const ShapeFitResult res = fit_shape(body, robot, perturbed_targets(body, robot, rng), cfg);
  EXPECT_LE(res.beta_prime.norm(), 1e-4);
}

TEST(FitShape, LossDecompositionAndDescent) {
  const BodyTemplate& body = fixtures::synthetic_body();
  const RobotModel robot = fixtures::h1_robot(body);
  Rng rng(6);
  for (auto method : {ShapeFitMethod::kGaussNewton, ShapeFitMethod::kGradientDescent}) {
    ShapeFitConfig cfg;
    cfg.method = method;
    cfg.max_iters = 200;
    const ShapeFitResult res =
        fit_shape(body, robot, perturbed_targets(body, robot, rng), cfg);
    EXPECT_NEAR(res.final_loss,
                res.keypoint_loss + cfg.lambda * res.beta_prime.squaredNorm(), 1e-9);
    ASSERT_FALSE(res.loss_history.empty());
    for (std::size_t i = 1; i < res.loss_history.size(); ++i) {
      EXPECT_LE(res.loss_history[i], res.loss_history[i - 1]) << "step " << i;
    }
  }
}

TEST(FitShape, StrongerRegularizationShrinksShape) {
  const BodyTemplate body = limb_body();
  const RobotModel robot = limb_robot(1.3);
  const Points targets = robot_rest_keypoints(robot, body);
  double previous = std::numeric_limits<double>::infinity();
  for (double lambda : {0.0, 1e-3, 1e-1, 10.0}) {
    ShapeFitConfig cfg;
    cfg.lambda = lambda;
    const double norm = fit_shape(body, robot, targets, cfg).beta_prime.norm();
    EXPECT_LE(norm, previous) << "lambda " << lambda;
    previous = norm;
  }
}

TEST(ShapeObjective, GradientMatchesCentralDifferences) {
  const BodyTemplate& body = fixtures::synthetic_body();
  const RobotModel robot = fixtures::h1_robot(body);
  Rng rng(12);
  const Points targets = perturbed_targets(body, robot, rng);
  const ShapeObjective obj(body, robot, targets, {}, 0.0016);
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd beta(body.num_shapes());
    for (Eigen::Index i = 0; i < beta.size(); ++i) beta[i] = rng.uniform(-2, 2);
    const Eigen::VectorXd g = obj.gradient(beta);
    for (Eigen::Index i = 0; i < beta.size(); ++i) {
      Eigen::VectorXd hi = beta, lo = beta;
      hi[i] += h;
      lo[i] -= h;
      const double fd = (obj.value(hi) - obj.value(lo)) / (2 * h);
      EXPECT_LE(std::abs(fd - g[i]), 1e-4 * std::max(1.0, std::abs(g[i])))
          << "coefficient " << i;
    }
  }
}

TEST(FitShape, RejectsBadConfigAndInputs) {
  const BodyTemplate body = limb_body();
  const RobotModel robot = limb_robot(1.0);
  const Points targets = robot_rest_keypoints(robot, body);
  ShapeFitConfig cfg;
  cfg.lambda = -1;
  EXPECT_THROW(fit_shape(body, robot, targets, cfg), InvalidInput);
  cfg = {};
  cfg.max_iters = 0;
  EXPECT_THROW(fit_shape(body, robot, targets, cfg), InvalidInput);
  RobotModel empty = robot;
  empty.keypoint_map.clear();
  EXPECT_THROW(fit_shape(body, empty, Points(0, 3), {}), InvalidInput);
}

TEST(FitShape, NonFiniteTargetsDiverge) {
  const BodyTemplate body = limb_body();
  const RobotModel robot = limb_robot(1.0);
  Points targets = robot_rest_keypoints(robot, body);
  targets(1, 0) = std::numeric_limits<double>::infinity();
  try {
    fit_shape(body, robot, targets, {});
    FAIL() << "expected Diverged";
  } catch (const Diverged& e) {
    EXPECT_EQ(e.iteration(), 0u);
  }
}

}  // namespace
}  // namespace duet
