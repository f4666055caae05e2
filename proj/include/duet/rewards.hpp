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

#ifndef DUET_REWARDS_HPP_
#define DUET_REWARDS_HPP_

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "duet/body_model.hpp"

namespace duet {

struct RewardConfig {
  double sigma_iw = 0.2;   // m, softmax temperature of the pair weights
  double sigma_int = 2.0;  // interaction reward sharpness
  double f_min = 5.0;      // N
  double f_max = 200.0;    // N
  double kappa = 0.1;      // 1/N
  double tau = 10.0;       // N
  double r_max = 1.0;
  double w_pen = 1.0;      // r_contact = r_con - w_pen * p_con
  double sigma_goal_pos = 0.5;  // rad
  double sigma_goal_vel = 5.0;  // rad/s
  // Robot links whose positions form the upper-body keypoints, per agent.
  std::array<std::vector<int>, 2> upper_body_keypoints;

  void validate() const;
};

// One simulated step of both agents. Keypoint rows are the upper-body
// keypoints; force and mask entries are the non-feet links. The joint
// arrays are optional (empty) and only feed the tracking reward.
struct RolloutFrame {
  int t = 0;
  std::array<Points, 2> keypoints;
  std::array<Points, 2> ref_keypoints;
  std::array<Eigen::VectorXd, 2> contact_forces;
  std::array<Eigen::VectorXi, 2> ref_contact_mask;
  std::array<Eigen::VectorXd, 2> dof_pos;
  std::array<Eigen::VectorXd, 2> dof_vel;
  std::array<Eigen::VectorXd, 2> ref_dof_pos;
  std::array<Eigen::VectorXd, 2> ref_dof_vel;

  // Throws InvalidInput on inconsistent sizes, negative forces or a
  // non-binary mask.
  void validate() const;
};

struct RewardBreakdown {
  double r_int = 0.0;
  double r_con = 0.0;
  double p_con = 0.0;
  double r_goal = 0.0;
  double total = 0.0;
  // Mean over agents of the joint-velocity tracking term.
  double r_vel = 0.0;
};

// Rows indexed u * U2 + v.
struct PairwiseOffsets {
  Points sim;
  Points ref;
};

PairwiseOffsets pairwise_offsets(const RolloutFrame& frame);

// Softmax over -|ref offset| / sigma_iw.
Eigen::VectorXd interaction_weights(const Points& ref_offsets, double sigma_iw);

// Symmetric relative discrepancy; both norms are floored at 1e-9 m.
double interaction_discrepancy(const Vec3& sim_offset, const Vec3& ref_offset);

double interaction_reward(const RolloutFrame& frame, const RewardConfig& config);

double expected_contact_reward(double force, int mask, const RewardConfig& config);
double unexpected_contact_penalty(double force, int mask, const RewardConfig& config);

// (r_con, p_con) summed over both agents and all non-feet links.
std::pair<double, double> aggregate_contact(const RolloutFrame& frame,
                                            const RewardConfig& config);

struct GoalReward {
  std::array<double, 2> position{0.0, 0.0};
  std::array<double, 2> velocity{0.0, 0.0};
  double total = 0.0;  // mean over agents of position + velocity terms
};

GoalReward goal_reward(const RolloutFrame& frame, const RewardConfig& config);

// All terms with unit scales; curriculum weighting is applied by the caller.
RewardBreakdown reward_breakdown(const RolloutFrame& frame, const RewardConfig& config);

struct ObservationLayout {
  std::size_t self_state = 0;
  std::size_t ref_targets = 0;
  std::size_t other_state = 0;
  std::size_t mask = 0;  // per agent
  std::size_t measured_contact = 0;

  std::size_t total() const {
    return self_state + ref_targets + other_state + 2 * mask + measured_contact;
  }
  // Segment names and offsets in output order.
  std::vector<std::pair<std::string, std::size_t>> offsets() const;
};

struct ObservationInputs {
  int agent = 0;
  Eigen::VectorXd self_state;
  Eigen::VectorXd other_state;
  Eigen::VectorXd ref_targets;
  std::array<Eigen::VectorXd, 2> masks;  // reference masks of agent 0 and 1
  Eigen::VectorXd measured_contact;
};

// [self | ref targets | other | own mask | partner mask | measured contact]
Eigen::VectorXd build_observation(const ObservationInputs& in,
                                  const ObservationLayout& layout);

}  // namespace duet

#endif  // DUET_REWARDS_HPP_
