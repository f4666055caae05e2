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

#include "duet/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "duet/errors.hpp"

namespace duet {
namespace {

constexpr double kMinOffsetNorm = 1e-9;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}

}  // namespace

void RewardConfig::validate() const {
  require(sigma_iw > 0.0, "sigma_iw must be > 0");
  require(sigma_int > 0.0, "sigma_int must be > 0");
  require(f_min > 0.0 && f_min <= f_max, "need 0 < f_min <= f_max");
  require(kappa > 0.0, "kappa must be > 0");
  require(tau > 0.0, "tau must be > 0");
  require(r_max > 0.0, "r_max must be > 0");
  require(w_pen >= 0.0, "w_pen must be >= 0");
  require(sigma_goal_pos > 0.0 && sigma_goal_vel > 0.0, "goal sigmas must be > 0");
}

void RolloutFrame::validate() const {
  for (int i = 0; i < 2; ++i) {
    require(keypoints[i].rows() == ref_keypoints[i].rows(),
            "simulated and reference keypoints differ in count");
    require(keypoints[i].rows() >= 1, "each agent needs at least one keypoint");
    require(contact_forces[i].size() == ref_contact_mask[i].size(),
            "contact forces and reference mask differ in length");
    require((contact_forces[i].array() >= 0.0).all(), "contact forces must be >= 0");
    require((ref_contact_mask[i].array() == 0 || ref_contact_mask[i].array() == 1).all(),
            "reference contact mask must be binary");
    require(dof_pos[i].size() == ref_dof_pos[i].size() || dof_pos[i].size() == 0 ||
                ref_dof_pos[i].size() == 0,
            "joint position arrays differ in length");
    require(dof_vel[i].size() == ref_dof_vel[i].size() || dof_vel[i].size() == 0 ||
                ref_dof_vel[i].size() == 0,
            "joint velocity arrays differ in length");
  }
}

PairwiseOffsets pairwise_offsets(const RolloutFrame& frame) {
  const Eigen::Index u1 = frame.keypoints[0].rows();
  const Eigen::Index u2 = frame.keypoints[1].rows();
  PairwiseOffsets out;
  out.sim.resize(u1 * u2, 3);
  out.ref.resize(u1 * u2, 3);
  for (Eigen::Index u = 0; u < u1; ++u) {
    for (Eigen::Index v = 0; v < u2; ++v) {
      out.sim.row(u * u2 + v) = frame.keypoints[0].row(u) - frame.keypoints[1].row(v);
      out.ref.row(u * u2 + v) =
          frame.ref_keypoints[0].row(u) - frame.ref_keypoints[1].row(v);
    }
  }
  return out;
}

Eigen::VectorXd interaction_weights(const Points& ref_offsets, double sigma_iw) {
  const Eigen::Index n = ref_offsets.rows();
  if (n < 1) throw InvalidInput("interaction weights need at least one pair");
  Eigen::VectorXd d = ref_offsets.rowwise().norm();
  // Shift by the smallest distance so the largest exponent is exp(0).
  const double shift = d.minCoeff();
  Eigen::VectorXd w = (-(d.array() - shift) / sigma_iw).exp();
  return w / w.sum();
}

double interaction_discrepancy(const Vec3& sim_offset, const Vec3& ref_offset) {
  const double num = (sim_offset - ref_offset).norm();
  const double ns = std::max(sim_offset.norm(), kMinOffsetNorm);
  const double nr = std::max(ref_offset.norm(), kMinOffsetNorm);
  return 0.5 * num / ns + 0.5 * num / nr;
}

double interaction_reward(const RolloutFrame& frame, const RewardConfig& config) {
  const PairwiseOffsets off = pairwise_offsets(frame);
  const Eigen::VectorXd w = interaction_weights(off.ref, config.sigma_iw);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < off.sim.rows(); ++i) {
    sum += w[i] * interaction_discrepancy(off.sim.row(i).transpose(),
                                          off.ref.row(i).transpose());
  }
  return std::exp(-config.sigma_int * sum);
}

double expected_contact_reward(double force, int mask, const RewardConfig& config) {
  if (mask == 0) return 0.0;
  if (force >= config.f_min && force <= config.f_max) return config.r_max;
  if (force < config.f_min) {
    return config.r_max / (1.0 + std::exp(config.kappa * (config.f_min - force)));
  }
  return config.r_max / (1.0 + std::exp(config.kappa * (force - config.f_max)));
}

double unexpected_contact_penalty(double force, int mask, const RewardConfig& config) {
  if (mask == 1) return 0.0;
  return 1.0 / (1.0 + std::exp(-config.kappa * (force - config.tau)));
}

std::pair<double, double> aggregate_contact(const RolloutFrame& frame,
                                            const RewardConfig& config) {
  double r_con = 0.0;
  double p_con = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (Eigen::Index b = 0; b < frame.contact_forces[i].size(); ++b) {
      const double f = frame.contact_forces[i][b];
      const int m = frame.ref_contact_mask[i][b];
      r_con += expected_contact_reward(f, m, config);
      p_con += unexpected_contact_penalty(f, m, config);
    }
  }
  return {r_con, p_con};
}

GoalReward goal_reward(const RolloutFrame& frame, const RewardConfig& config) {
  GoalReward g;
  int agents = 0;
  for (int i = 0; i < 2; ++i) {
    const bool has_pos = frame.dof_pos[i].size() > 0 && frame.ref_dof_pos[i].size() > 0;
    const bool has_vel = frame.dof_vel[i].size() > 0 && frame.ref_dof_vel[i].size() > 0;
    if (has_pos) {
      const double e2 = (frame.dof_pos[i] - frame.ref_dof_pos[i]).squaredNorm();
      g.position[i] = std::exp(-e2 / (config.sigma_goal_pos * config.sigma_goal_pos));
    }
    if (has_vel) {
      const double e2 = (frame.dof_vel[i] - frame.ref_dof_vel[i]).squaredNorm();
      g.velocity[i] = std::exp(-e2 / (config.sigma_goal_vel * config.sigma_goal_vel));
    }
    if (has_pos || has_vel) {
      g.total += g.position[i] + g.velocity[i];
      ++agents;
    }
  }
  if (agents > 0) g.total /= agents;
  return g;
}

RewardBreakdown reward_breakdown(const RolloutFrame& frame, const RewardConfig& config) {
  frame.validate();
  RewardBreakdown b;
  b.r_int = interaction_reward(frame, config);
  std::tie(b.r_con, b.p_con) = aggregate_contact(frame, config);
  const GoalReward g = goal_reward(frame, config);
  b.r_goal = g.total;
  b.r_vel = 0.5 * (g.velocity[0] + g.velocity[1]);
  b.total = b.r_goal + b.r_int + (b.r_con - config.w_pen * b.p_con);
  return b;
}

std::vector<std::pair<std::string, std::size_t>> ObservationLayout::offsets() const {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::size_t at = 0;
  for (const auto& [name, size] :
       {std::pair<std::string, std::size_t>{"self_state", self_state},
        {"ref_targets", ref_targets},
        {"other_state", other_state},
        {"own_mask", mask},
        {"partner_mask", mask},
        {"measured_contact", measured_contact}}) {
    out.emplace_back(name, at);
    at += size;
  }
  return out;
}

Eigen::VectorXd build_observation(const ObservationInputs& in,
                                  const ObservationLayout& layout) {
  if (in.agent != 0 && in.agent != 1) throw InvalidInput("agent must be 0 or 1");
  auto check = [](const Eigen::VectorXd& v, std::size_t n, const char* name) {
    if (static_cast<std::size_t>(v.size()) != n) {
      throw InvalidInput(std::string("observation component ") + name + " has size " +
                         std::to_string(v.size()) + ", expected " + std::to_string(n));
    }
  };
  check(in.self_state, layout.self_state, "self_state");
  check(in.ref_targets, layout.ref_targets, "ref_targets");
  check(in.other_state, layout.other_state, "other_state");
  check(in.masks[0], layout.mask, "mask[0]");
  check(in.masks[1], layout.mask, "mask[1]");
  check(in.measured_contact, layout.measured_contact, "measured_contact");

  Eigen::VectorXd out(layout.total());
  Eigen::Index at = 0;
  for (const Eigen::VectorXd* part :
       {&in.self_state, &in.ref_targets, &in.other_state, &in.masks[in.agent],
        &in.masks[1 - in.agent], &in.measured_contact}) {
    out.segment(at, part->size()) = *part;
    at += part->size();
  }
  return out;
}

}  // namespace duet
