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

#ifndef DUET_METRICS_HPP_
#define DUET_METRICS_HPP_

#include <array>
#include <vector>

#include <Eigen/Core>

#include "duet/retarget.hpp"
#include "duet/rotation.hpp"

namespace duet {

// Trajectories are T x 3L matrices in meters, link l at columns 3l..3l+2.
// Errors come out in millimeters.

// Mean over frames and links of |pred - ref|. With root_relative the anchor
// link position is subtracted from both first.
double mpjpe(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& ref, bool root_relative,
             int anchor_link = 0);

// Per-frame mean |pred - ref|, length T.
Eigen::VectorXd mpjpe_per_frame(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& ref,
                                bool root_relative, int anchor_link = 0);

// Mean |a2(pred) - a2(ref)| with a2 the central second difference, mm/frame^2.
// Throws UndefinedMetric for T < 3.
double acc_error(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& ref);

// Mean |d(pred_root) - d(ref_root)| with d the first difference, mm/frame.
// Throws UndefinedMetric for T < 2.
double vel_error(const Eigen::MatrixX3d& pred_root, const Eigen::MatrixX3d& ref_root);

struct SuccessConfig {
  double height_threshold = 0.3;       // m
  double orientation_threshold = 0.8;  // rad
  int anchor_link = 0;

  void validate() const;
};

struct AnchorTrack {
  Eigen::VectorXd height;  // world z per frame
  std::vector<Quat> orientation;
};

AnchorTrack anchor_track(const RobotReferenceMotion& motion, int link);

// 1 when every frame stays within both thresholds (bounds inclusive).
int success(const AnchorTrack& pred, const AnchorTrack& ref, const SuccessConfig& config);

// F1 over the flattened masks; 1 when neither mask has a positive.
double contact_f1(const Eigen::MatrixXi& pred_mask, const Eigen::MatrixXi& ref_mask);

struct MetricReport {
  double success = 0.0;
  double e_gmpjpe = 0.0;  // mm
  double e_mpjpe = 0.0;   // mm
  double e_acc = 0.0;     // mm/frame^2
  double e_vel = 0.0;     // mm/frame
  double contact_f1 = 0.0;
};

// Completed motions (p_hat and link_rotations filled).
MetricReport evaluate_agent(const RobotReferenceMotion& pred, const RobotReferenceMotion& ref,
                            const SuccessConfig& config);

struct EpisodeReport {
  std::array<MetricReport, 2> agents;
  // Errors averaged over agents; success is 1 only if both agents succeed.
  MetricReport mean;
  // Per-frame curves for plotting, one column per agent.
  Eigen::MatrixXd gmpjpe_curve;  // T x 2
  Eigen::MatrixXd mpjpe_curve;   // T x 2
};

EpisodeReport evaluate_episode(const std::array<RobotReferenceMotion, 2>& pred,
                               const std::array<RobotReferenceMotion, 2>& ref,
                               const SuccessConfig& config);

struct Episode {
  std::array<RobotReferenceMotion, 2> pred;
  std::array<RobotReferenceMotion, 2> ref;
};

// Episodes are evaluated concurrently; output order follows the input.
std::vector<EpisodeReport> evaluate_batch(const std::vector<Episode>& episodes,
                                          const SuccessConfig& config);

}  // namespace duet

#endif  // DUET_METRICS_HPP_
