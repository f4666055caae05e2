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

#include "duet/metrics.hpp"

#include <cmath>
#include <string>

#include "duet/errors.hpp"
#include "duet/simd/kernels.hpp"
#include "parallel.hpp"

namespace duet {
namespace {

constexpr double kMm = 1000.0;

void check_trajectories(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& ref) {
  if (pred.rows() != ref.rows() || pred.cols() != ref.cols()) {
    throw InvalidInput("trajectory shapes differ: " + std::to_string(pred.rows()) + "x" +
                       std::to_string(pred.cols()) + " vs " + std::to_string(ref.rows()) +
                       "x" + std::to_string(ref.cols()));
  }
  if (pred.cols() % 3 != 0 || pred.cols() == 0) {
    throw InvalidInput("trajectory needs 3 columns per link");
  }
}

// Row t of (pred - ref), optionally anchor-relative, packed as xyz triples.
void frame_difference(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& ref,
                      Eigen::Index t, bool root_relative, int anchor,
                      std::vector<double>& out) {
  const Eigen::Index links = pred.cols() / 3;
  out.resize(pred.cols());
  for (Eigen::Index l = 0; l < links; ++l) {
    for (int k = 0; k < 3; ++k) {
      double p = pred(t, 3 * l + k);
      double r = ref(t, 3 * l + k);
      if (root_relative) {
        p -= pred(t, 3 * anchor + k);
        r -= ref(t, 3 * anchor + k);
      }
      out[3 * l + k] = p - r;
    }
  }
}

double mean_norm(const std::vector<double>& packed) {
  const std::size_t n = packed.size() / 3;
  return simd::kernels().sum_norms3(packed.data(), n) / static_cast<double>(n);
}

}  // namespace

Eigen::VectorXd mpjpe_per_frame(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& ref,
                                bool root_relative, int anchor_link) {
  check_trajectories(pred, ref);
  if (anchor_link < 0 || anchor_link >= pred.cols() / 3) {
    throw InvalidInput("anchor link out of range");
  }
  Eigen::VectorXd out(pred.rows());
  std::vector<double> diff;
  for (Eigen::Index t = 0; t < pred.rows(); ++t) {
    frame_difference(pred, ref, t, root_relative, anchor_link, diff);
    out(t) = kMm * mean_norm(diff);
  }
  return out;
}

double mpjpe(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& ref, bool root_relative,
             int anchor_link) {
  if (pred.rows() == 0) throw UndefinedMetric("MPJPE of an empty sequence");
  return mpjpe_per_frame(pred, ref, root_relative, anchor_link).mean();
}

double acc_error(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& ref) {
  check_trajectories(pred, ref);
  const Eigen::Index T = pred.rows();
  if (T < 3) throw UndefinedMetric("acceleration error needs at least 3 frames");
  // Second difference of the error track. Constant and linear offsets cancel
  // exactly whenever the samples and their differences are representable.
  const Eigen::MatrixXd d = pred - ref;
  std::vector<double> acc(static_cast<std::size_t>((T - 2) * d.cols()));
  std::size_t i = 0;
  for (Eigen::Index t = 1; t + 1 < T; ++t) {
    for (Eigen::Index c = 0; c < d.cols(); ++c) {
      acc[i++] = (d(t + 1, c) - d(t, c)) - (d(t, c) - d(t - 1, c));
    }
  }
  return kMm * mean_norm(acc);
}

double vel_error(const Eigen::MatrixX3d& pred_root, const Eigen::MatrixX3d& ref_root) {
  if (pred_root.rows() != ref_root.rows()) throw InvalidInput("root tracks differ in length");
  const Eigen::Index T = pred_root.rows();
  if (T < 2) throw UndefinedMetric("velocity error needs at least 2 frames");
  std::vector<double> vel(static_cast<std::size_t>(3 * (T - 1)));
  std::size_t i = 0;
  for (Eigen::Index t = 1; t < T; ++t) {
    for (int k = 0; k < 3; ++k) {
      vel[i++] = (pred_root(t, k) - pred_root(t - 1, k)) - (ref_root(t, k) - ref_root(t - 1, k));
    }
  }
  return kMm * mean_norm(vel);
}

void SuccessConfig::validate() const {
  if (!(height_threshold > 0.0) || !(orientation_threshold > 0.0)) {
    throw ConfigError("success thresholds must be positive");
  }
  if (anchor_link < 0) throw ConfigError("anchor link must be >= 0");
}

AnchorTrack anchor_track(const RobotReferenceMotion& motion, int link) {
  const auto T = static_cast<Eigen::Index>(motion.num_frames());
  if (motion.p_hat.rows() != T || motion.link_rotations.size() != motion.num_frames()) {
    throw InvalidInput("reference motion is not completed");
  }
  if (link < 0 || 3 * link + 2 >= motion.p_hat.cols()) {
    throw InvalidInput("anchor link out of range");
  }
  AnchorTrack track;
  track.height.resize(T);
  track.orientation.reserve(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    track.height(t) = motion.p_hat(t, 3 * link + 2);
    track.orientation.push_back(motion.link_rotations[t][link]);
  }
  return track;
}

int success(const AnchorTrack& pred, const AnchorTrack& ref, const SuccessConfig& config) {
  config.validate();
  if (pred.height.size() != ref.height.size() ||
      pred.orientation.size() != ref.orientation.size() ||
      pred.orientation.size() != static_cast<std::size_t>(pred.height.size())) {
    throw InvalidInput("anchor tracks differ in length");
  }
  for (Eigen::Index t = 0; t < pred.height.size(); ++t) {
    if (std::abs(pred.height(t) - ref.height(t)) > config.height_threshold) return 0;
    if (geodesic_angle(pred.orientation[t], ref.orientation[t]) >
        config.orientation_threshold) {
      return 0;
    }
  }
  return 1;
}

double contact_f1(const Eigen::MatrixXi& pred_mask, const Eigen::MatrixXi& ref_mask) {
  if (pred_mask.rows() != ref_mask.rows() || pred_mask.cols() != ref_mask.cols()) {
    throw InvalidInput("contact masks differ in shape");
  }
  long tp = 0, fp = 0, fn = 0;
  for (Eigen::Index i = 0; i < pred_mask.size(); ++i) {
    const int p = pred_mask.data()[i];
    const int r = ref_mask.data()[i];
    if ((p != 0 && p != 1) || (r != 0 && r != 1)) {
      throw InvalidInput("contact masks must be binary");
    }
    tp += p & r;
    fp += p & (1 - r);
    fn += (1 - p) & r;
  }
  if (tp + fp + fn == 0) return 1.0;
  return 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
}

MetricReport evaluate_agent(const RobotReferenceMotion& pred, const RobotReferenceMotion& ref,
                            const SuccessConfig& config) {
  config.validate();
  MetricReport r;
  r.success = success(anchor_track(pred, config.anchor_link),
                      anchor_track(ref, config.anchor_link), config);
  r.e_gmpjpe = mpjpe(pred.p_hat, ref.p_hat, false, config.anchor_link);
  r.e_mpjpe = mpjpe(pred.p_hat, ref.p_hat, true, config.anchor_link);
  r.e_acc = acc_error(pred.p_hat, ref.p_hat);
  r.e_vel = vel_error(pred.root_position, ref.root_position);
  r.contact_f1 = contact_f1(pred.contact_mask, ref.contact_mask);
  return r;
}

EpisodeReport evaluate_episode(const std::array<RobotReferenceMotion, 2>& pred,
                               const std::array<RobotReferenceMotion, 2>& ref,
                               const SuccessConfig& config) {
  EpisodeReport out;
  for (int a = 0; a < 2; ++a) out.agents[a] = evaluate_agent(pred[a], ref[a], config);
  const MetricReport& x = out.agents[0];
  const MetricReport& y = out.agents[1];
  out.mean.success = (x.success == 1.0 && y.success == 1.0) ? 1.0 : 0.0;
  out.mean.e_gmpjpe = 0.5 * (x.e_gmpjpe + y.e_gmpjpe);
  out.mean.e_mpjpe = 0.5 * (x.e_mpjpe + y.e_mpjpe);
  out.mean.e_acc = 0.5 * (x.e_acc + y.e_acc);
  out.mean.e_vel = 0.5 * (x.e_vel + y.e_vel);
  out.mean.contact_f1 = 0.5 * (x.contact_f1 + y.contact_f1);

  const Eigen::Index T = pred[0].p_hat.rows();
  if (pred[1].p_hat.rows() != T) throw InvalidInput("agents differ in length");
  out.gmpjpe_curve.resize(T, 2);
  out.mpjpe_curve.resize(T, 2);
  for (int a = 0; a < 2; ++a) {
    out.gmpjpe_curve.col(a) = mpjpe_per_frame(pred[a].p_hat, ref[a].p_hat, false,
                                              config.anchor_link);
    out.mpjpe_curve.col(a) = mpjpe_per_frame(pred[a].p_hat, ref[a].p_hat, true,
                                             config.anchor_link);
  }
  return out;
}

std::vector<EpisodeReport> evaluate_batch(const std::vector<Episode>& episodes,
                                          const SuccessConfig& config) {
  std::vector<EpisodeReport> out(episodes.size());
  detail::parallel_for(episodes.size(), [&](std::size_t i) {
    out[i] = evaluate_episode(episodes[i].pred, episodes[i].ref, config);
  });
  return out;
}

}  // namespace duet
