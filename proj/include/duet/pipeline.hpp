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

#ifndef DUET_PIPELINE_HPP_
#define DUET_PIPELINE_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "duet/body_model.hpp"
#include "duet/contact.hpp"
#include "duet/curriculum.hpp"
#include "duet/fixtures.hpp"
#include "duet/io.hpp"
#include "duet/metrics.hpp"
#include "duet/retarget.hpp"
#include "duet/rewards.hpp"
#include "duet/root_opt.hpp"
#include "duet/shape_fit.hpp"

namespace duet {

inline constexpr const char* kVersion = "1.0.0";

struct PipelineConfig {
  // Empty template/robot paths select the built-in synthetic body and robot.
  std::filesystem::path template_path;
  std::filesystem::path robot_path;
  // Empty motion paths generate `fixture` instead.
  std::filesystem::path motion_a;
  std::filesystem::path motion_b;
  fixtures::FixtureSpec fixture;
  // Optional rollout; without it rewards.csv is only written when
  // rollout_noise is set, from a synthetic rollout.
  std::filesystem::path rollout;
  std::optional<double> rollout_noise;

  double epsilon = 0.0;
  ShapeFitConfig shape;
  RootOptMode root_mode = RootOptMode::kFull;
  RootComposition composition = RootComposition::kRotational;
  RetargetSettings retarget;
  RewardConfig reward;
  CurriculumState curriculum = CurriculumState::defaults();
  SuccessConfig success;

  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;
  bool timings = false;  // write timings.json (not byte-stable)

  // Throws InvalidInput / ConfigError, including for missing input files.
  void validate() const;
};

// Every key understood by pipeline_config(), for unknown-key checks.
const std::set<std::string>& pipeline_keys();
PipelineConfig pipeline_config(const io::KvConfig& kv, PipelineConfig base = {});

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct PipelineResult {
  ContactSet contacts;
  ShapeFitResult shape;
  io::OffsetRecord offset;
  std::array<RobotReferenceMotion, 2> refs;
  std::vector<RewardBreakdown> rewards;
  EpisodeReport report;
  double contact_f1_before = 0.0;  // re-detected masks vs reference, unaligned
  double contact_f1_after = 0.0;   // after applying the offset
  std::vector<StageTiming> timings;
  double total_seconds = 0.0;
};

// contacts.jsonl, beta.json, offset.json, refA.json, refB.json, report.json,
// report.csv, rewards.csv (with a rollout) and manifest.json in out_dir. A
// failing stage leaves what was written so far plus a manifest naming the
// stage, then rethrows with the stage name prepended.
PipelineResult run_pipeline(const PipelineConfig& config);

// ---- stages, shared with the CLI verbs ----

// Centroid-gap bookkeeping around the optimizer. No contacts gives a zero
// offset with no_contact set.
io::OffsetRecord root_stage(const BodyTemplate& body, const Eigen::VectorXd& beta_prime,
                            const HumanMotion& motion_a, const HumanMotion& motion_b,
                            const ContactSet& contacts, RootOptMode mode,
                            RootComposition composition);

std::array<RobotReferenceMotion, 2> retarget_stage(const BodyTemplate& body,
                                                   const RobotModel& robot,
                                                   const Eigen::VectorXd& beta_prime,
                                                   const HumanMotion& aligned_a,
                                                   const HumanMotion& motion_b,
                                                   const ContactSet& contacts,
                                                   const RetargetSettings& settings = {});

// Fills absent reference fields of rollout frames from completed references.
void fill_rollout_reference(std::vector<RolloutFrame>& frames,
                            const std::array<RobotReferenceMotion, 2>& refs,
                            const RobotModel& robot);

// Per-frame breakdowns; `total` is weighted by the curriculum scales.
std::vector<RewardBreakdown> rewards_stage(const std::vector<RolloutFrame>& frames,
                                           const RewardConfig& reward,
                                           const CurriculumState& curriculum);

// Retarget fidelity: robot keypoint links against the shaped human
// keypoints, the robot root against the human root, and re-detected contact
// masks against the reference masks.
EpisodeReport retarget_report(const BodyTemplate& body, const RobotModel& robot,
                              const Eigen::VectorXd& beta_prime,
                              const std::array<HumanMotion, 2>& motions,
                              const std::array<RobotReferenceMotion, 2>& refs,
                              const std::array<Eigen::MatrixXi, 2>& detected_masks,
                              const SuccessConfig& config);

}  // namespace duet

#endif  // DUET_PIPELINE_HPP_
