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

#ifndef DUET_IO_HPP_
#define DUET_IO_HPP_

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "duet/body_model.hpp"
#include "duet/contact.hpp"
#include "duet/curriculum.hpp"
#include "duet/metrics.hpp"
#include "duet/retarget.hpp"
#include "duet/rewards.hpp"
#include "duet/root_opt.hpp"
#include "duet/shape_fit.hpp"

namespace duet::io {

using Json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr const char* kBodyFormat = "harmanoid-body/1";

// Sorted keys, no whitespace, doubles printed with 17 significant digits,
// integers as integers. Throws InvalidInput on NaN or infinity.
std::string canonical_json(const Json& value);
// Same, newline-terminated, one JSON document per line per element.
std::string canonical_json_lines(const std::vector<Json>& records);
// Locale-independent %.17g, used by the CSV writers too.
std::string format_double(double x);

std::string read_text(const fs::path& path);
// Writes to a temporary sibling and renames, so readers never see a torn file.
void write_text(const fs::path& path, const std::string& text);

Json parse_json(const std::string& text, const std::string& what);

// BodyTemplate
Json body_to_json(const BodyTemplate& body);
BodyTemplate body_from_json(const Json& j);
void save_body(const fs::path& path, const BodyTemplate& body);
BodyTemplate load_body(const fs::path& path);

// HumanMotion: beta, dt, theta (T x J_body x 3), root_t, root_r.
Json motion_to_json(const HumanMotion& motion);
HumanMotion motion_from_json(const Json& j);
void save_motion(const fs::path& path, const HumanMotion& motion);
HumanMotion load_motion(const fs::path& path);

Json robot_to_json(const RobotModel& robot);
RobotModel robot_from_json(const Json& j);
void save_robot(const fs::path& path, const RobotModel& robot);
RobotModel load_robot(const fs::path& path);

// One line per frame: {"epsilon", "pairs": [[fa, fb, dist], ...], "t"}.
void save_contacts(const fs::path& path, const ContactSet& contacts);
ContactSet load_contacts(const fs::path& path);

struct ShapeFitRecord {
  Eigen::VectorXd beta_prime;
  double lambda = 0.0;
  double final_loss = 0.0;
  double keypoint_loss = 0.0;
  double reg_loss = 0.0;
  int iterations = 0;
  bool converged = false;
};
ShapeFitRecord shape_record(const ShapeFitResult& result, double lambda);
void save_beta(const fs::path& path, const ShapeFitRecord& record);
ShapeFitRecord load_beta(const fs::path& path);

struct OffsetRecord {
  RootOffset offset;
  std::string mode = "rotational";  // composition used when applying
  bool translation_only = false;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  int iterations = 0;
  bool no_contact = false;
  double gap_before = 0.0;  // mean centroid gap, m
  double gap_after = 0.0;
};
void save_offset(const fs::path& path, const OffsetRecord& record);
OffsetRecord load_offset(const fs::path& path);
RootComposition parse_composition(const std::string& name);

// dt, theta_hat, root {position, rotation}, contact_mask, diverged_frames.
// Derived quantities are not stored; the robot overload regenerates them.
Json reference_to_json(const RobotReferenceMotion& ref);
RobotReferenceMotion reference_from_json(const Json& j);
void save_reference(const fs::path& path, const RobotReferenceMotion& ref);
RobotReferenceMotion load_reference(const fs::path& path);
RobotReferenceMotion load_reference(const fs::path& path, const RobotModel& robot);

// Rollout lines carry "t", "keypoints", "contact_forces" and optionally
// "ref_keypoints", "ref_contact_mask", "dof_pos", "dof_vel", "ref_dof_pos",
// "ref_dof_vel", each as a two-element array (agent 0, agent 1). Absent
// fields load as empty.
Json rollout_frame_to_json(const RolloutFrame& frame);
RolloutFrame rollout_frame_from_json(const Json& j);
void save_rollout(const fs::path& path, const std::vector<RolloutFrame>& frames);
std::vector<RolloutFrame> load_rollout(const fs::path& path);

void save_rewards_csv(const fs::path& path, const std::vector<RolloutFrame>& frames,
                      const std::vector<RewardBreakdown>& rewards);

Json report_to_json(const EpisodeReport& report, const SuccessConfig& config);
void save_report(const fs::path& json_path, const EpisodeReport& report,
                 const SuccessConfig& config);
void save_report_curves(const fs::path& csv_path, const EpisodeReport& report);

// Flat "key = value" file; '#' starts a comment, values may be quoted.
class KvConfig {
 public:
  static KvConfig parse(const std::string& text, const std::string& origin = "config");
  static KvConfig load(const fs::path& path);

  bool has(const std::string& key) const { return values_.contains(key); }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  const std::map<std::string, std::string>& values() const { return values_; }
  // Keys with the given prefix, prefix stripped.
  std::map<std::string, std::string> with_prefix(const std::string& prefix) const;
  // Throws ConfigError naming the first key that is neither in `known` nor
  // starts with one of `known_prefixes`.
  void check_known(const std::set<std::string>& known,
                   const std::vector<std::string>& known_prefixes = {}) const;

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

// Overlay config values on the given defaults.
RewardConfig reward_config(const KvConfig& kv, RewardConfig base = {});
CurriculumState curriculum_config(const KvConfig& kv,
                                  CurriculumState base = CurriculumState::defaults());
SuccessConfig success_config(const KvConfig& kv, SuccessConfig base = {});
ShapeFitConfig shape_fit_config(const KvConfig& kv, ShapeFitConfig base = {});
const std::set<std::string>& reward_keys();
const std::set<std::string>& success_keys();
const std::set<std::string>& shape_fit_keys();
const std::set<std::string>& curriculum_keys();
// "scale." and "class." entries.
const std::vector<std::string>& curriculum_prefixes();

// Proficiency trace: CSV with a header holding an "s" column (proficiency)
// or a "mean_vel_reward" column. Returns the named column.
struct ProficiencyTrace {
  bool is_proficiency = true;  // false: values are mean velocity rewards
  std::vector<double> values;
};
ProficiencyTrace load_trace_csv(const fs::path& path);

struct ScaleRow {
  int iteration = 0;
  double s = 0.0;
  double alpha = 1.0;
  bool clamped = false;
  std::map<std::string, double> scales;
};
void save_scales_csv(const fs::path& path, const std::vector<ScaleRow>& rows);

}  // namespace duet::io

#endif  // DUET_IO_HPP_
