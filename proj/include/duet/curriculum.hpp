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

#ifndef DUET_CURRICULUM_HPP_
#define DUET_CURRICULUM_HPP_

#include <map>
#include <string>

#include "duet/rewards.hpp"

namespace duet {

enum class TermClass { kTracking, kInteraction };

// Reward scales adjusted online from tracking proficiency. Single owner:
// update_scales returns a new state, readers must not race an update.
struct CurriculumState {
  std::map<std::string, double> scales;
  std::map<std::string, TermClass> term_class;
  std::string gamma_vel_key = "tracking";
  double min_scale = 1e-4;
  double max_scale = 1e4;

  // "tracking" (tracking class), "interaction" and "contact" (interaction
  // class), all at 1.0, with "tracking" as the velocity scale.
  static CurriculumState defaults();

  // Throws ConfigError on a missing class, non-positive scale or a velocity
  // key that is not a tracking term.
  void validate() const;
};

// s = mean velocity reward / velocity scale
double proficiency(double mean_vel_reward, const CurriculumState& state);

// 1 below unit proficiency, 1/sqrt(s) from there on.
double gain(double s);

struct ScaleUpdate {
  CurriculumState state;
  double alpha = 1.0;
  bool clamped = false;  // some scale hit [min_scale, max_scale]
};

// Tracking scales times alpha(s), interaction scales divided by it.
ScaleUpdate update_scales(const CurriculumState& state, double s);

// w_trk r_goal + w_int r_int + w_con (r_con - w_pen p_con), with the weights
// read from the "tracking", "interaction" and "contact" scales.
double total_reward(const RewardBreakdown& breakdown, const CurriculumState& state,
                    double w_pen = 1.0);

}  // namespace duet

#endif  // DUET_CURRICULUM_HPP_
