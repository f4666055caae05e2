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

#include "duet/curriculum.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "duet/errors.hpp"

namespace duet {

CurriculumState CurriculumState::defaults() {
  CurriculumState s;
  s.scales = {{"tracking", 1.0}, {"interaction", 1.0}, {"contact", 1.0}};
  s.term_class = {{"tracking", TermClass::kTracking},
                  {"interaction", TermClass::kInteraction},
                  {"contact", TermClass::kInteraction}};
  s.gamma_vel_key = "tracking";
  return s;
}

void CurriculumState::validate() const {
  if (!(min_scale > 0.0 && min_scale <= max_scale)) {
    throw ConfigError("scale bounds must satisfy 0 < min <= max");
  }
  for (const auto& [name, value] : scales) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw ConfigError("scale '" + name + "' must be positive");
    }
    if (!term_class.contains(name)) {
      throw ConfigError("scale '" + name + "' has no term class");
    }
  }
  const auto it = term_class.find(gamma_vel_key);
  if (it == term_class.end() || !scales.contains(gamma_vel_key)) {
    throw ConfigError("velocity scale '" + gamma_vel_key + "' is not a known term");
  }
  if (it->second != TermClass::kTracking) {
    throw ConfigError("velocity scale '" + gamma_vel_key + "' must be a tracking term");
  }
}

double proficiency(double mean_vel_reward, const CurriculumState& state) {
  const auto it = state.scales.find(state.gamma_vel_key);
  if (it == state.scales.end()) {
    throw ConfigError("unknown velocity scale '" + state.gamma_vel_key + "'");
  }
  if (!(it->second > 0.0)) throw InvalidInput("velocity scale must be > 0");
  return mean_vel_reward / it->second;
}

double gain(double s) {
  if (!(s >= 0.0)) throw InvalidInput("proficiency must be >= 0");
  return s < 1.0 ? 1.0 : 1.0 / std::sqrt(s);
}

ScaleUpdate update_scales(const CurriculumState& state, double s) {
  ScaleUpdate out;
  out.state = state;
  out.alpha = gain(s);
  if (out.alpha == 1.0) return out;
  for (auto& [name, value] : out.state.scales) {
    const TermClass cls = state.term_class.at(name);
    const double next = cls == TermClass::kTracking ? value * out.alpha : value / out.alpha;
    const double bounded = std::clamp(next, state.min_scale, state.max_scale);
    if (bounded != next) {
      out.clamped = true;
      spdlog::debug("curriculum scale '{}' clamped to {}", name, bounded);
    }
    value = bounded;
  }
  return out;
}

double total_reward(const RewardBreakdown& b, const CurriculumState& state, double w_pen) {
  auto scale = [&](const char* key) {
    const auto it = state.scales.find(key);
    if (it == state.scales.end()) {
      throw ConfigError(std::string("curriculum has no '") + key + "' scale");
    }
    return it->second;
  };
  return scale("tracking") * b.r_goal + scale("interaction") * b.r_int +
         scale("contact") * (b.r_con - w_pen * b.p_con);
}

}  // namespace duet
