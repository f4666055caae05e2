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

#ifndef DUET_FIXTURES_HPP_
#define DUET_FIXTURES_HPP_

// Procedural stand-ins for licensed body assets and captured interactions.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "duet/body_model.hpp"
#include "duet/retarget.hpp"
#include "duet/rewards.hpp"
#include "duet/root_opt.hpp"

namespace duet::fixtures {

// mt19937_64 with explicit transforms so streams match across standard
// libraries (the std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();                 // [0, 1)
  double uniform(double lo, double hi);
  double normal();                  // Box-Muller
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Joint indices of the synthetic body (SMPL order).
enum Joint : int {
  kPelvis = 0, kLHip, kRHip, kSpine1, kLKnee, kRKnee, kSpine2, kLAnkle, kRAnkle,
  kSpine3, kLFoot, kRFoot, kNeck, kLCollar, kRCollar, kHead, kLShoulder,
  kRShoulder, kLElbow, kRElbow, kLWrist, kRWrist, kNumJoints
};

// Low-poly humanoid: one 8-sided, 3-ring capped cylinder per joint, 10 shape
// directions (stature, arm, leg, shoulder width, hip width, girth, torso,
// forearm, shin, head). z up, x forward, y left. Built once.
const BodyTemplate& synthetic_body();

// 19-DOF humanoid in the layout of the Unitree H1 (legs 5 DOF each, torso
// yaw, arms 4 DOF each), arms laid out in a T at zero angles to match the
// template's rest pose. Part labels come from `body`.
RobotModel h1_robot(const BodyTemplate& body);

enum class Scenario { kHandshake, kShoulderToShoulder, kLinkedArms, kHug, kSeparated };
Scenario parse_scenario(const std::string& name);
std::string scenario_name(Scenario s);

struct FixtureSpec {
  Scenario scenario = Scenario::kHandshake;
  int frames = 30;
  double noise = 0.0;         // m, std of per-frame root jitter on both agents
  double misalignment = 0.0;  // m, agent-1 root pulled back from the partner

  void validate() const;
};

struct FixturePair {
  HumanMotion a;
  HumanMotion b;
  // Frames designed to be in contact, inclusive; empty (lo > hi) when none.
  int window_lo = 0;
  int window_hi = -1;
};

// Deterministic pair with the scenario's contact pattern: the partners touch
// during the middle third of the clip and stand clear before and after.
FixturePair generate_fixture(const BodyTemplate& body, const FixtureSpec& spec,
                             std::uint64_t seed);
FixturePair generate_fixture(const FixtureSpec& spec, std::uint64_t seed);

// Two posed bodies with random small poses, placed so they usually overlap.
std::pair<PosedMesh, PosedMesh> random_mesh_pair(const BodyTemplate& body, Rng& rng);

// Centroid pairs generated by an exact rigid offset whose rotation vector
// components are multiples of 0.5 degrees and whose translation is in whole
// millimeters.
struct RootFixture {
  std::vector<CentroidPair> pairs;
  Eigen::MatrixX3d pivots;
  RootOffset truth;
};
RootFixture rotated_contact_fixture(std::uint64_t seed);

// Random centroid pairs with noise, for the closed-form translation check.
RootFixture random_centroid_pairs(Rng& rng, int frames, int pairs_per_frame);

// Rollout frames tracking the references with Gaussian keypoint and joint
// noise; forces are in-band on masked links and small elsewhere.
std::vector<RolloutFrame> synthetic_rollout(const std::array<RobotReferenceMotion, 2>& refs,
                                            const RobotModel& robot, double noise,
                                            std::uint64_t seed);

}  // namespace duet::fixtures

#endif  // DUET_FIXTURES_HPP_
