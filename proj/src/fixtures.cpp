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

#include "duet/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "duet/contact.hpp"
#include "duet/errors.hpp"

namespace duet::fixtures {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  while (u == 0.0) u = uniform();
  const double v = uniform();
  const double r = std::sqrt(-2.0 * std::log(u));
  const double phi = 2.0 * std::numbers::pi * v;
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kSides = 8;
constexpr int kRings = 3;
constexpr int kVertsPerSegment = kSides * kRings + 2;
constexpr int kNumShapes = 10;

const std::array<int, kNumJoints> kParents = {-1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7,
                                              8,  9, 9, 9, 12, 13, 14, 16, 17, 18, 19};

const std::array<const char*, kNumJoints> kNames = {
    "pelvis",  "l_hip",      "r_hip",      "spine1",  "l_knee",   "r_knee",
    "spine2",  "l_ankle",    "r_ankle",    "spine3",  "l_foot",   "r_foot",
    "neck",    "l_collar",   "r_collar",   "head",    "l_shoulder", "r_shoulder",
    "l_elbow", "r_elbow",    "l_wrist",    "r_wrist"};

Vec3 rest_joint(int j) {
  static const std::array<Vec3, kNumJoints> p = {
      Vec3(0, 0, 0.95),      Vec3(0, 0.09, 0.88),   Vec3(0, -0.09, 0.88),
      Vec3(0, 0, 1.05),      Vec3(0, 0.09, 0.50),   Vec3(0, -0.09, 0.50),
      Vec3(0, 0, 1.18),      Vec3(0, 0.09, 0.08),   Vec3(0, -0.09, 0.08),
      Vec3(0, 0, 1.30),      Vec3(0.12, 0.09, 0.02), Vec3(0.12, -0.09, 0.02),
      Vec3(0, 0, 1.50),      Vec3(0, 0.07, 1.42),   Vec3(0, -0.07, 1.42),
      Vec3(0, 0, 1.62),      Vec3(0, 0.18, 1.42),   Vec3(0, -0.18, 1.42),
      Vec3(0, 0.45, 1.42),   Vec3(0, -0.45, 1.42),  Vec3(0, 0.70, 1.42),
      Vec3(0, -0.70, 1.42)};
  return p[j];
}

struct Segment {
  int owner;
  int end_joint;  // -1: leaf, the end point stays in the owner's region
  Vec3 end;
  double radius;
};

std::vector<Segment> segments() {
  auto to = [](int owner, int child, double r) {
    return Segment{owner, child, rest_joint(child), r};
  };
  auto leaf = [](int owner, const Vec3& delta, double r) {
    return Segment{owner, -1, rest_joint(owner) + delta, r};
  };
  return {to(kPelvis, kSpine1, 0.12),      to(kLHip, kLKnee, 0.07),
          to(kRHip, kRKnee, 0.07),         to(kSpine1, kSpine2, 0.12),
          to(kLKnee, kLAnkle, 0.05),       to(kRKnee, kRAnkle, 0.05),
          to(kSpine2, kSpine3, 0.12),      to(kLAnkle, kLFoot, 0.04),
          to(kRAnkle, kRFoot, 0.04),       to(kSpine3, kNeck, 0.13),
          leaf(kLFoot, Vec3(0.08, 0, 0), 0.035), leaf(kRFoot, Vec3(0.08, 0, 0), 0.035),
          to(kNeck, kHead, 0.05),          to(kLCollar, kLShoulder, 0.05),
          to(kRCollar, kRShoulder, 0.05),  leaf(kHead, Vec3(0, 0, 0.18), 0.09),
          to(kLShoulder, kLElbow, 0.045),  to(kRShoulder, kRElbow, 0.045),
          to(kLElbow, kLWrist, 0.04),      to(kRElbow, kRWrist, 0.04),
          leaf(kLWrist, Vec3(0, 0.15, 0), 0.035), leaf(kRWrist, Vec3(0, -0.15, 0), 0.035)};
}

bool in(int j, std::initializer_list<int> set) {
  return std::find(set.begin(), set.end(), j) != set.end();
}

int side(int left, int right, int region) { return rest_joint(region).y() > 0 ? left : right; }

// Displacement of point p in joint region j for a unit shape coefficient b.
Vec3 shape_field(int b, int j, const Vec3& p) {
  const Vec3 ey(0, 1, 0), ez(0, 0, 1);
  const double sgn = rest_joint(j).y() > 0 ? 1.0 : (rest_joint(j).y() < 0 ? -1.0 : 0.0);
  switch (b) {
    case 0:
      return 0.05 * p.z() * ez;
    case 1:
      if (in(j, {kLElbow, kRElbow, kLWrist, kRWrist})) {
        return 0.1 * (p - rest_joint(side(kLShoulder, kRShoulder, j)));
      }
      break;
    case 2:
      if (in(j, {kLKnee, kRKnee, kLAnkle, kRAnkle, kLFoot, kRFoot})) {
        return 0.1 * (p - rest_joint(side(kLHip, kRHip, j)));
      }
      break;
    case 3:
      if (in(j, {kLCollar, kRCollar, kLShoulder, kRShoulder, kLElbow, kRElbow, kLWrist,
                 kRWrist})) {
        return 0.03 * sgn * ey;
      }
      break;
    case 4:
      if (in(j, {kLHip, kRHip, kLKnee, kRKnee, kLAnkle, kRAnkle, kLFoot, kRFoot})) {
        return 0.02 * sgn * ey;
      }
      break;
    case 6:
      if (in(j, {kSpine1, kSpine2, kSpine3, kNeck, kLCollar, kRCollar, kHead, kLShoulder,
                 kRShoulder, kLElbow, kRElbow, kLWrist, kRWrist})) {
        return 0.1 * (p.z() - 0.95) * ez;
      }
      break;
    case 7:
      if (in(j, {kLWrist, kRWrist})) return 0.1 * (p - rest_joint(side(kLElbow, kRElbow, j)));
      break;
    case 8:
      if (in(j, {kLAnkle, kRAnkle, kLFoot, kRFoot})) {
        return 0.1 * (p - rest_joint(side(kLKnee, kRKnee, j)));
      }
      break;
    case 9:
      if (j == kHead) return 0.1 * (p - rest_joint(kNeck));
      break;
    default:
      break;
  }
  return Vec3::Zero();
}

BodyTemplate build_body() {
  const std::vector<Segment> segs = segments();
  const int nseg = static_cast<int>(segs.size());
  const int nv = nseg * kVertsPerSegment;
  const int nf = nseg * (2 * kSides * (kRings - 1) + 2 * kSides);

  Points vertices(nv, 3);
  Faces faces(nf, 3);
  std::vector<Points> shapes(kNumShapes, Points::Zero(nv, 3));
  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(nv, kNumJoints);
  Eigen::MatrixXd regressor = Eigen::MatrixXd::Zero(kNumJoints, nv);

  int f = 0;
  for (int s = 0; s < nseg; ++s) {
    const Segment& seg = segs[s];
    const int j = seg.owner;
    const Vec3 a = rest_joint(j);
    const Vec3 axis = (seg.end - a).normalized();
    const Vec3 helper = std::abs(axis.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
    const Vec3 e1 = axis.cross(helper).normalized();
    const Vec3 e2 = axis.cross(e1);
    const int base = s * kVertsPerSegment;
    const int end_region = seg.end_joint >= 0 ? seg.end_joint : j;

    auto place = [&](int v, const Vec3& p, double t, const Vec3& radial) {
      vertices.row(v) = p.transpose();
      for (int b = 0; b < kNumShapes; ++b) {
        Vec3 d = (1.0 - t) * shape_field(b, j, a) + t * shape_field(b, end_region, seg.end);
        if (b == 5) d += 0.01 * radial;
        shapes[b].row(v) = d.transpose();
      }
      if (t == 0.0 && j != kPelvis) {
        weights(v, j) = 0.5;
        weights(v, kParents[j]) = 0.5;
      } else {
        weights(v, j) = 1.0;
      }
    };

    for (int r = 0; r < kRings; ++r) {
      const double t = 0.5 * r;
      const Vec3 c = a + t * (seg.end - a);
      for (int i = 0; i < kSides; ++i) {
        const double phi = 2.0 * kPi * i / kSides;
        const Vec3 radial = std::cos(phi) * e1 + std::sin(phi) * e2;
        const int v = base + r * kSides + i;
        place(v, c + seg.radius * radial, t, radial);
        if (r == 0) regressor(j, v) = 1.0 / kSides;
      }
    }
    const int cap0 = base + kRings * kSides;
    const int cap1 = cap0 + 1;
    place(cap0, a, 0.0, Vec3::Zero());
    place(cap1, seg.end, 1.0, Vec3::Zero());

    auto ring = [&](int r, int i) { return base + r * kSides + (i % kSides); };
    for (int r = 0; r + 1 < kRings; ++r) {
      for (int i = 0; i < kSides; ++i) {
        faces.row(f++) << ring(r, i), ring(r, i + 1), ring(r + 1, i + 1);
        faces.row(f++) << ring(r, i), ring(r + 1, i + 1), ring(r + 1, i);
      }
    }
    for (int i = 0; i < kSides; ++i) {
      faces.row(f++) << cap0, ring(0, i + 1), ring(0, i);
      faces.row(f++) << cap1, ring(kRings - 1, i), ring(kRings - 1, i + 1);
    }
  }

  std::vector<int> parents(kParents.begin(), kParents.end());
  std::vector<std::string> names(kNames.begin(), kNames.end());
  return BodyTemplate::create(std::move(vertices), std::move(faces), std::move(shapes),
                              std::move(weights), std::move(regressor), std::move(parents),
                              std::move(names));
}

Vec3 deg(double x, double y, double z) {
  return Vec3(x, y, z) * (kPi / 180.0);
}

}  // namespace

const BodyTemplate& synthetic_body() {
  static const BodyTemplate body = build_body();
  return body;
}

RobotModel h1_robot(const BodyTemplate& body) {
  RobotModel r;
  const Vec3 x(1, 0, 0), y(0, 1, 0), z(0, 0, 1), none = Vec3::Zero();
  int dof = 0;
  auto add = [&](const std::string& name, int parent, const Vec3& offset, const Vec3& axis,
                 double lo, double hi) {
    RobotLink l{name, parent, offset, axis, -1};
    if (axis != none) {
      l.dof = dof++;
      r.joint_limits.emplace_back(lo, hi);
    }
    r.links.push_back(l);
    return static_cast<int>(r.links.size()) - 1;
  };

  const int pelvis = add("pelvis", -1, none, none, 0, 0);
  int leg[2][6];
  for (int s = 0; s < 2; ++s) {
    const double sy = s == 0 ? 1.0 : -1.0;
    const std::string p = s == 0 ? "left_" : "right_";
    leg[s][0] = add(p + "hip_yaw", pelvis, Vec3(0, sy * 0.0875, -0.1742), z, -0.43, 0.43);
    leg[s][1] = add(p + "hip_roll", leg[s][0], Vec3(0.039468, 0, 0), x, -0.43, 0.43);
    leg[s][2] = add(p + "hip_pitch", leg[s][1], Vec3(0, sy * 0.11536, 0), y, -3.14, 2.53);
    leg[s][3] = add(p + "knee", leg[s][2], Vec3(0, 0, -0.4), y, -0.26, 2.05);
    leg[s][4] = add(p + "ankle", leg[s][3], Vec3(0, 0, -0.4), y, -0.87, 0.52);
    leg[s][5] = add(p + "toe", leg[s][4], Vec3(0.12, 0, -0.05), none, 0, 0);
  }
  const int torso = add("torso", pelvis, none, z, -2.35, 2.35);
  const int head = add("head", torso, Vec3(0, 0, 0.65), none, 0, 0);
  int arm[2][5];
  for (int s = 0; s < 2; ++s) {
    const double sy = s == 0 ? 1.0 : -1.0;
    const std::string p = s == 0 ? "left_" : "right_";
    // Arm chain along +-y at zero: pitch swings forward (z), roll lifts (x),
    // yaw twists (y), elbow bends forward (z).
    arm[s][0] = add(p + "shoulder_pitch", torso, Vec3(0.0055, sy * 0.15535, 0.42999), z,
                    -2.87, 2.87);
    arm[s][1] = add(p + "shoulder_roll", arm[s][0], Vec3(-0.0055, sy * 0.0565, -0.0165), x,
                    -3.11, 3.11);
    arm[s][2] = add(p + "shoulder_yaw", arm[s][1], Vec3(0, sy * 0.1343, 0), y, -4.45, 1.3);
    arm[s][3] = add(p + "elbow", arm[s][2], Vec3(0.0185, sy * 0.198, 0), z, -2.5, 2.5);
    arm[s][4] = add(p + "hand", arm[s][3], Vec3(0, sy * 0.3, 0), none, 0, 0);
  }

  auto kp = [&](int human, int link) { r.keypoint_map.push_back({human, link}); };
  kp(kPelvis, pelvis);
  kp(kHead, head);
  kp(kLShoulder, arm[0][1]);
  kp(kRShoulder, arm[1][1]);
  kp(kLElbow, arm[0][3]);
  kp(kRElbow, arm[1][3]);
  kp(kLWrist, arm[0][4]);
  kp(kRWrist, arm[1][4]);
  kp(kLHip, leg[0][2]);
  kp(kRHip, leg[1][2]);
  kp(kLKnee, leg[0][3]);
  kp(kRKnee, leg[1][3]);
  kp(kLAnkle, leg[0][4]);
  kp(kRAnkle, leg[1][4]);
  kp(kLFoot, leg[0][5]);
  kp(kRFoot, leg[1][5]);

  r.part_labels = part_labels_from_skinning(body);
  r.part_to_link = {{kPelvis, pelvis},         {kLHip, leg[0][2]},     {kRHip, leg[1][2]},
                    {kSpine1, torso},          {kLKnee, leg[0][3]},    {kRKnee, leg[1][3]},
                    {kSpine2, torso},          {kLAnkle, leg[0][4]},   {kRAnkle, leg[1][4]},
                    {kSpine3, torso},          {kLFoot, leg[0][5]},    {kRFoot, leg[1][5]},
                    {kNeck, head},             {kLCollar, torso},      {kRCollar, torso},
                    {kHead, head},             {kLShoulder, arm[0][2]}, {kRShoulder, arm[1][2]},
                    {kLElbow, arm[0][3]},      {kRElbow, arm[1][3]},   {kLWrist, arm[0][4]},
                    {kRWrist, arm[1][4]}};
  r.upper_body_links = {head, arm[0][1], arm[1][1], arm[0][3], arm[1][3], arm[0][4], arm[1][4]};
  r.feet_links = {leg[0][4], leg[0][5], leg[1][4], leg[1][5]};
  r.validate(body);
  return r;
}

Scenario parse_scenario(const std::string& name) {
  if (name == "handshake") return Scenario::kHandshake;
  if (name == "shoulder_to_shoulder") return Scenario::kShoulderToShoulder;
  if (name == "linked_arms") return Scenario::kLinkedArms;
  if (name == "hug") return Scenario::kHug;
  if (name == "separated") return Scenario::kSeparated;
  throw InvalidInput("unknown scenario '" + name +
                     "' (handshake|shoulder_to_shoulder|linked_arms|hug|separated)");
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::kHandshake: return "handshake";
    case Scenario::kShoulderToShoulder: return "shoulder_to_shoulder";
    case Scenario::kLinkedArms: return "linked_arms";
    case Scenario::kHug: return "hug";
    case Scenario::kSeparated: return "separated";
  }
  return "unknown";
}

void FixtureSpec::validate() const {
  if (frames < 2) throw InvalidInput("fixture needs at least 2 frames");
  if (!(noise >= 0.0)) throw InvalidInput("fixture noise must be >= 0");
  if (!(misalignment >= 0.0)) throw InvalidInput("fixture misalignment must be >= 0");
}

namespace {

// Static pose of one agent plus where the partner sits.
struct Layout {
  Eigen::VectorXd pose_a;
  Eigen::VectorXd pose_b;
  Vec3 rot_b;      // partner root rotation
  Vec3 approach;   // unit direction from agent 1 to the partner
};

void set_joint(Eigen::VectorXd& pose, int joint, const Vec3& rotvec) {
  pose.segment<3>(3 * (joint - 1)) = rotvec;
}

Layout layout_for(Scenario s) {
  Layout l;
  l.pose_a = Eigen::VectorXd::Zero(3 * (kNumJoints - 1));
  l.pose_b = l.pose_a;
  l.rot_b = Vec3::Zero();
  l.approach = Vec3(1, 0, 0);
  switch (s) {
    case Scenario::kHandshake:
      // Right arms reach forward and slightly inward.
      set_joint(l.pose_a, kRShoulder, deg(0, 0, 109));
      l.pose_b = l.pose_a;
      l.rot_b = deg(0, 0, 180);
      break;
    case Scenario::kShoulderToShoulder:
      // Side by side with the arms hanging straight down, touching along
      // their length.
      set_joint(l.pose_a, kLShoulder, deg(-90, 0, 0));
      set_joint(l.pose_a, kRShoulder, deg(90, 0, 0));
      l.pose_b = l.pose_a;
      l.approach = Vec3(0, 1, 0);
      break;
    case Scenario::kLinkedArms:
      // Side by side; the inner arms swing forward and the forearms run
      // alongside each other.
      set_joint(l.pose_a, kLShoulder, deg(0, 0, -30));
      set_joint(l.pose_a, kLElbow, deg(0, 0, -45));
      set_joint(l.pose_b, kRShoulder, deg(0, 0, 30));
      set_joint(l.pose_b, kRElbow, deg(0, 0, 45));
      l.approach = Vec3(0, 1, 0);
      break;
    case Scenario::kHug:
      set_joint(l.pose_a, kLShoulder, deg(0, 0, -75));
      set_joint(l.pose_a, kRShoulder, deg(0, 0, 75));
      set_joint(l.pose_a, kLElbow, deg(0, 0, -50));
      set_joint(l.pose_a, kRElbow, deg(0, 0, 50));
      l.pose_b = l.pose_a;
      l.rot_b = deg(0, 0, 180);
      break;
    case Scenario::kSeparated:
      l.rot_b = deg(0, 0, 180);
      break;
  }
  return l;
}

bool touching(const BodyTemplate& body, const Layout& l, double d) {
  const Eigen::VectorXd beta = Eigen::VectorXd::Zero(body.num_shapes());
  const PosedMesh a = pose_body(body, beta, l.pose_a, Vec3::Zero(), Vec3::Zero());
  const PosedMesh b = pose_body(body, beta, l.pose_b, d * l.approach, l.rot_b);
  return !collision_pairs(a, b, 0.0).empty();
}

// Partner distance at which the rest-shaped bodies first touch.
double touch_distance(const BodyTemplate& body, const Layout& l) {
  double far = 3.0;
  if (touching(body, l, far)) throw StageFailure("fixture layout touches at 3 m");
  double near = far;
  while (!touching(body, l, near)) {
    near -= 0.05;
    if (near <= 0.0) throw StageFailure("fixture layout never touches");
  }
  far = near + 0.05;
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (near + far);
    (touching(body, l, mid) ? near : far) = mid;
  }
  return far;
}

}  // namespace

FixturePair generate_fixture(const BodyTemplate& body, const FixtureSpec& spec,
                             std::uint64_t seed) {
  spec.validate();
  if (body.num_joints() != kNumJoints) {
    throw InvalidInput("fixtures need the synthetic 22-joint body layout");
  }
  const int T = spec.frames;
  const Layout l = layout_for(spec.scenario);
  FixturePair out;
  for (HumanMotion* m : {&out.a, &out.b}) {
    m->beta = Eigen::VectorXd::Zero(body.num_shapes());
    m->theta.resize(T, l.pose_a.size());
    m->root_translation = Eigen::MatrixX3d::Zero(T, 3);
    m->root_rotation = Eigen::MatrixX3d::Zero(T, 3);
    m->dt = 1.0 / 30.0;
  }
  for (int t = 0; t < T; ++t) {
    out.a.theta.row(t) = l.pose_a.transpose();
    out.b.theta.row(t) = l.pose_b.transpose();
    out.b.root_rotation.row(t) = l.rot_b.transpose();
  }

  if (spec.scenario == Scenario::kSeparated) {
    for (int t = 0; t < T; ++t) out.b.root_translation.row(t) = Vec3(5.0, 0, 0).transpose();
  } else {
    out.window_lo = T / 3;
    out.window_hi = (2 * T) / 3;
    const double touch = touch_distance(body, l);
    const double mid = 0.5 * (out.window_lo + out.window_hi);
    const double half = std::max(0.5 * (out.window_hi - out.window_lo), 1.0);
    for (int t = 0; t < T; ++t) {
      double d = touch + 0.12;  // clear of the partner
      if (t >= out.window_lo && t <= out.window_hi) {
        // Deepest overlap mid-window, shallower at the edges.
        d = touch - (0.015 + 0.02 * (1.0 - std::abs(t - mid) / half));
      }
      out.b.root_translation.row(t) = (d * l.approach).transpose();
    }
    for (int t = 0; t < T; ++t) {
      out.a.root_translation.row(t) -= (spec.misalignment * l.approach).transpose();
    }
  }

  if (spec.noise > 0.0) {
    Rng rng(seed);
    for (HumanMotion* m : {&out.a, &out.b}) {
      for (int t = 0; t < T; ++t) {
        for (int k = 0; k < 3; ++k) m->root_translation(t, k) += spec.noise * rng.normal();
      }
    }
  }
  return out;
}

FixturePair generate_fixture(const FixtureSpec& spec, std::uint64_t seed) {
  return generate_fixture(synthetic_body(), spec, seed);
}

std::pair<PosedMesh, PosedMesh> random_mesh_pair(const BodyTemplate& body, Rng& rng) {
  auto random_pose = [&] {
    Eigen::VectorXd pose(3 * body.num_body_joints());
    for (Eigen::Index i = 0; i < pose.size(); ++i) pose(i) = rng.uniform(-0.4, 0.4);
    return pose;
  };
  auto random_beta = [&] {
    Eigen::VectorXd beta(body.num_shapes());
    for (Eigen::Index i = 0; i < beta.size(); ++i) beta(i) = rng.uniform(-1.0, 1.0);
    return beta;
  };
  const Vec3 rot_a(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-kPi, kPi));
  const Vec3 rot_b(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-kPi, kPi));
  const Vec3 shift(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6), rng.uniform(-0.2, 0.2));
  PosedMesh a = pose_body(body, random_beta(), random_pose(), Vec3::Zero(), rot_a);
  PosedMesh b = pose_body(body, random_beta(), random_pose(), shift, rot_b);
  return {std::move(a), std::move(b)};
}

RootFixture rotated_contact_fixture(std::uint64_t seed) {
  Rng rng(seed);
  RootFixture fx;
  auto half_degrees = [&](int max_steps) {
    const int steps = static_cast<int>(rng.next() % (2 * max_steps + 1)) - max_steps;
    return steps * 0.5 * kPi / 180.0;
  };
  fx.truth.delta_theta = Vec3(half_degrees(20), half_degrees(20), half_degrees(20));
  for (int k = 0; k < 3; ++k) {
    fx.truth.delta_p[k] = (static_cast<int>(rng.next() % 201) - 100) * 1e-3;
  }
  const int frames = 12;
  fx.pivots.resize(frames, 3);
  for (int t = 0; t < frames; ++t) {
    const Vec3 pivot(0.02 * t, rng.uniform(-0.05, 0.05), 0.95);
    fx.pivots.row(t) = pivot.transpose();
    for (int i = 0; i < 4; ++i) {
      CentroidPair p;
      p.frame = t;
      p.c_a = pivot + Vec3(rng.uniform(0.2, 0.7), rng.uniform(-0.5, 0.5), rng.uniform(-0.6, 0.6));
      p.c_b = transform_centroid(p.c_a, pivot, fx.truth);
      fx.pairs.push_back(p);
    }
  }
  return fx;
}

RootFixture random_centroid_pairs(Rng& rng, int frames, int pairs_per_frame) {
  RootFixture fx;
  fx.pivots.resize(frames, 3);
  const Vec3 shift(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2));
  for (int t = 0; t < frames; ++t) {
    fx.pivots.row(t) = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), 0.95).transpose();
    for (int i = 0; i < pairs_per_frame; ++i) {
      CentroidPair p;
      p.frame = t;
      p.c_a = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0, 2));
      p.c_b = p.c_a + shift + 0.01 * Vec3(rng.normal(), rng.normal(), rng.normal());
      fx.pairs.push_back(p);
    }
  }
  fx.truth.delta_p = shift;
  return fx;
}

std::vector<RolloutFrame> synthetic_rollout(const std::array<RobotReferenceMotion, 2>& refs,
                                            const RobotModel& robot, double noise,
                                            std::uint64_t seed) {
  const std::size_t T = refs[0].num_frames();
  if (refs[1].num_frames() != T) throw InvalidInput("references differ in length");
  for (const auto& r : refs) {
    if (static_cast<std::size_t>(r.p_hat.rows()) != T) {
      throw InvalidInput("references must be completed before simulating rollouts");
    }
  }
  Rng rng(seed);
  const std::vector<int> links = robot.non_feet_links();
  const std::vector<int>& upper = robot.upper_body_links;
  const std::array<Eigen::MatrixXd, 2> qdots = {joint_velocities(refs[0]),
                                                joint_velocities(refs[1])};
  std::vector<RolloutFrame> frames(T);
  for (std::size_t t = 0; t < T; ++t) {
    RolloutFrame& f = frames[t];
    f.t = static_cast<int>(t);
    for (int a = 0; a < 2; ++a) {
      const RobotReferenceMotion& ref = refs[a];
      f.keypoints[a].resize(upper.size(), 3);
      f.ref_keypoints[a].resize(upper.size(), 3);
      for (std::size_t k = 0; k < upper.size(); ++k) {
        const Vec3 p = ref.link_position(t, upper[k]);
        f.ref_keypoints[a].row(k) = p.transpose();
        f.keypoints[a].row(k) =
            (p + noise * Vec3(rng.normal(), rng.normal(), rng.normal())).transpose();
      }
      f.contact_forces[a].resize(links.size());
      f.ref_contact_mask[a].resize(links.size());
      for (std::size_t k = 0; k < links.size(); ++k) {
        const int m = ref.contact_mask(t, links[k]);
        f.ref_contact_mask[a](k) = m;
        f.contact_forces[a](k) = m ? rng.uniform(20.0, 80.0) : rng.uniform(0.0, 1.0);
      }
      const Eigen::VectorXd q = ref.theta_hat.row(t).transpose();
      const Eigen::VectorXd qd = qdots[a].row(t).transpose();
      f.ref_dof_pos[a] = q;
      f.ref_dof_vel[a] = qd;
      f.dof_pos[a] = q;
      f.dof_vel[a] = qd;
      for (Eigen::Index i = 0; i < q.size(); ++i) {
        f.dof_pos[a](i) += noise * rng.normal();
        f.dof_vel[a](i) += noise * rng.normal();
      }
    }
  }
  return frames;
}

}  // namespace duet::fixtures
