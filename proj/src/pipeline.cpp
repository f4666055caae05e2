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

#include "duet/pipeline.hpp"

#include <chrono>
#include <tuple>

#include <spdlog/spdlog.h>

#include "duet/errors.hpp"
#include "duet/simd/kernels.hpp"

namespace duet {
namespace fs = std::filesystem;

void PipelineConfig::validate() const {
  for (const auto& [path, what] : {std::pair{&template_path, "template"},
                                   std::pair{&robot_path, "robot"},
                                   std::pair{&motion_a, "motion_a"},
                                   std::pair{&motion_b, "motion_b"},
                                   std::pair{&rollout, "rollout"}}) {
    if (!path->empty() && !fs::exists(*path)) {
      throw InvalidInput(std::string(what) + " file '" + path->string() + "' does not exist");
    }
  }
  if (motion_a.empty() != motion_b.empty()) {
    throw ConfigError("give both motion_a and motion_b, or neither");
  }
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  if (rollout_noise && !(*rollout_noise >= 0.0)) throw ConfigError("rollout_noise must be >= 0");
  if (out_dir.empty()) throw ConfigError("an output directory is required");
  fixture.validate();
  shape.validate();
  reward.validate();
  curriculum.validate();
  success.validate();
}

const std::set<std::string>& pipeline_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> k{"template", "robot",        "motion_a",   "motion_b",
                            "rollout",  "rollout_noise", "scenario",  "frames",
                            "noise",    "misalignment", "epsilon",    "root_mode",
                            "composition", "retarget_max_iters"};
    for (const auto* set : {&io::reward_keys(), &io::success_keys(), &io::shape_fit_keys(),
                            &io::curriculum_keys()}) {
      k.insert(set->begin(), set->end());
    }
    return k;
  }();
  return keys;
}

PipelineConfig pipeline_config(const io::KvConfig& kv, PipelineConfig c) {
  kv.check_known(pipeline_keys(), io::curriculum_prefixes());
  auto path = [&](const char* key, fs::path& dst) {
    if (kv.has(key)) dst = kv.get_string(key, "");
  };
  path("template", c.template_path);
  path("robot", c.robot_path);
  path("motion_a", c.motion_a);
  path("motion_b", c.motion_b);
  path("rollout", c.rollout);
  if (kv.has("rollout_noise")) c.rollout_noise = kv.get_double("rollout_noise", 0.0);
  if (kv.has("scenario")) c.fixture.scenario = fixtures::parse_scenario(kv.get_string("scenario", ""));
  c.fixture.frames = kv.get_int("frames", c.fixture.frames);
  c.fixture.noise = kv.get_double("noise", c.fixture.noise);
  c.fixture.misalignment = kv.get_double("misalignment", c.fixture.misalignment);
  c.epsilon = kv.get_double("epsilon", c.epsilon);
  const std::string mode = kv.get_string("root_mode", "full");
  if (mode == "full") {
    c.root_mode = RootOptMode::kFull;
  } else if (mode == "translation_only") {
    c.root_mode = RootOptMode::kTranslationOnly;
  } else {
    throw ConfigError("root_mode must be full or translation_only");
  }
  c.composition = io::parse_composition(kv.get_string("composition", "rotational"));
  c.retarget.max_iters = kv.get_int("retarget_max_iters", c.retarget.max_iters);
  c.reward = io::reward_config(kv, c.reward);
  c.curriculum = io::curriculum_config(kv, c.curriculum);
  c.success = io::success_config(kv, c.success);
  c.shape = io::shape_fit_config(kv, c.shape);
  return c;
}

io::OffsetRecord root_stage(const BodyTemplate& body, const Eigen::VectorXd& beta_prime,
                            const HumanMotion& motion_a, const HumanMotion& motion_b,
                            const ContactSet& contacts, RootOptMode mode,
                            RootComposition composition) {
  io::OffsetRecord rec;
  rec.mode = composition == RootComposition::kAdditive ? "additive" : "rotational";
  rec.translation_only = mode == RootOptMode::kTranslationOnly;
  const std::vector<CentroidPair> pairs =
      contact_centroids(body, beta_prime, motion_a, motion_b, contacts);
  const Eigen::MatrixX3d pivots = root_pivots(body, beta_prime, motion_a);
  try {
    const RootOptResult r = optimize_root_offset(pairs, pivots, mode);
    rec.offset = r.offset;
    rec.initial_objective = r.initial_objective;
    rec.final_objective = r.final_objective;
    rec.iterations = r.iterations;
    rec.gap_before = mean_centroid_gap(pairs, pivots, RootOffset{});
    rec.gap_after = mean_centroid_gap(pairs, pivots, r.offset);
    spdlog::info("root offset: mean centroid gap {:.6f} -> {:.6f} m (delta {:.6f})",
                 rec.gap_before, rec.gap_after, rec.gap_before - rec.gap_after);
  } catch (const NoContact&) {
    rec.no_contact = true;
    spdlog::info("root offset: no contacts, keeping the zero offset");
  }
  return rec;
}

std::array<RobotReferenceMotion, 2> retarget_stage(const BodyTemplate& body,
                                                   const RobotModel& robot,
                                                   const Eigen::VectorXd& beta_prime,
                                                   const HumanMotion& aligned_a,
                                                   const HumanMotion& motion_b,
                                                   const ContactSet& contacts,
                                                   const RetargetSettings& settings) {
  const auto [mask_a, mask_b] = project_contact_mask(contacts, body, robot);
  std::array<RobotReferenceMotion, 2> refs = {
      retarget_motion(body, robot, beta_prime, aligned_a, mask_a, settings),
      retarget_motion(body, robot, beta_prime, motion_b, mask_b, settings)};
  for (int a = 0; a < 2; ++a) {
    if (!refs[a].diverged_frames.empty()) {
      spdlog::warn("agent {}: {} frame(s) kept the previous pose after divergence", a,
                   refs[a].diverged_frames.size());
    }
  }
  return refs;
}

void fill_rollout_reference(std::vector<RolloutFrame>& frames,
                            const std::array<RobotReferenceMotion, 2>& refs,
                            const RobotModel& robot) {
  const std::vector<int> links = robot.non_feet_links();
  const std::vector<int>& upper = robot.upper_body_links;
  const std::array<Eigen::MatrixXd, 2> qd = {joint_velocities(refs[0]),
                                             joint_velocities(refs[1])};
  for (RolloutFrame& f : frames) {
    for (int a = 0; a < 2; ++a) {
      const RobotReferenceMotion& ref = refs[a];
      if (f.t < 0 || static_cast<std::size_t>(f.t) >= ref.num_frames()) {
        throw InvalidInput("rollout frame t = " + std::to_string(f.t) +
                           " is outside the reference motion");
      }
      const auto t = static_cast<std::size_t>(f.t);
      if (f.ref_keypoints[a].rows() == 0) {
        f.ref_keypoints[a].resize(upper.size(), 3);
        for (std::size_t k = 0; k < upper.size(); ++k) {
          f.ref_keypoints[a].row(k) = ref.link_position(t, upper[k]).transpose();
        }
      }
      if (f.ref_contact_mask[a].size() == 0) {
        f.ref_contact_mask[a].resize(links.size());
        for (std::size_t k = 0; k < links.size(); ++k) {
          f.ref_contact_mask[a](k) = ref.contact_mask(f.t, links[k]);
        }
      }
      if (f.ref_dof_pos[a].size() == 0 && f.dof_pos[a].size() > 0) {
        f.ref_dof_pos[a] = ref.theta_hat.row(f.t).transpose();
      }
      if (f.ref_dof_vel[a].size() == 0 && f.dof_vel[a].size() > 0) {
        f.ref_dof_vel[a] = qd[a].row(f.t).transpose();
      }
    }
  }
}

std::vector<RewardBreakdown> rewards_stage(const std::vector<RolloutFrame>& frames,
                                           const RewardConfig& reward,
                                           const CurriculumState& curriculum) {
  std::vector<RewardBreakdown> out;
  out.reserve(frames.size());
  for (const RolloutFrame& f : frames) {
    RewardBreakdown b = reward_breakdown(f, reward);
    b.total = total_reward(b, curriculum, reward.w_pen);
    out.push_back(b);
  }
  return out;
}

EpisodeReport retarget_report(const BodyTemplate& body, const RobotModel& robot,
                              const Eigen::VectorXd& beta_prime,
                              const std::array<HumanMotion, 2>& motions,
                              const std::array<RobotReferenceMotion, 2>& refs,
                              const std::array<Eigen::MatrixXi, 2>& detected_masks,
                              const SuccessConfig& config) {
  config.validate();
  const std::size_t K = robot.keypoint_map.size();
  EpisodeReport out;
  const Eigen::Index T = static_cast<Eigen::Index>(refs[0].num_frames());
  out.gmpjpe_curve.resize(T, 2);
  out.mpjpe_curve.resize(T, 2);
  for (int a = 0; a < 2; ++a) {
    const HumanMotion& m = motions[a];
    const RobotReferenceMotion& ref = refs[a];
    if (static_cast<Eigen::Index>(m.num_frames()) != T ||
        static_cast<Eigen::Index>(ref.num_frames()) != T) {
      throw InvalidInput("report inputs differ in length");
    }
    Eigen::MatrixXd human(T, 3 * K), robot_kp(T, 3 * K);
    AnchorTrack human_anchor, robot_anchor;
    human_anchor.height.resize(T);
    robot_anchor.height.resize(T);
    for (Eigen::Index t = 0; t < T; ++t) {
      const Points h = human_keypoints(body, robot, pose_frame(body, beta_prime, m, t));
      for (std::size_t k = 0; k < K; ++k) {
        human.block<1, 3>(t, 3 * k) = h.row(k);
        robot_kp.block<1, 3>(t, 3 * k) =
            ref.link_position(t, robot.keypoint_map[k].robot_link).transpose();
      }
      human_anchor.height(t) = h(0, 2);
      robot_anchor.height(t) = robot_kp(t, 2);
      human_anchor.orientation.push_back(quat_from_rotvec(m.root_rotation.row(t).transpose()));
      robot_anchor.orientation.push_back(
          quat_from_rotvec(ref.root_rotation.row(t).transpose()));
    }
    MetricReport& r = out.agents[a];
    r.success = success(robot_anchor, human_anchor, config);
    r.e_gmpjpe = mpjpe(robot_kp, human, false, 0);
    r.e_mpjpe = mpjpe(robot_kp, human, true, 0);
    r.e_acc = T >= 3 ? acc_error(robot_kp, human) : 0.0;
    r.e_vel = vel_error(ref.root_position, human.leftCols<3>());
    r.contact_f1 = contact_f1(detected_masks[a], ref.contact_mask);
    out.gmpjpe_curve.col(a) = mpjpe_per_frame(robot_kp, human, false, 0);
    out.mpjpe_curve.col(a) = mpjpe_per_frame(robot_kp, human, true, 0);
  }
  const MetricReport& x = out.agents[0];
  const MetricReport& y = out.agents[1];
  out.mean.success = (x.success == 1.0 && y.success == 1.0) ? 1.0 : 0.0;
  out.mean.e_gmpjpe = 0.5 * (x.e_gmpjpe + y.e_gmpjpe);
  out.mean.e_mpjpe = 0.5 * (x.e_mpjpe + y.e_mpjpe);
  out.mean.e_acc = 0.5 * (x.e_acc + y.e_acc);
  out.mean.e_vel = 0.5 * (x.e_vel + y.e_vel);
  out.mean.contact_f1 = 0.5 * (x.contact_f1 + y.contact_f1);
  return out;
}

namespace {

struct Run {
  const PipelineConfig& config;
  PipelineResult result;
  std::vector<std::string> done;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  fs::path out(const std::string& name) {
    outputs.push_back(name);
    return config.out_dir / name;
  }

  io::Json manifest(const std::string& status, const std::string& failed,
                    const std::string& error) const {
    io::Json j;
    j["tool"] = "duet";
    j["version"] = kVersion;
    j["seed"] = config.seed;
    j["status"] = status;
    j["stages"] = done;
    std::vector<std::string> files = outputs;
    std::sort(files.begin(), files.end());
    j["outputs"] = files;
    j["simd"] = std::string(simd::isa_name(simd::kernels().isa));
    j["inputs"] = {
        {"template", config.template_path.empty() ? "builtin" : config.template_path.string()},
        {"robot", config.robot_path.empty() ? "builtin" : config.robot_path.string()},
        {"motions", config.motion_a.empty()
                        ? "fixture:" + fixtures::scenario_name(config.fixture.scenario)
                        : config.motion_a.string() + "," + config.motion_b.string()}};
    j["settings"] = {{"epsilon", config.epsilon},
                     {"lambda", config.shape.lambda},
                     {"root_mode", config.root_mode == RootOptMode::kFull ? "full"
                                                                          : "translation_only"},
                     {"composition", config.composition == RootComposition::kAdditive
                                         ? "additive"
                                         : "rotational"}};
    if (!failed.empty()) {
      j["failed_stage"] = failed;
      j["error"] = error;
    }
    return j;
  }

  void write_manifest(const std::string& status, const std::string& failed = {},
                      const std::string& error = {}) {
    io::write_text(config.out_dir / "manifest.json",
                   io::canonical_json(manifest(status, failed, error)));
  }

  template <typename Fn>
  auto stage(const std::string& name, Fn&& fn) {
    spdlog::info("stage {}", name);
    const auto t0 = std::chrono::steady_clock::now();
    auto fail = [&](const std::exception& e) {
      try {
        write_manifest("failed", name, e.what());
      } catch (const std::exception& inner) {
        spdlog::error("could not write the manifest: {}", inner.what());
      }
      return "stage '" + name + "': " + e.what();
    };
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        finish(name, t0);
      } else {
        auto value = fn();
        finish(name, t0);
        return value;
      }
    } catch (const ConfigError& e) {
      throw ConfigError(fail(e));
    } catch (const InvalidInput& e) {
      throw InvalidInput(fail(e));
    } catch (const std::exception& e) {
      throw StageFailure(fail(e));
    }
  }

  void finish(const std::string& name, std::chrono::steady_clock::time_point t0) {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.timings.push_back({name, s});
    done.push_back(name);
  }
};

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();
  Run run{config, {}, {}, {}};
  fs::create_directories(config.out_dir);

  struct Inputs {
    std::optional<BodyTemplate> body;
    RobotModel robot;
    HumanMotion a, b;
  };
  Inputs in = run.stage("load", [&] {
    Inputs x;
    x.body = config.template_path.empty() ? fixtures::synthetic_body()
                                          : io::load_body(config.template_path);
    x.robot = config.robot_path.empty() ? fixtures::h1_robot(*x.body)
                                        : io::load_robot(config.robot_path);
    x.robot.validate(*x.body);
    if (config.motion_a.empty()) {
      fixtures::FixturePair fx = fixtures::generate_fixture(*x.body, config.fixture, config.seed);
      x.a = std::move(fx.a);
      x.b = std::move(fx.b);
    } else {
      x.a = io::load_motion(config.motion_a);
      x.b = io::load_motion(config.motion_b);
    }
    x.a.validate(*x.body);
    x.b.validate(*x.body);
    if (x.a.num_frames() != x.b.num_frames()) throw InvalidInput("motions differ in length");
    return x;
  });
  const BodyTemplate& body = *in.body;
  PipelineResult& res = run.result;

  res.contacts = run.stage("detect-contacts", [&] {
    ContactSet c = detect_sequence(body, in.a, in.b, config.epsilon);
    io::save_contacts(run.out("contacts.jsonl"), c);
    spdlog::info("{} contact pairs over {} frames", c.total_pairs(), c.num_frames());
    return c;
  });

  res.shape = run.stage("fit-shape", [&] {
    ShapeFitResult r =
        fit_shape(body, in.robot, robot_rest_keypoints(in.robot, body), config.shape);
    io::save_beta(run.out("beta.json"), io::shape_record(r, config.shape.lambda));
    return r;
  });

  res.offset = run.stage("optimize-root", [&] {
    io::OffsetRecord rec = root_stage(body, res.shape.beta_prime, in.a, in.b, res.contacts,
                                      config.root_mode, config.composition);
    io::save_offset(run.out("offset.json"), rec);
    return rec;
  });
  const HumanMotion aligned_a = apply_root_offset(in.a, res.offset.offset, config.composition);

  res.refs = run.stage("retarget", [&] {
    auto refs = retarget_stage(body, in.robot, res.shape.beta_prime, aligned_a, in.b,
                               res.contacts, config.retarget);
    io::save_reference(run.out("refA.json"), refs[0]);
    io::save_reference(run.out("refB.json"), refs[1]);
    return refs;
  });

  if (!config.rollout.empty() || config.rollout_noise) {
    res.rewards = run.stage("rewards", [&] {
      std::vector<RolloutFrame> frames =
          config.rollout.empty()
              ? fixtures::synthetic_rollout(res.refs, in.robot, *config.rollout_noise, config.seed)
              : io::load_rollout(config.rollout);
      fill_rollout_reference(frames, res.refs, in.robot);
      auto rewards = rewards_stage(frames, config.reward, config.curriculum);
      io::save_rewards_csv(run.out("rewards.csv"), frames, rewards);
      return rewards;
    });
  }

  res.report = run.stage("eval", [&] {
    // The offset was fitted on the robot-shaped bodies, so that is where
    // contact preservation is judged.
    const Eigen::VectorXd& bp = res.shape.beta_prime;
    const auto before = project_contact_mask(
        detect_sequence(body, in.a, in.b, config.epsilon, bp, bp), body, in.robot);
    const auto after = project_contact_mask(
        detect_sequence(body, aligned_a, in.b, config.epsilon, bp, bp), body, in.robot);
    res.contact_f1_before =
        0.5 * (contact_f1(before.first, res.refs[0].contact_mask) +
               contact_f1(before.second, res.refs[1].contact_mask));
    res.contact_f1_after = 0.5 * (contact_f1(after.first, res.refs[0].contact_mask) +
                                  contact_f1(after.second, res.refs[1].contact_mask));
    EpisodeReport report =
        retarget_report(body, in.robot, res.shape.beta_prime, {aligned_a, in.b}, res.refs,
                        {after.first, after.second}, config.success);
    io::Json j = io::report_to_json(report, config.success);
    j["contact_f1_before_offset"] = res.contact_f1_before;
    j["contact_f1_after_offset"] = res.contact_f1_after;
    j["evaluates"] = "retargeted robot keypoints against shaped human keypoints";
    io::write_text(run.out("report.json"), io::canonical_json(j));
    io::save_report_curves(run.out("report.csv"), report);
    return report;
  });

  res.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - run.start).count();
  run.outputs.push_back("manifest.json");
  if (config.timings) {
    io::Json t;
    for (const StageTiming& s : res.timings) t["stages"][s.stage] = s.seconds;
    t["total"] = res.total_seconds;
    run.outputs.push_back("timings.json");
    io::write_text(config.out_dir / "timings.json", io::canonical_json(t));
  }
  run.write_manifest("ok");
  return res;
}

}  // namespace duet
