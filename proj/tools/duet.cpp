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

// duet: command-line front end for the retargeting and reward pipeline.
//
// Exit codes: 0 success, 2 invalid input or configuration, 3 stage failure.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "duet/errors.hpp"
#include "duet/fixtures.hpp"
#include "duet/io.hpp"
#include "duet/pipeline.hpp"

namespace fs = std::filesystem;
using namespace duet;

namespace {

struct Globals {
  std::string config;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string log_level = "info";
};

io::KvConfig global_config(const Globals& g) {
  return g.config.empty() ? io::KvConfig{} : io::KvConfig::load(g.config);
}

fs::path output(const Globals& g, const std::string& path) {
  const fs::path p(path);
  if (g.out_dir.empty() || p.is_absolute()) return p;
  return fs::path(g.out_dir) / p;
}

std::array<std::string, 2> split_pair(const std::string& s, const char* flag) {
  const auto comma = s.find(',');
  if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos) {
    throw InvalidInput(std::string(flag) + " takes two comma-separated paths");
  }
  return {s.substr(0, comma), s.substr(comma + 1)};
}

BodyTemplate body_or_builtin(const std::string& path) {
  return path.empty() ? fixtures::synthetic_body() : io::load_body(path);
}

RobotModel robot_or_builtin(const std::string& path, const BodyTemplate& body) {
  RobotModel r = path.empty() ? fixtures::h1_robot(body) : io::load_robot(path);
  r.validate(body);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contact-aware dual-humanoid retargeting, rewards and metrics"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the verb
  Globals g;
  app.add_option("--config", g.config, "Flat key = value configuration file");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out-dir", g.out_dir, "Directory for outputs with relative paths");
  app.add_option("--log-level", g.log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

  std::string template_path, robot_path, motion_a, motion_b, out, contacts_path, beta_path;
  std::string offset_path, out_a, out_b, rollout, refs, preds, trace, plot_data;
  std::optional<double> epsilon, lambda;
  std::string mode = "rotational";
  bool translation_only = false;

  auto* detect = app.add_subcommand("detect-contacts", "Per-frame face contacts of two motions");
  detect->add_option("--template", template_path, "Body template JSON (default: built-in)");
  detect->add_option("--motion-a", motion_a)->required();
  detect->add_option("--motion-b", motion_b)->required();
  detect->add_option("--epsilon", epsilon, "Contact distance in meters (default 0)");
  detect->add_option("--out", out)->required();

  auto* fit = app.add_subcommand("fit-shape", "Fit human shape to the robot keypoints");
  fit->add_option("--template", template_path);
  fit->add_option("--robot", robot_path, "Robot JSON (default: built-in H1 layout)");
  fit->add_option("--lambda", lambda, "Shape regularization weight");
  fit->add_option("--out", out)->required();

  auto* root = app.add_subcommand("optimize-root", "Contact-aware root offset for agent 1");
  root->add_option("--template", template_path);
  root->add_option("--contacts", contacts_path)->required();
  root->add_option("--motion-a", motion_a)->required();
  root->add_option("--motion-b", motion_b)->required();
  root->add_option("--beta", beta_path)->required();
  root->add_option("--mode", mode, "Offset composition")
      ->check(CLI::IsMember({"rotational", "additive"}));
  root->add_flag("--translation-only", translation_only, "Optimize the translation only");
  root->add_option("--out", out)->required();

  auto* retarget = app.add_subcommand("retarget", "Retarget both agents to the robot");
  retarget->add_option("--template", template_path);
  retarget->add_option("--robot", robot_path);
  retarget->add_option("--beta", beta_path)->required();
  retarget->add_option("--motion-a", motion_a)->required();
  retarget->add_option("--motion-b", motion_b)->required();
  retarget->add_option("--offset", offset_path)->required();
  retarget->add_option("--contacts", contacts_path)->required();
  retarget->add_option("--out-a", out_a)->required();
  retarget->add_option("--out-b", out_b)->required();

  auto* rewards = app.add_subcommand("rewards", "Per-frame reward breakdown of a rollout");
  rewards->add_option("--robot", robot_path);
  rewards->add_option("--template", template_path);
  rewards->add_option("--rollout", rollout)->required();
  rewards->add_option("--ref", refs, "refA.json,refB.json")->required();
  rewards->add_option("--out", out)->required();

  auto* curriculum = app.add_subcommand("curriculum-sim", "Replay a proficiency trace");
  curriculum->add_option("--proficiency-trace", trace)->required();
  curriculum->add_option("--out", out)->required();

  auto* eval = app.add_subcommand("eval", "Tracking and contact metrics");
  eval->add_option("--robot", robot_path);
  eval->add_option("--template", template_path);
  eval->add_option("--pred", preds, "predA.json,predB.json")->required();
  eval->add_option("--ref", refs, "refA.json,refB.json")->required();
  eval->add_option("--out", out)->required();
  eval->add_option("--plot-data", plot_data, "Per-frame curves CSV");

  auto* run = app.add_subcommand("run", "Full pipeline into --out-dir");
  bool timings = false;
  run->add_flag("--timings", timings, "Also write timings.json (varies between runs)");

  auto* gen = app.add_subcommand("gen-fixture", "Write a synthetic interaction fixture");
  std::string scenario = "handshake";
  int frames = 30;
  double noise = 0.0, misalignment = 0.0;
  gen->add_option("--scenario", scenario)
      ->check(CLI::IsMember({"handshake", "shoulder_to_shoulder", "linked_arms", "hug",
                             "separated"}));
  gen->add_option("--frames", frames);
  gen->add_option("--noise", noise, "Root jitter std in meters");
  gen->add_option("--misalignment", misalignment, "Agent-1 root pulled back, meters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto logger = spdlog::stderr_color_mt("duet");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(g.log_level));

  try {
    const io::KvConfig kv = global_config(g);
    if (*detect) {
      const BodyTemplate body = body_or_builtin(template_path);
      const HumanMotion a = io::load_motion(motion_a);
      const HumanMotion b = io::load_motion(motion_b);
      a.validate(body);
      b.validate(body);
      const double eps = epsilon.value_or(kv.get_double("epsilon", 0.0));
      if (!(eps >= 0.0)) throw InvalidInput("epsilon must be >= 0");
      const ContactSet c = detect_sequence(body, a, b, eps);
      io::save_contacts(output(g, out), c);
      spdlog::info("{} contact pairs over {} frames", c.total_pairs(), c.num_frames());
    } else if (*fit) {
      const BodyTemplate body = body_or_builtin(template_path);
      const RobotModel robot = robot_or_builtin(robot_path, body);
      ShapeFitConfig cfg = io::shape_fit_config(kv);
      if (lambda) cfg.lambda = *lambda;
      cfg.validate();
      const ShapeFitResult r = fit_shape(body, robot, robot_rest_keypoints(robot, body), cfg);
      io::save_beta(output(g, out), io::shape_record(r, cfg.lambda));
      spdlog::info("shape fit: loss {:.6g} after {} iterations", r.final_loss, r.iterations);
    } else if (*root) {
      const BodyTemplate body = body_or_builtin(template_path);
      const HumanMotion a = io::load_motion(motion_a);
      const HumanMotion b = io::load_motion(motion_b);
      a.validate(body);
      b.validate(body);
      const ContactSet c = io::load_contacts(contacts_path);
      const io::ShapeFitRecord beta = io::load_beta(beta_path);
      const io::OffsetRecord rec =
          root_stage(body, beta.beta_prime, a, b, c,
                     translation_only ? RootOptMode::kTranslationOnly : RootOptMode::kFull,
                     io::parse_composition(mode));
      io::save_offset(output(g, out), rec);
    } else if (*retarget) {
      const BodyTemplate body = body_or_builtin(template_path);
      const RobotModel robot = robot_or_builtin(robot_path, body);
      const HumanMotion a = io::load_motion(motion_a);
      const HumanMotion b = io::load_motion(motion_b);
      a.validate(body);
      b.validate(body);
      const io::OffsetRecord off = io::load_offset(offset_path);
      const HumanMotion aligned =
          apply_root_offset(a, off.offset, io::parse_composition(off.mode));
      const auto result = retarget_stage(body, robot, io::load_beta(beta_path).beta_prime,
                                         aligned, b, io::load_contacts(contacts_path));
      io::save_reference(output(g, out_a), result[0]);
      io::save_reference(output(g, out_b), result[1]);
    } else if (*rewards) {
      kv.check_known(io::reward_keys(), io::curriculum_prefixes());
      const BodyTemplate body = body_or_builtin(template_path);
      const RobotModel robot = robot_or_builtin(robot_path, body);
      const auto [ra, rb] = split_pair(refs, "--ref");
      const std::array<RobotReferenceMotion, 2> ref = {io::load_reference(ra, robot),
                                                       io::load_reference(rb, robot)};
      std::vector<RolloutFrame> frames = io::load_rollout(rollout);
      fill_rollout_reference(frames, ref, robot);
      const RewardConfig rc = io::reward_config(kv);
      const auto breakdown = rewards_stage(frames, rc, io::curriculum_config(kv));
      io::save_rewards_csv(output(g, out), frames, breakdown);
    } else if (*curriculum) {
      kv.check_known(io::curriculum_keys(), io::curriculum_prefixes());
      CurriculumState state = io::curriculum_config(kv);
      const io::ProficiencyTrace tr = io::load_trace_csv(trace);
      std::vector<io::ScaleRow> rows;
      rows.push_back({0, 0.0, 1.0, false, state.scales});
      for (std::size_t i = 0; i < tr.values.size(); ++i) {
        const double s = tr.is_proficiency ? tr.values[i] : proficiency(tr.values[i], state);
        const ScaleUpdate up = update_scales(state, s);
        state = up.state;
        rows.push_back({static_cast<int>(i + 1), s, up.alpha, up.clamped, state.scales});
      }
      io::save_scales_csv(output(g, out), rows);
    } else if (*eval) {
      kv.check_known(io::success_keys());
      const BodyTemplate body = body_or_builtin(template_path);
      const RobotModel robot = robot_or_builtin(robot_path, body);
      const auto [pa, pb] = split_pair(preds, "--pred");
      const auto [ra, rb] = split_pair(refs, "--ref");
      const SuccessConfig sc = io::success_config(kv);
      const EpisodeReport report =
          evaluate_episode({io::load_reference(pa, robot), io::load_reference(pb, robot)},
                           {io::load_reference(ra, robot), io::load_reference(rb, robot)}, sc);
      io::save_report(output(g, out), report, sc);
      if (!plot_data.empty()) io::save_report_curves(output(g, plot_data), report);
    } else if (*run) {
      PipelineConfig cfg = pipeline_config(kv);
      cfg.seed = g.seed;
      cfg.timings = timings;
      if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
      const PipelineResult r = run_pipeline(cfg);
      spdlog::info("pipeline done in {:.2f} s", r.total_seconds);
    } else if (*gen) {
      fixtures::FixtureSpec spec;
      spec.scenario = fixtures::parse_scenario(scenario);
      spec.frames = frames;
      spec.noise = noise;
      spec.misalignment = misalignment;
      const BodyTemplate& body = fixtures::synthetic_body();
      const fixtures::FixturePair fx = fixtures::generate_fixture(body, spec, g.seed);
      const fs::path dir = g.out_dir.empty() ? fs::path(".") : fs::path(g.out_dir);
      io::save_body(dir / "template.json", body);
      io::save_robot(dir / "robot.json", fixtures::h1_robot(body));
      io::save_motion(dir / "motion_a.json", fx.a);
      io::save_motion(dir / "motion_b.json", fx.b);
    }
  } catch (const InvalidInput& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const StageFailure& e) {
    spdlog::error("{}", e.what());
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 3;
  }
  return 0;
}
