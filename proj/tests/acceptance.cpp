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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Every check runs, even after a failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <spdlog/spdlog.h>

#include "duet/body_model.hpp"
#include "duet/contact.hpp"
#include "duet/curriculum.hpp"
#include "duet/fixtures.hpp"
#include "duet/io.hpp"
#include "duet/metrics.hpp"
#include "duet/pipeline.hpp"
#include "duet/rewards.hpp"
#include "duet/root_opt.hpp"
#include "duet/rotation.hpp"
#include "duet/shape_fit.hpp"

namespace {

using namespace duet;
namespace fs = std::filesystem;
using fixtures::Rng;

constexpr double kPi = 3.14159265358979323846;
constexpr double kDeg = kPi / 180.0;
// Agent-1 root pulled back from the partner on the efficacy fixtures, m.
constexpr double kMisalignment = 0.0;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "duet_acceptance" / name;
  fs::remove_all(p);
  return p;
}

// 1. BVH traversal versus the all-pairs scan on random mesh pairs.
Outcome collision_oracle() {
  Outcome o;
  const BodyTemplate& body = fixtures::synthetic_body();
  o.check(body.num_faces() <= 2000, "fixture mesh exceeds 2000 faces");
  Rng rng(2026);
  const double eps[] = {0.0, 0.01, 0.03};
  const auto t0 = std::chrono::steady_clock::now();
  int pairs = 0, with_contact = 0;
  for (int i = 0; i < 24; ++i) {
    const auto [a, b] = fixtures::random_mesh_pair(body, rng);
    const double e = eps[i % 3];
    const auto fast = collision_pairs(a, b, e);
    const auto slow = collision_pairs_brute_force(a, b, e);
    if (fast != slow) o.check(false, "pair set differs on mesh pair " + std::to_string(i));
    ++pairs;
    with_contact += !slow.empty();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(secs <= 60.0, "took " + fmt("%.1f s", secs));
  o.check(with_contact > 0, "no mesh pair was in contact");
  if (o.pass) {
    o.detail = std::to_string(pairs) + " pairs (" + std::to_string(with_contact) +
               " in contact), " + fmt("%.1f s", secs);
  }
  return o;
}

// Exhaustive search over rotation vectors on a half-degree grid within
// +-15 degrees, translation solved in closed form for each rotation.
RootOffset grid_search_root(const fixtures::RootFixture& fx) {
  const int n = 30;
  double best = std::numeric_limits<double>::infinity();
  RootOffset best_off;
  for (int i = -n; i <= n; ++i) {
    for (int j = -n; j <= n; ++j) {
      for (int k = -n; k <= n; ++k) {
        RootOffset off;
        off.delta_theta = Vec3(i, j, k) * 0.5 * kDeg;
        Vec3 mean = Vec3::Zero();
        for (const CentroidPair& p : fx.pairs) {
          mean += p.c_b - transform_centroid(p.c_a, fx.pivots.row(p.frame).transpose(), off);
        }
        off.delta_p = mean / static_cast<double>(fx.pairs.size());
        // Round to the millimetre grid the oracle is specified on.
        off.delta_p = (off.delta_p * 1000.0).array().round() / 1000.0;
        const double f = root_objective(fx.pairs, fx.pivots, off);
        if (f < best) {
          best = f;
          best_off = off;
        }
      }
    }
  }
  return best_off;
}

double rotation_gap(const Vec3& a, const Vec3& b) {
  const Quat qa = quat_from_rotvec(a), qb = quat_from_rotvec(b);
  return qa.angularDistance(qb);
}

// 2. Root offset against closed form and grid search.
Outcome root_offset_oracle() {
  Outcome o;
  Rng rng(77);
  double worst_t = 0;
  for (int s = 0; s < 100; ++s) {
    const fixtures::RootFixture fx = fixtures::random_centroid_pairs(rng, 1 + s % 7, 1 + s % 5);
    Vec3 mean = Vec3::Zero();
    for (const CentroidPair& p : fx.pairs) mean += p.c_b - p.c_a;
    mean /= static_cast<double>(fx.pairs.size());
    const RootOptResult r =
        optimize_root_offset(fx.pairs, fx.pivots, RootOptMode::kTranslationOnly);
    worst_t = std::max(worst_t, (r.offset.delta_p - mean).cwiseAbs().maxCoeff());
    o.check(r.offset.delta_theta.isZero(0.0), "translation-only mode rotated");
  }
  o.check(worst_t <= 1e-10, "translation-only error " + fmt("%.3g m", worst_t));

  double worst_deg = 0, worst_mm = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    const fixtures::RootFixture fx = fixtures::rotated_contact_fixture(seed);
    const RootOffset oracle = grid_search_root(fx);
    const RootOptResult r = optimize_root_offset(fx.pairs, fx.pivots, RootOptMode::kFull);
    worst_deg = std::max(worst_deg, rotation_gap(r.offset.delta_theta, oracle.delta_theta) / kDeg);
    worst_mm = std::max(worst_mm, 1000.0 * (r.offset.delta_p - oracle.delta_p).norm());
  }
  o.check(worst_deg <= 0.1, "full mode off the grid oracle by " + fmt("%.3g deg", worst_deg));
  o.check(worst_mm <= 1.0, "full mode off the grid oracle by " + fmt("%.3g mm", worst_mm));
  if (o.pass) {
    o.detail = "translation " + fmt("%.2g m", worst_t) + ", full " + fmt("%.3g deg", worst_deg) +
               " / " + fmt("%.3g mm", worst_mm);
  }
  return o;
}

// 3. Shape fit against weighted ridge regression, gradient against
// central differences.
Outcome shape_fit_oracle() {
  Outcome o;
  const BodyTemplate& body = fixtures::synthetic_body();
  const RobotModel robot = fixtures::h1_robot(body);
  Rng rng(5);
  Points targets = robot_rest_keypoints(robot, body);
  for (Eigen::Index i = 0; i < targets.size(); ++i) targets.data()[i] += rng.uniform(-0.02, 0.02);
  double worst_fit = 0;
  for (double lambda : {0.0, 1e-3, 0.0016, 0.1}) {
    ShapeFitConfig cfg;
    cfg.lambda = lambda;
    const ShapeFitResult res = fit_shape(body, robot, targets, cfg);
    const ShapeObjective obj(body, robot, targets, {}, lambda);
    const Eigen::MatrixXd& a = obj.jacobian();
    const Eigen::MatrixXd w = obj.weights3().asDiagonal();
    Eigen::MatrixXd lhs = a.transpose() * w * a;
    lhs.diagonal().array() += lambda;
    // Minimum-norm solution, which is the ridge solution when lambda > 0.
    const Eigen::VectorXd oracle =
        lhs.completeOrthogonalDecomposition().solve(-a.transpose() * w * obj.offset());
    worst_fit = std::max(worst_fit, (res.beta_prime - oracle).cwiseAbs().maxCoeff());
  }
  o.check(worst_fit <= 1e-6, "ridge mismatch " + fmt("%.3g", worst_fit));

  const ShapeObjective obj(body, robot, targets, {}, 0.0016);
  const double h = 1e-5;
  double worst_rel = 0;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd beta(body.num_shapes());
    for (Eigen::Index i = 0; i < beta.size(); ++i) beta[i] = rng.uniform(-2, 2);
    const Eigen::VectorXd g = obj.gradient(beta);
    for (Eigen::Index i = 0; i < beta.size(); ++i) {
      Eigen::VectorXd hi = beta, lo = beta;
      hi[i] += h;
      lo[i] -= h;
      const double fd = (obj.value(hi) - obj.value(lo)) / (2 * h);
      worst_rel = std::max(worst_rel, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
    }
  }
  o.check(worst_rel <= 1e-4, "gradient relative error " + fmt("%.3g", worst_rel));
  if (o.pass) {
    o.detail = "ridge " + fmt("%.2g", worst_fit) + ", gradient " + fmt("%.2g", worst_rel);
  }
  return o;
}

// 4. Closed-form reward values.
Outcome reward_identities() {
  Outcome o;
  const RewardConfig cfg;
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    RolloutFrame f;
    for (int a = 0; a < 2; ++a) {
      f.keypoints[a].resize(5, 3);
      for (Eigen::Index i = 0; i < f.keypoints[a].size(); ++i) {
        f.keypoints[a].data()[i] = rng.uniform(-1, 1);
      }
      f.ref_keypoints[a] = f.keypoints[a];
      f.contact_forces[a] = Eigen::VectorXd::Zero(3);
      f.ref_contact_mask[a] = Eigen::VectorXi::Zero(3);
    }
    if (interaction_reward(f, cfg) != 1.0) o.check(false, "r_int != 1 on matching offsets");
    const Eigen::VectorXd w = interaction_weights(pairwise_offsets(f).ref, cfg.sigma_iw);
    if (std::abs(w.sum() - 1.0) > 1e-12) o.check(false, "weights do not sum to 1");
  }
  const double e = interaction_discrepancy(Vec3(2, 0, 0), Vec3(1, 0, 0));
  o.check(std::abs(e - 0.75) <= 1e-12, "discrepancy " + fmt("%.17g", e));
  for (double force : {cfg.f_min, 0.5 * (cfg.f_min + cfg.f_max), cfg.f_max}) {
    o.check(expected_contact_reward(force, 1, cfg) == cfg.r_max, "in-band reward below r_max");
  }
  const double quarter = expected_contact_reward(cfg.f_min - std::log(3.0) / cfg.kappa, 1, cfg);
  o.check(std::abs(quarter - cfg.r_max / 4) <= 1e-12, "band-edge reward " + fmt("%.17g", quarter));
  o.check(unexpected_contact_penalty(cfg.tau, 0, cfg) == 0.5, "penalty at tau is not 0.5");
  if (o.pass) o.detail = "all identities hold";
  return o;
}

// 5. Curriculum scale dynamics.
Outcome curriculum_dynamics() {
  Outcome o;
  CurriculumState s;
  s.scales = {{"tracking", 1.0}, {"interaction", 1.0}};
  s.term_class = {{"tracking", TermClass::kTracking}, {"interaction", TermClass::kInteraction}};
  Rng rng(10);
  double drift = 0;
  int changed = 0;
  for (int i = 0; i < 1000; ++i) {
    const ScaleUpdate u = update_scales(s, rng.uniform(1.0, 1.5));
    changed += u.alpha != 1.0;
    if (u.clamped) o.check(false, "scales clamped at update " + std::to_string(i));
    s = u.state;
    if (s.scales.at("tracking") < 0.05) std::swap(s.scales.at("tracking"), s.scales.at("interaction"));
    drift = std::max(drift, std::abs(s.scales.at("tracking") * s.scales.at("interaction") - 1.0));
  }
  o.check(drift <= 1e-12, "product drift " + fmt("%.3g", drift));
  o.check(changed > 0, "no update changed the scales");

  const CurriculumState unit = CurriculumState::defaults();
  const ScaleUpdate half = update_scales(unit, 4.0);
  o.check(half.alpha == 0.5, "alpha at s = 4 is " + fmt("%.17g", half.alpha));
  for (const auto& [name, v] : half.state.scales) {
    if (unit.term_class.at(name) == TermClass::kTracking && v != 0.5 * unit.scales.at(name)) {
      o.check(false, "tracking scale '" + name + "' not halved");
    }
  }
  for (double sv : {0.0, 0.3, 0.999999}) {
    const ScaleUpdate u = update_scales(unit, sv);
    o.check(u.state.scales == unit.scales && u.alpha == 1.0, "s < 1 changed the scales");
  }
  if (o.pass) o.detail = "drift " + fmt("%.2g", drift) + " over 1000 updates";
  return o;
}

// 6. Root optimization on the contact fixtures.
Outcome pipeline_efficacy() {
  Outcome o;
  std::string summary;
  for (fixtures::Scenario sc : {fixtures::Scenario::kHandshake, fixtures::Scenario::kLinkedArms,
                                fixtures::Scenario::kShoulderToShoulder}) {
    const std::string name = fixtures::scenario_name(sc);
    PipelineConfig c;
    c.fixture.scenario = sc;
    c.fixture.misalignment = kMisalignment;
    c.out_dir = scratch("efficacy_" + name);
    const PipelineResult r = run_pipeline(c);
    const double reduction = r.offset.gap_before - r.offset.gap_after;
    o.check(!r.offset.no_contact, name + " has no contacts");
    o.check(reduction > 0, name + " gap reduction " + fmt("%.3g m", reduction));
    o.check(r.contact_f1_after >= r.contact_f1_before,
            name + " F1 " + fmt("%.3f", r.contact_f1_before) + " -> " +
                fmt("%.3f", r.contact_f1_after));
    summary += (summary.empty() ? "" : ", ") + name + " gap " + fmt("%.4f", r.offset.gap_before) +
               "->" + fmt("%.4f m", r.offset.gap_after) + " F1 " +
               fmt("%.2f", r.contact_f1_before) + "->" + fmt("%.2f", r.contact_f1_after);
    fs::remove_all(c.out_dir);
  }
  if (o.pass) o.detail = summary;
  return o;
}

// 7. Metrics on identical, shifted and linearly drifting sequences.
Outcome metric_sanity() {
  Outcome o;
  const BodyTemplate& body = fixtures::synthetic_body();
  const RobotModel robot = fixtures::h1_robot(body);
  auto reference = [&](double phase) {
    RobotReferenceMotion ref;
    const int frames = 12;
    ref.theta_hat.resize(frames, robot.num_dofs());
    ref.root_position.resize(frames, 3);
    ref.root_rotation = Eigen::MatrixX3d::Zero(frames, 3);
    for (int t = 0; t < frames; ++t) {
      for (std::size_t d = 0; d < robot.num_dofs(); ++d) {
        ref.theta_hat(t, d) = 0.2 * std::sin(0.3 * t + d + phase);
      }
      ref.root_position.row(t) = Eigen::RowVector3d(0.01 * t, phase, 1.0);
    }
    ref.contact_mask = Eigen::MatrixXi::Zero(frames, robot.num_links());
    ref.contact_mask(5, 3) = 1;
    complete_reference(robot, ref);
    return ref;
  };
  const std::array<RobotReferenceMotion, 2> refs = {reference(0.0), reference(1.0)};
  const EpisodeReport rep = evaluate_episode(refs, refs, {});
  const MetricReport& m = rep.mean;
  o.check(m.e_gmpjpe == 0 && m.e_mpjpe == 0 && m.e_acc == 0 && m.e_vel == 0,
          "nonzero error on identical sequences");
  o.check(m.success == 1 && m.contact_f1 == 1, "success or F1 below 1 on identical sequences");

  Rng rng(3);
  double worst_shift = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd pred(10, 3 * 6), ref(10, 3 * 6);
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
      pred.data()[i] = rng.uniform(-1, 1);
      ref.data()[i] = rng.uniform(-1, 1);
    }
    const double base = mpjpe(pred, ref, true);
    const Vec3 d(rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(-100, 100));
    Eigen::MatrixXd moved = pred;
    for (Eigen::Index l = 0; l < 6; ++l) moved.middleCols(3 * l, 3).rowwise() += d.transpose();
    worst_shift = std::max(worst_shift, std::abs(mpjpe(moved, ref, true) - base));
  }
  o.check(worst_shift <= 1e-9, "root-relative MPJPE moved " + fmt("%.3g mm", worst_shift));

  // Dyadic samples keep every difference exact.
  Eigen::MatrixXd track(16, 3 * 4);
  for (Eigen::Index i = 0; i < track.size(); ++i) {
    track.data()[i] = std::round(rng.uniform(-1, 1) * 1024.0) / 1024.0;
  }
  Eigen::MatrixXd constant = track, linear = track;
  for (Eigen::Index t = 0; t < track.rows(); ++t) {
    for (Eigen::Index c = 0; c < track.cols(); ++c) {
      constant(t, c) += 0.25;
      linear(t, c) += 0.125 * (c % 3 + 1) * t / 1024.0 - 0.5;
    }
  }
  o.check(acc_error(constant, track) == 0.0, "E_acc nonzero on a constant offset");
  o.check(acc_error(linear, track) == 0.0, "E_acc nonzero on a linear drift");
  if (o.pass) o.detail = "shift invariance " + fmt("%.2g mm", worst_shift);
  return o;
}

// 8. Two runs with the same seed write identical bytes.
Outcome determinism() {
  Outcome o;
  PipelineConfig c;
  c.seed = 7;
  c.fixture.noise = 0.005;
  c.fixture.misalignment = 0.03;
  c.rollout_noise = 0.02;
  const fs::path a = scratch("determinism_a"), b = scratch("determinism_b");
  c.out_dir = a;
  run_pipeline(c);
  c.out_dir = b;
  run_pipeline(c);
  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const fs::path other = b / e.path().filename();
    if (!fs::exists(other) || io::read_text(e.path()) != io::read_text(other)) {
      o.check(false, e.path().filename().string() + " differs");
    }
    ++files;
  }
  int files_b = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++files_b;
  o.check(files == files_b, "directories list different files");
  fs::remove_all(a);
  fs::remove_all(b);
  if (o.pass) o.detail = std::to_string(files) + " files identical";
  return o;
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"collision oracle equivalence", collision_oracle},
      {"root offset closed form and grid oracle", root_offset_oracle},
      {"shape fit ridge oracle and gradient", shape_fit_oracle},
      {"reward identities", reward_identities},
      {"curriculum dynamics", curriculum_dynamics},
      {"pipeline efficacy", pipeline_efficacy},
      {"metric sanity", metric_sanity},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    failed += !o.pass;
    std::printf("criterion %zu (%s): %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
