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


#include "duet/io.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <gtest/gtest.h>

#include "duet/errors.hpp"
#include "duet/fixtures.hpp"

namespace duet::io {
namespace {

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / "duet_io_test" / info->name();
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

TEST(CanonicalJson, SortsKeysAndTerminates) {
  Json j;
  j["zeta"] = 1;
  j["alpha"] = Json::array({1.5, "x"});
  j["mid"] = {{"b", true}, {"a", nullptr}};
  EXPECT_EQ(canonical_json(j), "{\"alpha\":[1.5,\"x\"],\"mid\":{\"a\":null,\"b\":true},\"zeta\":1}\n");
}

TEST(CanonicalJson, DoublesRoundTrip) {
  fixtures::Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.normal() * std::pow(10.0, rng.uniform(-12, 12));
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(-0.0), "0");
}

TEST(CanonicalJson, RejectsNonFinite) {
  EXPECT_THROW(format_double(std::numeric_limits<double>::quiet_NaN()), InvalidInput);
  Json j;
  j["x"] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(canonical_json(j), InvalidInput);
}

TEST(CanonicalJson, LinesAreOnePerRecord) {
  const std::string s = canonical_json_lines({Json{{"b", 1}, {"a", 2}}, Json{{"c", 3}}});
  EXPECT_EQ(s, "{\"a\":2,\"b\":1}\n{\"c\":3}\n");
}

TEST_F(IoTest, WriteTextCreatesParents) {
  const fs::path p = dir_ / "deep" / "nested" / "file.txt";
  write_text(p, "hello\n");
  EXPECT_EQ(read_text(p), "hello\n");
  write_text(p, "again\n");
  EXPECT_EQ(read_text(p), "again\n");
  EXPECT_FALSE(fs::exists(p.string() + ".tmp"));
  EXPECT_THROW(read_text(dir_ / "missing.txt"), InvalidInput);
}

TEST_F(IoTest, BodyRoundTrip) {
  const BodyTemplate& body = fixtures::synthetic_body();
  save_body(dir_ / "body.json", body);
  const BodyTemplate back = load_body(dir_ / "body.json");
  EXPECT_EQ(canonical_json(body_to_json(back)), canonical_json(body_to_json(body)));
  EXPECT_EQ(back.num_vertices(), body.num_vertices());
}

TEST_F(IoTest, BodyRejectsWrongFormat) {
  Json j = body_to_json(fixtures::synthetic_body());
  j["format"] = "something-else/9";
  write_text(dir_ / "bad.json", canonical_json(j));
  EXPECT_THROW(load_body(dir_ / "bad.json"), InvalidInput);
  write_text(dir_ / "garbage.json", "{not json");
  EXPECT_THROW(load_body(dir_ / "garbage.json"), InvalidInput);
}

TEST_F(IoTest, MotionRoundTrip) {
  fixtures::FixtureSpec spec;
  spec.frames = 6;
  spec.noise = 0.01;
  const fixtures::FixturePair pair = fixtures::generate_fixture(spec, 4);
  save_motion(dir_ / "a.json", pair.a);
  const HumanMotion back = load_motion(dir_ / "a.json");
  EXPECT_EQ(back.theta, pair.a.theta);
  EXPECT_EQ(back.root_translation, pair.a.root_translation);
  EXPECT_EQ(back.root_rotation, pair.a.root_rotation);
  EXPECT_EQ(back.beta, pair.a.beta);
  EXPECT_EQ(back.dt, pair.a.dt);
}

TEST_F(IoTest, RobotRoundTrip) {
  const RobotModel robot = fixtures::h1_robot(fixtures::synthetic_body());
  save_robot(dir_ / "robot.json", robot);
  const RobotModel back = load_robot(dir_ / "robot.json");
  EXPECT_EQ(canonical_json(robot_to_json(back)), canonical_json(robot_to_json(robot)));
}

TEST_F(IoTest, ContactsRoundTrip) {
  ContactSet set;
  set.epsilon = 0.02;
  set.per_frame = {{}, {{1, 2, 0.0}, {3, 4, 0.015}}, {}, {{7, 0, 1e-7}}};
  save_contacts(dir_ / "c.jsonl", set);
  const ContactSet back = load_contacts(dir_ / "c.jsonl");
  EXPECT_EQ(back.epsilon, set.epsilon);
  EXPECT_EQ(back.per_frame, set.per_frame);
  EXPECT_EQ(back.total_pairs(), 3u);
}

TEST_F(IoTest, BetaAndOffsetRoundTrip) {
  ShapeFitRecord rec;
  rec.beta_prime = Eigen::VectorXd::LinSpaced(10, -0.3, 0.7);
  rec.lambda = 0.0016;
  rec.final_loss = 1.25e-5;
  rec.iterations = 7;
  rec.converged = true;
  save_beta(dir_ / "beta.json", rec);
  const ShapeFitRecord b = load_beta(dir_ / "beta.json");
  EXPECT_EQ(b.beta_prime, rec.beta_prime);
  EXPECT_EQ(b.lambda, rec.lambda);
  EXPECT_EQ(b.final_loss, rec.final_loss);
  EXPECT_EQ(b.iterations, 7);
  EXPECT_TRUE(b.converged);

  OffsetRecord off;
  off.offset.delta_p = Vec3(0.1, -0.2, 0.3);
  off.offset.delta_theta = Vec3(0.01, 0.02, -0.03);
  off.mode = "additive";
  off.gap_before = 0.4;
  off.gap_after = 0.01;
  save_offset(dir_ / "offset.json", off);
  const OffsetRecord o = load_offset(dir_ / "offset.json");
  EXPECT_EQ(o.offset.delta_p, off.offset.delta_p);
  EXPECT_EQ(o.offset.delta_theta, off.offset.delta_theta);
  EXPECT_EQ(o.mode, "additive");
  EXPECT_EQ(o.gap_after, 0.01);
  EXPECT_EQ(parse_composition("additive"), RootComposition::kAdditive);
  EXPECT_THROW(parse_composition("sideways"), InvalidInput);
}

TEST_F(IoTest, ReferenceRoundTripRegeneratesDerivedFields) {
  const BodyTemplate& body = fixtures::synthetic_body();
  const RobotModel robot = fixtures::h1_robot(body);
  fixtures::FixtureSpec spec;
  spec.frames = 4;
  const fixtures::FixturePair pair = fixtures::generate_fixture(spec, 2);
  Eigen::MatrixXi mask = Eigen::MatrixXi::Zero(4, robot.num_links());
  mask(2, 3) = 1;
  const RobotReferenceMotion ref =
      retarget_motion(body, robot, Eigen::VectorXd::Zero(body.num_shapes()), pair.a, mask);
  save_reference(dir_ / "ref.json", ref);
  const RobotReferenceMotion back = load_reference(dir_ / "ref.json", robot);
  EXPECT_EQ(back.theta_hat, ref.theta_hat);
  EXPECT_EQ(back.root_position, ref.root_position);
  EXPECT_EQ(back.contact_mask, ref.contact_mask);
  EXPECT_EQ(back.p_hat, ref.p_hat);
  EXPECT_EQ(back.v_hat, ref.v_hat);
  EXPECT_EQ(back.omega_hat, ref.omega_hat);
}

TEST_F(IoTest, RolloutRoundTrip) {
  RolloutFrame f;
  f.t = 3;
  for (int a = 0; a < 2; ++a) {
    f.keypoints[a] = Points::Random(4, 3);
    f.contact_forces[a] = Eigen::VectorXd::Constant(5, 2.5 + a);
  }
  f.ref_contact_mask[0] = Eigen::VectorXi::Zero(5);
  f.ref_contact_mask[1] = Eigen::VectorXi::Ones(5);
  for (int a = 0; a < 2; ++a) f.ref_keypoints[a] = f.keypoints[a];
  save_rollout(dir_ / "r.jsonl", {f, f});
  const std::vector<RolloutFrame> back = load_rollout(dir_ / "r.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].t, 3);
  EXPECT_EQ(back[0].keypoints[1], f.keypoints[1]);
  EXPECT_EQ(back[0].contact_forces[1], f.contact_forces[1]);
  EXPECT_EQ(back[0].ref_contact_mask[1], f.ref_contact_mask[1]);
  EXPECT_EQ(back[0].dof_pos[0].size(), 0);
}

TEST(KvConfig, ParsesCommentsAndQuotes) {
  const KvConfig kv = KvConfig::parse(
      "# header\n"
      "kappa = 2.5   # trailing\n"
      "\n"
      "name = \"a # b\"\n"
      "  spaced   =   x  \n");
  EXPECT_EQ(kv.get_double("kappa", 0), 2.5);
  EXPECT_EQ(kv.get_string("name", ""), "a # b");
  EXPECT_EQ(kv.get_string("spaced", ""), "x");
  EXPECT_EQ(kv.get_string("absent", "dflt"), "dflt");
  EXPECT_EQ(kv.values().size(), 3u);
}

TEST(KvConfig, RejectsMalformedInput) {
  EXPECT_THROW(KvConfig::parse("[section]\n"), ConfigError);
  EXPECT_THROW(KvConfig::parse("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(KvConfig::parse("novalue\n"), ConfigError);
  EXPECT_THROW(KvConfig::parse(" = 3\n"), ConfigError);
  try {
    KvConfig::parse("x = 1\n[s]\n", "cfg.kv");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg.kv:2"), std::string::npos);
  }
}

TEST(KvConfig, TypedGetters) {
  const KvConfig kv = KvConfig::parse("i = 12\nf = 1.5\nw = abc\n");
  EXPECT_EQ(kv.get_int("i", 0), 12);
  EXPECT_THROW(kv.get_int("f", 0), ConfigError);
  EXPECT_THROW(kv.get_double("w", 0), ConfigError);
  EXPECT_EQ(kv.get_int("missing", 9), 9);
}

TEST(KvConfig, PrefixesAndUnknownKeys) {
  const KvConfig kv = KvConfig::parse("scale.tracking = 0.5\nscale.contact = 2\nmin_scale = 0.01\n");
  const auto scales = kv.with_prefix("scale.");
  EXPECT_EQ(scales.size(), 2u);
  EXPECT_EQ(scales.at("tracking"), "0.5");
  EXPECT_NO_THROW(kv.check_known(curriculum_keys(), curriculum_prefixes()));
  EXPECT_THROW(kv.check_known(reward_keys()), ConfigError);
}

TEST(ConfigOverlays, ApplyAndValidate) {
  const RewardConfig r = reward_config(KvConfig::parse("kappa = 7\nsigma_int = 0.2\n"));
  EXPECT_EQ(r.kappa, 7.0);
  EXPECT_EQ(r.sigma_int, 0.2);
  EXPECT_EQ(r.tau, RewardConfig{}.tau);
  EXPECT_THROW(reward_config(KvConfig::parse("sigma_int = -1\n")), ConfigError);

  const CurriculumState c = curriculum_config(KvConfig::parse("scale.tracking = 0.5\n"));
  EXPECT_EQ(c.scales.at("tracking"), 0.5);
  EXPECT_THROW(curriculum_config(KvConfig::parse("class.x = other\n")), ConfigError);

  EXPECT_EQ(success_config(KvConfig::parse("height_threshold = 0.5\n")).height_threshold, 0.5);
  EXPECT_THROW(success_config(KvConfig::parse("anchor_link = -1\n")), ConfigError);

  const ShapeFitConfig s =
      shape_fit_config(KvConfig::parse("lambda = 0.1\nshape_method = gradient_descent\n"));
  EXPECT_EQ(s.lambda, 0.1);
  EXPECT_EQ(s.method, ShapeFitMethod::kGradientDescent);
  EXPECT_THROW(shape_fit_config(KvConfig::parse("shape_method = newton\n")), ConfigError);
}

TEST_F(IoTest, TraceCsv) {
  write_text(dir_ / "s.csv", "iteration,s\n0,0.5\n1,1.25\n\n2,3\n");
  ProficiencyTrace t = load_trace_csv(dir_ / "s.csv");
  EXPECT_TRUE(t.is_proficiency);
  EXPECT_EQ(t.values, (std::vector<double>{0.5, 1.25, 3}));

  write_text(dir_ / "v.csv", "mean_vel_reward\n0.2\n");
  t = load_trace_csv(dir_ / "v.csv");
  EXPECT_FALSE(t.is_proficiency);
  EXPECT_EQ(t.values, std::vector<double>{0.2});

  write_text(dir_ / "bad.csv", "iteration,other\n0,1\n");
  EXPECT_THROW(load_trace_csv(dir_ / "bad.csv"), InvalidInput);
  write_text(dir_ / "nan.csv", "s\nfoo\n");
  EXPECT_THROW(load_trace_csv(dir_ / "nan.csv"), InvalidInput);
}

TEST_F(IoTest, ScalesCsv) {
  ScaleRow row;
  row.iteration = 1;
  row.s = 4;
  row.alpha = 0.5;
  row.scales = {{"interaction", 2.0}, {"tracking", 0.5}};
  save_scales_csv(dir_ / "scales.csv", {row});
  EXPECT_EQ(read_text(dir_ / "scales.csv"),
            "iteration,s,alpha,clamped,interaction,tracking\n1,4,0.5,0,2,0.5\n");
}

}  // namespace
}  // namespace duet::io
