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

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "duet/errors.hpp"

namespace duet::io {
namespace {

void dump(const Json& v, std::string& out) {
  switch (v.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      // nlohmann's default object is a std::map, so iteration is key-sorted.
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        dump(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        dump(v[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float:
      out += format_double(v.get<double>());
      break;
    default:
      out += v.dump();
  }
}

template <typename Derived>
Json rows_json(const Eigen::DenseBase<Derived>& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

template <typename Derived>
Json vector_json(const Eigen::DenseBase<Derived>& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json vec3_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw InvalidInput("expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw InvalidInput(std::string("missing field '") + key + "'");
  return *it;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix_from(const Json& j,
                                                                  Eigen::Index cols,
                                                                  const char* what) {
  if (!j.is_array()) throw InvalidInput(std::string(what) + " must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows > 0 && cols < 0) cols = static_cast<Eigen::Index>(j[0].size());
  if (cols < 0) cols = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidInput(std::string(what) + ": row " + std::to_string(r) + " needs " +
                         std::to_string(cols) + " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[c].get<Scalar>();
  }
  return m;
}

Eigen::VectorXd vector_from(const Json& j, const char* what) {
  if (!j.is_array()) throw InvalidInput(std::string(what) + " must be an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

Eigen::VectorXi int_vector_from(const Json& j, const char* what) {
  if (!j.is_array()) throw InvalidInput(std::string(what) + " must be an array");
  Eigen::VectorXi v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<int>();
  return v;
}

Vec3 vec3_from(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw InvalidInput(std::string(what) + " needs 3 values");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Points points_from(const Json& j, const char* what) {
  return matrix_from<double>(j, 3, what);
}

// Runs a decoder and turns JSON type errors into InvalidInput with context.
template <typename Fn>
auto decode(const std::string& what, Fn&& fn) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw InvalidInput(what + ": " + e.what());
  } catch (const InvalidInput& e) {
    throw InvalidInput(what + ": " + e.what());
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw InvalidInput(what + ": '" + text + "' is not a number");
  }
  return v;
}

std::vector<Json> read_lines(const fs::path& path) {
  std::vector<Json> out;
  std::istringstream in(read_text(path));
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    out.push_back(parse_json(line, path.string() + ":" + std::to_string(n)));
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  if (!std::isfinite(x)) throw InvalidInput("cannot serialize a non-finite number");
  // Negative zero would not survive a parse as an integer literal.
  if (x == 0.0) return "0";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string canonical_json(const Json& value) {
  std::string out;
  dump(value, out);
  out += '\n';
  return out;
}

std::string canonical_json_lines(const std::vector<Json>& records) {
  std::string out;
  for (const Json& r : records) out += canonical_json(r);
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
    out << text;
    if (!out.flush()) throw InvalidInput("write failed for '" + path.string() + "'");
  }
  fs::rename(tmp, path);
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(what + ": " + e.what());
  }
}

// ---- body ----

Json body_to_json(const BodyTemplate& body) {
  Json j;
  j["format"] = kBodyFormat;
  j["vertices"] = rows_json(body.vertices());
  j["faces"] = rows_json(body.faces());
  Json shapes = Json::array();
  for (const Points& s : body.blendshapes()) shapes.push_back(rows_json(s));
  j["blendshapes"] = std::move(shapes);
  j["skin_weights"] = rows_json(body.skin_weights());
  j["joint_regressor"] = rows_json(body.joint_regressor());
  j["parents"] = body.parents();
  j["joint_names"] = body.joint_names();
  return j;
}

BodyTemplate body_from_json(const Json& j) {
  return decode("body template", [&] {
    const std::string format = field(j, "format").get<std::string>();
    if (format != kBodyFormat) {
      throw InvalidInput("unsupported format '" + format + "', expected " + kBodyFormat);
    }
    Points vertices = points_from(field(j, "vertices"), "vertices");
    Faces faces = matrix_from<int>(field(j, "faces"), 3, "faces");
    std::vector<Points> shapes;
    for (const Json& s : field(j, "blendshapes")) shapes.push_back(points_from(s, "blendshapes"));
    const Eigen::MatrixXd weights = matrix_from<double>(field(j, "skin_weights"), -1, "skin_weights");
    const Eigen::MatrixXd regressor =
        matrix_from<double>(field(j, "joint_regressor"), -1, "joint_regressor");
    auto parents = field(j, "parents").get<std::vector<int>>();
    std::vector<std::string> names;
    if (j.contains("joint_names")) names = j["joint_names"].get<std::vector<std::string>>();
    return BodyTemplate::create(std::move(vertices), std::move(faces), std::move(shapes),
                                weights, regressor, std::move(parents), std::move(names));
  });
}

void save_body(const fs::path& path, const BodyTemplate& body) {
  write_text(path, canonical_json(body_to_json(body)));
}

BodyTemplate load_body(const fs::path& path) {
  return body_from_json(parse_json(read_text(path), path.string()));
}

// ---- motion ----

Json motion_to_json(const HumanMotion& m) {
  Json j;
  j["beta"] = vector_json(m.beta);
  j["dt"] = m.dt;
  Json theta = Json::array();
  const Eigen::Index joints = m.theta.cols() / 3;
  for (Eigen::Index t = 0; t < m.theta.rows(); ++t) {
    Json frame = Json::array();
    for (Eigen::Index k = 0; k < joints; ++k) {
      frame.push_back(Json::array({m.theta(t, 3 * k), m.theta(t, 3 * k + 1), m.theta(t, 3 * k + 2)}));
    }
    theta.push_back(std::move(frame));
  }
  j["theta"] = std::move(theta);
  j["root_t"] = rows_json(m.root_translation);
  j["root_r"] = rows_json(m.root_rotation);
  return j;
}

HumanMotion motion_from_json(const Json& j) {
  return decode("motion", [&] {
    HumanMotion m;
    m.beta = vector_from(field(j, "beta"), "beta");
    m.dt = field(j, "dt").get<double>();
    const Json& theta = field(j, "theta");
    if (!theta.is_array()) throw InvalidInput("theta must be an array of frames");
    const std::size_t T = theta.size();
    const std::size_t joints = T > 0 ? theta[0].size() : 0;
    m.theta.resize(T, 3 * joints);
    for (std::size_t t = 0; t < T; ++t) {
      const Eigen::MatrixXd frame = matrix_from<double>(theta[t], 3, "theta frame");
      if (static_cast<std::size_t>(frame.rows()) != joints) {
        throw InvalidInput("theta frame " + std::to_string(t) + " has a different joint count");
      }
      for (std::size_t k = 0; k < joints; ++k) m.theta.block<1, 3>(t, 3 * k) = frame.row(k);
    }
    m.root_translation = matrix_from<double>(field(j, "root_t"), 3, "root_t");
    m.root_rotation = matrix_from<double>(field(j, "root_r"), 3, "root_r");
    if (static_cast<std::size_t>(m.root_translation.rows()) != T ||
        static_cast<std::size_t>(m.root_rotation.rows()) != T) {
      throw InvalidInput("root_t and root_r need one row per theta frame");
    }
    if (T < 1) throw InvalidInput("motion needs at least one frame");
    if (!(m.dt > 0.0)) throw InvalidInput("dt must be > 0");
    return m;
  });
}

void save_motion(const fs::path& path, const HumanMotion& motion) {
  write_text(path, canonical_json(motion_to_json(motion)));
}

HumanMotion load_motion(const fs::path& path) {
  return motion_from_json(parse_json(read_text(path), path.string()));
}

// ---- robot ----

Json robot_to_json(const RobotModel& robot) {
  Json j;
  Json links = Json::array();
  for (const RobotLink& l : robot.links) {
    links.push_back({{"name", l.name},
                     {"parent", l.parent},
                     {"offset", vec3_json(l.offset)},
                     {"axis", vec3_json(l.axis)},
                     {"dof", l.dof}});
  }
  j["links"] = std::move(links);
  Json limits = Json::array();
  for (const auto& [lo, hi] : robot.joint_limits) limits.push_back(Json::array({lo, hi}));
  j["joint_limits"] = std::move(limits);
  Json kp = Json::array();
  for (const KeypointPair& k : robot.keypoint_map) {
    kp.push_back(Json::array({k.human_joint, k.robot_link}));
  }
  j["keypoint_map"] = std::move(kp);
  j["part_labels"] = robot.part_labels;
  Json parts = Json::array();
  for (const auto& [part, link] : robot.part_to_link) parts.push_back(Json::array({part, link}));
  j["part_to_link"] = std::move(parts);
  j["upper_body_links"] = robot.upper_body_links;
  j["feet_links"] = robot.feet_links;
  return j;
}

RobotModel robot_from_json(const Json& j) {
  return decode("robot", [&] {
    RobotModel r;
    for (const Json& l : field(j, "links")) {
      RobotLink link;
      link.name = field(l, "name").get<std::string>();
      link.parent = field(l, "parent").get<int>();
      link.offset = vec3_from(field(l, "offset"), "offset");
      link.axis = vec3_from(field(l, "axis"), "axis");
      link.dof = field(l, "dof").get<int>();
      r.links.push_back(std::move(link));
    }
    for (const Json& lim : field(j, "joint_limits")) {
      if (lim.size() != 2) throw InvalidInput("joint limit needs [min, max]");
      r.joint_limits.emplace_back(lim[0].get<double>(), lim[1].get<double>());
    }
    for (const Json& k : field(j, "keypoint_map")) {
      if (k.size() != 2) throw InvalidInput("keypoint pair needs [human, robot]");
      r.keypoint_map.push_back({k[0].get<int>(), k[1].get<int>()});
    }
    r.part_labels = field(j, "part_labels").get<std::vector<int>>();
    for (const Json& p : field(j, "part_to_link")) {
      if (p.size() != 2) throw InvalidInput("part_to_link entry needs [part, link]");
      r.part_to_link[p[0].get<int>()] = p[1].get<int>();
    }
    if (j.contains("upper_body_links")) r.upper_body_links = j["upper_body_links"].get<std::vector<int>>();
    if (j.contains("feet_links")) r.feet_links = j["feet_links"].get<std::vector<int>>();
    r.validate();
    return r;
  });
}

void save_robot(const fs::path& path, const RobotModel& robot) {
  write_text(path, canonical_json(robot_to_json(robot)));
}

RobotModel load_robot(const fs::path& path) {
  return robot_from_json(parse_json(read_text(path), path.string()));
}

// ---- contacts ----

void save_contacts(const fs::path& path, const ContactSet& contacts) {
  std::vector<Json> lines;
  for (std::size_t t = 0; t < contacts.per_frame.size(); ++t) {
    Json pairs = Json::array();
    for (const ContactPair& p : contacts.per_frame[t]) {
      pairs.push_back(Json::array({p.face_a, p.face_b, p.distance}));
    }
    lines.push_back({{"t", t}, {"epsilon", contacts.epsilon}, {"pairs", std::move(pairs)}});
  }
  write_text(path, canonical_json_lines(lines));
}

ContactSet load_contacts(const fs::path& path) {
  ContactSet set;
  const std::vector<Json> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string what = path.string() + " record " + std::to_string(i);
    decode(what, [&] {
      const Json& j = lines[i];
      if (field(j, "t").get<std::size_t>() != i) {
        throw InvalidInput("frames must be consecutive from 0");
      }
      if (j.contains("epsilon")) set.epsilon = j["epsilon"].get<double>();
      std::vector<ContactPair> frame;
      for (const Json& p : field(j, "pairs")) {
        if (p.size() != 3) throw InvalidInput("pair needs [face_a, face_b, distance]");
        frame.push_back({p[0].get<int>(), p[1].get<int>(), p[2].get<double>()});
      }
      set.per_frame.push_back(std::move(frame));
      return 0;
    });
  }
  return set;
}

// ---- beta / offset ----

ShapeFitRecord shape_record(const ShapeFitResult& r, double lambda) {
  return {r.beta_prime, lambda, r.final_loss, r.keypoint_loss, r.reg_loss, r.iterations,
          r.converged};
}

void save_beta(const fs::path& path, const ShapeFitRecord& r) {
  Json j;
  j["beta_prime"] = vector_json(r.beta_prime);
  j["lambda"] = r.lambda;
  j["loss"] = {{"total", r.final_loss}, {"keypoint", r.keypoint_loss}, {"regularizer", r.reg_loss}};
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  write_text(path, canonical_json(j));
}

ShapeFitRecord load_beta(const fs::path& path) {
  const Json j = parse_json(read_text(path), path.string());
  return decode(path.string(), [&] {
    ShapeFitRecord r;
    r.beta_prime = vector_from(field(j, "beta_prime"), "beta_prime");
    if (j.contains("lambda")) r.lambda = j["lambda"].get<double>();
    if (j.contains("loss")) {
      const Json& loss = j["loss"];
      r.final_loss = field(loss, "total").get<double>();
      r.keypoint_loss = field(loss, "keypoint").get<double>();
      r.reg_loss = field(loss, "regularizer").get<double>();
    }
    if (j.contains("iterations")) r.iterations = j["iterations"].get<int>();
    if (j.contains("converged")) r.converged = j["converged"].get<bool>();
    return r;
  });
}

RootComposition parse_composition(const std::string& name) {
  if (name == "rotational") return RootComposition::kRotational;
  if (name == "additive") return RootComposition::kAdditive;
  throw ConfigError("unknown root composition '" + name + "' (additive|rotational)");
}

void save_offset(const fs::path& path, const OffsetRecord& r) {
  Json j;
  j["delta_p"] = vec3_json(r.offset.delta_p);
  j["delta_theta"] = vec3_json(r.offset.delta_theta);
  j["mode"] = r.mode;
  j["translation_only"] = r.translation_only;
  j["initial_objective"] = r.initial_objective;
  j["final_objective"] = r.final_objective;
  j["iterations"] = r.iterations;
  j["no_contact"] = r.no_contact;
  j["mean_gap_before"] = r.gap_before;
  j["mean_gap_after"] = r.gap_after;
  write_text(path, canonical_json(j));
}

OffsetRecord load_offset(const fs::path& path) {
  const Json j = parse_json(read_text(path), path.string());
  return decode(path.string(), [&] {
    OffsetRecord r;
    r.offset.delta_p = vec3_from(field(j, "delta_p"), "delta_p");
    r.offset.delta_theta = vec3_from(field(j, "delta_theta"), "delta_theta");
    if (j.contains("mode")) r.mode = j["mode"].get<std::string>();
    parse_composition(r.mode);
    if (j.contains("translation_only")) r.translation_only = j["translation_only"].get<bool>();
    if (j.contains("initial_objective")) r.initial_objective = j["initial_objective"].get<double>();
    if (j.contains("final_objective")) r.final_objective = j["final_objective"].get<double>();
    if (j.contains("iterations")) r.iterations = j["iterations"].get<int>();
    if (j.contains("no_contact")) r.no_contact = j["no_contact"].get<bool>();
    if (j.contains("mean_gap_before")) r.gap_before = j["mean_gap_before"].get<double>();
    if (j.contains("mean_gap_after")) r.gap_after = j["mean_gap_after"].get<double>();
    return r;
  });
}

// ---- reference motion ----

Json reference_to_json(const RobotReferenceMotion& ref) {
  Json j;
  j["dt"] = ref.dt;
  j["theta_hat"] = rows_json(ref.theta_hat);
  j["root"] = {{"position", rows_json(ref.root_position)},
               {"rotation", rows_json(ref.root_rotation)}};
  j["contact_mask"] = rows_json(ref.contact_mask);
  j["diverged_frames"] = ref.diverged_frames;
  return j;
}

RobotReferenceMotion reference_from_json(const Json& j) {
  return decode("reference motion", [&] {
    RobotReferenceMotion ref;
    ref.dt = field(j, "dt").get<double>();
    if (!(ref.dt > 0.0)) throw InvalidInput("dt must be > 0");
    ref.theta_hat = matrix_from<double>(field(j, "theta_hat"), -1, "theta_hat");
    const Json& root = field(j, "root");
    ref.root_position = matrix_from<double>(field(root, "position"), 3, "root.position");
    ref.root_rotation = matrix_from<double>(field(root, "rotation"), 3, "root.rotation");
    ref.contact_mask = matrix_from<int>(field(j, "contact_mask"), -1, "contact_mask");
    if (j.contains("diverged_frames")) {
      ref.diverged_frames = j["diverged_frames"].get<std::vector<int>>();
    }
    const Eigen::Index T = ref.theta_hat.rows();
    if (ref.root_position.rows() != T || ref.root_rotation.rows() != T ||
        ref.contact_mask.rows() != T) {
      throw InvalidInput("theta_hat, root and contact_mask need one row per frame");
    }
    return ref;
  });
}

void save_reference(const fs::path& path, const RobotReferenceMotion& ref) {
  write_text(path, canonical_json(reference_to_json(ref)));
}

RobotReferenceMotion load_reference(const fs::path& path) {
  return reference_from_json(parse_json(read_text(path), path.string()));
}

RobotReferenceMotion load_reference(const fs::path& path, const RobotModel& robot) {
  RobotReferenceMotion ref = load_reference(path);
  if (ref.theta_hat.cols() != static_cast<Eigen::Index>(robot.num_dofs()) ||
      ref.contact_mask.cols() != static_cast<Eigen::Index>(robot.num_links())) {
    throw InvalidInput(path.string() + ": reference does not match the robot model");
  }
  complete_reference(robot, ref);
  return ref;
}

// ---- rollouts ----

namespace {

template <typename T, typename Fn>
Json pair_json(const std::array<T, 2>& v, Fn&& fn) {
  return Json::array({fn(v[0]), fn(v[1])});
}

bool both_empty(const std::array<Eigen::VectorXd, 2>& v) {
  return v[0].size() == 0 && v[1].size() == 0;
}

}  // namespace

Json rollout_frame_to_json(const RolloutFrame& f) {
  auto pts = [](const Points& p) { return rows_json(p); };
  auto vec = [](const auto& v) { return vector_json(v); };
  Json j;
  j["t"] = f.t;
  j["keypoints"] = pair_json(f.keypoints, pts);
  j["contact_forces"] = pair_json(f.contact_forces, vec);
  if (f.ref_keypoints[0].rows() + f.ref_keypoints[1].rows() > 0) {
    j["ref_keypoints"] = pair_json(f.ref_keypoints, pts);
  }
  if (f.ref_contact_mask[0].size() + f.ref_contact_mask[1].size() > 0) {
    j["ref_contact_mask"] = pair_json(f.ref_contact_mask, vec);
  }
  if (!both_empty(f.dof_pos)) j["dof_pos"] = pair_json(f.dof_pos, vec);
  if (!both_empty(f.dof_vel)) j["dof_vel"] = pair_json(f.dof_vel, vec);
  if (!both_empty(f.ref_dof_pos)) j["ref_dof_pos"] = pair_json(f.ref_dof_pos, vec);
  if (!both_empty(f.ref_dof_vel)) j["ref_dof_vel"] = pair_json(f.ref_dof_vel, vec);
  return j;
}

RolloutFrame rollout_frame_from_json(const Json& j) {
  auto pair_of = [&](const char* key) -> const Json& {
    const Json& v = field(j, key);
    if (!v.is_array() || v.size() != 2) {
      throw InvalidInput(std::string(key) + " needs one entry per agent");
    }
    return v;
  };
  RolloutFrame f;
  f.t = field(j, "t").get<int>();
  for (int a = 0; a < 2; ++a) {
    f.keypoints[a] = points_from(pair_of("keypoints")[a], "keypoints");
    f.contact_forces[a] = vector_from(pair_of("contact_forces")[a], "contact_forces");
    if (j.contains("ref_keypoints")) {
      f.ref_keypoints[a] = points_from(pair_of("ref_keypoints")[a], "ref_keypoints");
    }
    if (j.contains("ref_contact_mask")) {
      f.ref_contact_mask[a] = int_vector_from(pair_of("ref_contact_mask")[a], "ref_contact_mask");
    }
    if (j.contains("dof_pos")) f.dof_pos[a] = vector_from(pair_of("dof_pos")[a], "dof_pos");
    if (j.contains("dof_vel")) f.dof_vel[a] = vector_from(pair_of("dof_vel")[a], "dof_vel");
    if (j.contains("ref_dof_pos")) {
      f.ref_dof_pos[a] = vector_from(pair_of("ref_dof_pos")[a], "ref_dof_pos");
    }
    if (j.contains("ref_dof_vel")) {
      f.ref_dof_vel[a] = vector_from(pair_of("ref_dof_vel")[a], "ref_dof_vel");
    }
  }
  return f;
}

void save_rollout(const fs::path& path, const std::vector<RolloutFrame>& frames) {
  std::vector<Json> lines;
  for (const RolloutFrame& f : frames) lines.push_back(rollout_frame_to_json(f));
  write_text(path, canonical_json_lines(lines));
}

std::vector<RolloutFrame> load_rollout(const fs::path& path) {
  std::vector<RolloutFrame> out;
  const std::vector<Json> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out.push_back(decode(path.string() + " record " + std::to_string(i),
                         [&] { return rollout_frame_from_json(lines[i]); }));
  }
  return out;
}

void save_rewards_csv(const fs::path& path, const std::vector<RolloutFrame>& frames,
                      const std::vector<RewardBreakdown>& rewards) {
  if (frames.size() != rewards.size()) throw InvalidInput("one reward row per frame");
  std::string out = "t,r_int,r_con,p_con,r_goal,total\n";
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const RewardBreakdown& b = rewards[i];
    out += std::to_string(frames[i].t);
    for (double v : {b.r_int, b.r_con, b.p_con, b.r_goal, b.total}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  write_text(path, out);
}

// ---- report ----

namespace {

Json metric_json(const MetricReport& m) {
  return {{"success", m.success},       {"e_gmpjpe", m.e_gmpjpe}, {"e_mpjpe", m.e_mpjpe},
          {"e_acc", m.e_acc},           {"e_vel", m.e_vel},       {"contact_f1", m.contact_f1}};
}

}  // namespace

Json report_to_json(const EpisodeReport& report, const SuccessConfig& config) {
  Json j = metric_json(report.mean);
  j["agents"] = Json::array({metric_json(report.agents[0]), metric_json(report.agents[1])});
  j["aggregation"] = "errors and contact_f1 averaged over both agents; success requires both";
  j["units"] = {{"e_gmpjpe", "mm"}, {"e_mpjpe", "mm"}, {"e_acc", "mm/frame^2"},
                {"e_vel", "mm/frame"}};
  j["success_config"] = {{"height_threshold", config.height_threshold},
                         {"orientation_threshold", config.orientation_threshold},
                         {"anchor_link", config.anchor_link}};
  return j;
}

void save_report(const fs::path& json_path, const EpisodeReport& report,
                 const SuccessConfig& config) {
  write_text(json_path, canonical_json(report_to_json(report, config)));
}

void save_report_curves(const fs::path& csv_path, const EpisodeReport& report) {
  std::string out = "t,gmpjpe_a,gmpjpe_b,mpjpe_a,mpjpe_b\n";
  for (Eigen::Index t = 0; t < report.gmpjpe_curve.rows(); ++t) {
    out += std::to_string(t);
    for (double v : {report.gmpjpe_curve(t, 0), report.gmpjpe_curve(t, 1),
                     report.mpjpe_curve(t, 0), report.mpjpe_curve(t, 1)}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  write_text(csv_path, out);
}

// ---- flat config ----

KvConfig KvConfig::parse(const std::string& text, const std::string& origin) {
  KvConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string where = origin + ":" + std::to_string(n);
    std::string body = line;
    bool quoted = false;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '"') quoted = !quoted;
      if (body[i] == '#' && !quoted) {
        body.resize(i);
        break;
      }
    }
    body = trim(body);
    if (body.empty()) continue;
    if (body.front() == '[') throw ConfigError(where + ": sections are not supported");
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (!cfg.values_.emplace(key, value).second) {
      throw ConfigError(where + ": duplicate key '" + key + "'");
    }
  }
  return cfg;
}

KvConfig KvConfig::load(const fs::path& path) {
  return parse(read_text(path), path.string());
}

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return parse_double(it->second, origin_ + ": " + key);
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
}

int KvConfig::get_int(const std::string& key, int fallback) const {
  const double v = get_double(key, fallback);
  if (v != std::floor(v)) throw ConfigError(origin_ + ": " + key + " must be an integer");
  return static_cast<int>(v);
}

std::map<std::string, std::string> KvConfig::with_prefix(const std::string& prefix) const {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : values_) {
    if (k.starts_with(prefix)) out.emplace(k.substr(prefix.size()), v);
  }
  return out;
}

void KvConfig::check_known(const std::set<std::string>& known,
                           const std::vector<std::string>& known_prefixes) const {
  for (const auto& [k, v] : values_) {
    if (known.contains(k)) continue;
    bool ok = false;
    for (const std::string& p : known_prefixes) ok = ok || k.starts_with(p);
    if (!ok) throw ConfigError(origin_ + ": unknown key '" + k + "'");
  }
}

namespace {

std::vector<int> int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  for (const std::string& part : split(text, ',')) {
    const std::string s = trim(part);
    if (s.empty()) continue;
    const double v = parse_double(s, what);
    if (v != std::floor(v)) throw ConfigError(what + ": '" + s + "' is not an integer");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace

const std::set<std::string>& reward_keys() {
  static const std::set<std::string> keys{
      "sigma_iw", "sigma_int", "f_min",          "f_max",          "kappa",
      "tau",      "r_max",     "w_pen",          "sigma_goal_pos", "sigma_goal_vel",
      "upper_body_keypoints_a", "upper_body_keypoints_b"};
  return keys;
}

RewardConfig reward_config(const KvConfig& kv, RewardConfig c) {
  c.sigma_iw = kv.get_double("sigma_iw", c.sigma_iw);
  c.sigma_int = kv.get_double("sigma_int", c.sigma_int);
  c.f_min = kv.get_double("f_min", c.f_min);
  c.f_max = kv.get_double("f_max", c.f_max);
  c.kappa = kv.get_double("kappa", c.kappa);
  c.tau = kv.get_double("tau", c.tau);
  c.r_max = kv.get_double("r_max", c.r_max);
  c.w_pen = kv.get_double("w_pen", c.w_pen);
  c.sigma_goal_pos = kv.get_double("sigma_goal_pos", c.sigma_goal_pos);
  c.sigma_goal_vel = kv.get_double("sigma_goal_vel", c.sigma_goal_vel);
  const char* keys[2] = {"upper_body_keypoints_a", "upper_body_keypoints_b"};
  for (int a = 0; a < 2; ++a) {
    if (kv.has(keys[a])) c.upper_body_keypoints[a] = int_list(kv.get_string(keys[a], ""), keys[a]);
  }
  try {
    c.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  return c;
}

const std::set<std::string>& curriculum_keys() {
  static const std::set<std::string> keys{"gamma_vel_key", "min_scale", "max_scale"};
  return keys;
}

const std::vector<std::string>& curriculum_prefixes() {
  static const std::vector<std::string> prefixes{"scale.", "class."};
  return prefixes;
}

CurriculumState curriculum_config(const KvConfig& kv, CurriculumState s) {
  for (const auto& [name, value] : kv.with_prefix("class.")) {
    if (value == "tracking") {
      s.term_class[name] = TermClass::kTracking;
    } else if (value == "interaction") {
      s.term_class[name] = TermClass::kInteraction;
    } else {
      throw ConfigError("class." + name + " must be tracking or interaction");
    }
    if (!s.scales.contains(name)) s.scales[name] = 1.0;
  }
  for (const auto& [name, value] : kv.with_prefix("scale.")) {
    s.scales[name] = kv.get_double("scale." + name, 1.0);
  }
  s.gamma_vel_key = kv.get_string("gamma_vel_key", s.gamma_vel_key);
  s.min_scale = kv.get_double("min_scale", s.min_scale);
  s.max_scale = kv.get_double("max_scale", s.max_scale);
  s.validate();
  return s;
}

const std::set<std::string>& success_keys() {
  static const std::set<std::string> keys{"height_threshold", "orientation_threshold",
                                          "anchor_link"};
  return keys;
}

SuccessConfig success_config(const KvConfig& kv, SuccessConfig c) {
  c.height_threshold = kv.get_double("height_threshold", c.height_threshold);
  c.orientation_threshold = kv.get_double("orientation_threshold", c.orientation_threshold);
  c.anchor_link = kv.get_int("anchor_link", c.anchor_link);
  c.validate();
  return c;
}

const std::set<std::string>& shape_fit_keys() {
  static const std::set<std::string> keys{"lambda", "max_iters", "step_tolerance",
                                          "shape_method"};
  return keys;
}

ShapeFitConfig shape_fit_config(const KvConfig& kv, ShapeFitConfig c) {
  c.lambda = kv.get_double("lambda", c.lambda);
  c.max_iters = kv.get_int("max_iters", c.max_iters);
  c.step_tolerance = kv.get_double("step_tolerance", c.step_tolerance);
  const std::string method = kv.get_string("shape_method", "gauss_newton");
  if (method == "gauss_newton") {
    c.method = ShapeFitMethod::kGaussNewton;
  } else if (method == "gradient_descent") {
    c.method = ShapeFitMethod::kGradientDescent;
  } else {
    throw ConfigError("shape_method must be gauss_newton or gradient_descent");
  }
  c.validate();
  return c;
}

// ---- curriculum traces ----

ProficiencyTrace load_trace_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput(path.string() + ": empty trace");
  const std::vector<std::string> header = split(trim(line), ',');
  int col = -1;
  ProficiencyTrace trace;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string h = trim(header[i]);
    if (h == "s") {
      col = static_cast<int>(i);
      trace.is_proficiency = true;
      break;
    }
    if (h == "mean_vel_reward") {
      col = static_cast<int>(i);
      trace.is_proficiency = false;
    }
  }
  if (col < 0) throw InvalidInput(path.string() + ": need an 's' or 'mean_vel_reward' column");
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split(trim(line), ',');
    if (static_cast<int>(cells.size()) <= col) {
      throw InvalidInput(path.string() + ":" + std::to_string(n) + ": missing column");
    }
    trace.values.push_back(
        parse_double(trim(cells[col]), path.string() + ":" + std::to_string(n)));
  }
  return trace;
}

void save_scales_csv(const fs::path& path, const std::vector<ScaleRow>& rows) {
  std::string out = "iteration,s,alpha,clamped";
  if (!rows.empty()) {
    for (const auto& [name, v] : rows.front().scales) out += "," + name;
  }
  out += '\n';
  for (const ScaleRow& r : rows) {
    out += std::to_string(r.iteration) + "," + format_double(r.s) + "," +
           format_double(r.alpha) + "," + (r.clamped ? "1" : "0");
    for (const auto& [name, v] : r.scales) out += "," + format_double(v);
    out += '\n';
  }
  write_text(path, out);
}

}  // namespace duet::io
