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

#include "duet/body_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "duet/errors.hpp"
#include "duet/simd/kernels.hpp"

namespace duet {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}

std::vector<double> to_soa(const Points& p) {
  const std::size_t n = p.rows();
  std::vector<double> out(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = p(i, 0);
    out[n + i] = p(i, 1);
    out[2 * n + i] = p(i, 2);
  }
  return out;
}

// 3x4 row-major affine transform.
struct Affine {
  Mat3 r = Mat3::Identity();
  Vec3 t = Vec3::Zero();
};

}  // namespace

BodyTemplate BodyTemplate::create(Points vertices, Faces faces,
                                  std::vector<Points> blendshapes,
                                  Eigen::MatrixXd skin_weights,
                                  Eigen::MatrixXd joint_regressor,
                                  std::vector<int> parents,
                                  std::vector<std::string> joint_names) {
  const Eigen::Index nv = vertices.rows();
  const Eigen::Index nj = static_cast<Eigen::Index>(parents.size());
  require(nv >= 3, "body template needs at least 3 vertices");
  require(faces.rows() >= 1, "body template needs at least one face");
  require(!blendshapes.empty(), "body template needs at least one blendshape");
  require(nj >= 2, "body template needs at least two joints");
  require(vertices.allFinite(), "template vertices must be finite");
  require(faces.minCoeff() >= 0 && faces.maxCoeff() < nv,
          "face index out of range");
  for (std::size_t b = 0; b < blendshapes.size(); ++b) {
    require(blendshapes[b].rows() == nv,
            "blendshape " + std::to_string(b) + " has wrong vertex count");
    require(blendshapes[b].allFinite(), "blendshapes must be finite");
  }
  require(skin_weights.rows() == nv && skin_weights.cols() == nj,
          "skin weights must be V x J");
  require(joint_regressor.rows() == nj && joint_regressor.cols() == nv,
          "joint regressor must be J x V");
  for (Eigen::Index v = 0; v < nv; ++v) {
    require(std::abs(skin_weights.row(v).sum() - 1.0) <= 1e-6,
            "skin weights of vertex " + std::to_string(v) + " do not sum to 1");
  }
  require(parents[0] == -1, "joint 0 must be the root");
  for (Eigen::Index j = 1; j < nj; ++j) {
    require(parents[j] >= 0 && parents[j] < j,
            "joint " + std::to_string(j) +
                " must have a parent with a lower index");
  }
  if (!joint_names.empty()) {
    require(static_cast<Eigen::Index>(joint_names.size()) == nj,
            "joint_names must have one entry per joint");
  }

  BodyTemplate body;
  body.soa_vertices_ = to_soa(vertices);
  for (const auto& s : blendshapes) body.soa_blendshapes_.push_back(to_soa(s));
  body.weights_t_.resize(nj * nv);
  for (Eigen::Index j = 0; j < nj; ++j) {
    for (Eigen::Index v = 0; v < nv; ++v) {
      body.weights_t_[j * nv + v] = skin_weights(v, j);
    }
  }
  body.vertices_ = std::move(vertices);
  body.faces_ = std::make_shared<const Faces>(std::move(faces));
  body.blendshapes_ = std::move(blendshapes);
  body.skin_weights_ = std::move(skin_weights);
  body.joint_regressor_ = std::move(joint_regressor);
  body.parents_ = std::move(parents);
  body.joint_names_ = std::move(joint_names);
  return body;
}

void HumanMotion::validate(const BodyTemplate& body) const {
  const Eigen::Index t = theta.rows();
  require(t >= 1, "motion needs at least one frame");
  require(dt > 0.0 && std::isfinite(dt), "motion dt must be positive");
  require(beta.size() == static_cast<Eigen::Index>(body.num_shapes()),
          "motion beta has " + std::to_string(beta.size()) +
              " coefficients, body expects " +
              std::to_string(body.num_shapes()));
  require(theta.cols() == static_cast<Eigen::Index>(3 * body.num_body_joints()),
          "motion theta must have 3 columns per body joint");
  require(root_translation.rows() == t && root_rotation.rows() == t,
          "root arrays must have one row per frame");
  require(theta.allFinite() && root_translation.allFinite() &&
              root_rotation.allFinite() && beta.allFinite(),
          "motion contains non-finite values");
}

Eigen::Matrix3d PosedMesh::triangle(std::size_t f) const {
  Eigen::Matrix3d tri;
  for (int k = 0; k < 3; ++k) tri.row(k) = vertices.row((*faces)(f, k));
  return tri;
}

namespace {

std::vector<double> shaped_soa(const BodyTemplate& body,
                               const Eigen::VectorXd& beta) {
  std::vector<double> shaped = body.soa_vertices();
  for (std::size_t b = 0; b < body.num_shapes(); ++b) {
    if (beta[b] == 0.0) continue;
    simd::axpy(beta[b], body.soa_blendshape(b), shaped);
  }
  return shaped;
}

Points regress_soa(const BodyTemplate& body, const std::vector<double>& soa) {
  const std::size_t nv = body.num_vertices();
  const std::size_t nj = body.num_joints();
  const auto& k = simd::kernels();
  const Eigen::MatrixXd& reg = body.joint_regressor();
  Points joints(nj, 3);
  std::vector<double> row(nv);
  for (std::size_t j = 0; j < nj; ++j) {
    for (std::size_t v = 0; v < nv; ++v) row[v] = reg(j, v);
    for (int c = 0; c < 3; ++c) {
      joints(j, c) = k.dot(row.data(), soa.data() + c * nv, nv);
    }
  }
  return joints;
}

}  // namespace

Points rest_joints(const BodyTemplate& body, const Eigen::VectorXd& beta) {
  if (beta.size() != static_cast<Eigen::Index>(body.num_shapes())) {
    throw InvalidInput("beta has wrong length");
  }
  return regress_soa(body, shaped_soa(body, beta));
}

PosedMesh pose_body(const BodyTemplate& body, const Eigen::VectorXd& beta,
                    const Eigen::Ref<const Eigen::VectorXd>& theta_frame,
                    const Vec3& root_t, const Vec3& root_r) {
  const std::size_t nv = body.num_vertices();
  const std::size_t nj = body.num_joints();
  if (beta.size() != static_cast<Eigen::Index>(body.num_shapes())) {
    throw InvalidInput("beta has " + std::to_string(beta.size()) +
                       " coefficients, body expects " +
                       std::to_string(body.num_shapes()));
  }
  if (theta_frame.size() != static_cast<Eigen::Index>(3 * (nj - 1))) {
    throw InvalidInput("pose frame must have 3 values per body joint");
  }

  const std::vector<double> shaped = shaped_soa(body, beta);
  const Points joints = regress_soa(body, shaped);

  // Forward kinematics over the joint tree in the shaped rest frame.
  std::vector<Affine> global(nj);
  global[0].r = matrix_from_rotvec(root_r);
  global[0].t = joints.row(0).transpose();
  for (std::size_t j = 1; j < nj; ++j) {
    const int p = body.parents()[j];
    const Mat3 local = matrix_from_rotvec(theta_frame.segment<3>(3 * (j - 1)));
    const Vec3 bone = (joints.row(j) - joints.row(p)).transpose();
    global[j].r = global[p].r * local;
    global[j].t = global[p].r * bone + global[p].t;
  }

  // Skinning transforms: remove the rest joint location, then apply the
  // global joint transform and the root translation.
  std::vector<double> transforms(12 * nj);
  for (std::size_t j = 0; j < nj; ++j) {
    const Vec3 t = global[j].t - global[j].r * joints.row(j).transpose() + root_t;
    double* m = transforms.data() + 12 * j;
    for (int r = 0; r < 3; ++r) {
      m[4 * r + 0] = global[j].r(r, 0);
      m[4 * r + 1] = global[j].r(r, 1);
      m[4 * r + 2] = global[j].r(r, 2);
      m[4 * r + 3] = t[r];
    }
  }

  std::vector<double> out(3 * nv);
  simd::SkinArgs args;
  args.num_vertices = nv;
  args.num_joints = nj;
  args.x = shaped.data();
  args.y = shaped.data() + nv;
  args.z = shaped.data() + 2 * nv;
  args.weights_t = body.weights_joint_major().data();
  args.transforms = transforms.data();
  args.out_x = out.data();
  args.out_y = out.data() + nv;
  args.out_z = out.data() + 2 * nv;
  simd::kernels().skin(args);

  PosedMesh mesh;
  mesh.faces = body.shared_faces();
  mesh.vertices.resize(nv, 3);
  for (std::size_t v = 0; v < nv; ++v) {
    mesh.vertices(v, 0) = out[v];
    mesh.vertices(v, 1) = out[nv + v];
    mesh.vertices(v, 2) = out[2 * nv + v];
  }
  return mesh;
}

PosedMesh pose_frame(const BodyTemplate& body, const Eigen::VectorXd& beta,
                     const HumanMotion& motion, std::size_t t) {
  return pose_body(body, beta, motion.theta.row(t).transpose(),
                   motion.root_translation.row(t).transpose(),
                   motion.root_rotation.row(t).transpose());
}

Points joint_positions(const BodyTemplate& body, const PosedMesh& posed) {
  if (posed.vertices.rows() != static_cast<Eigen::Index>(body.num_vertices())) {
    throw InvalidInput("posed mesh does not match the body template");
  }
  return body.joint_regressor() * posed.vertices;
}

std::vector<int> part_labels_from_skinning(const BodyTemplate& body) {
  const auto& w = body.skin_weights();
  std::vector<int> labels(w.rows());
  for (Eigen::Index v = 0; v < w.rows(); ++v) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < w.cols(); ++j) {
      if (w(v, j) > w(v, best)) best = j;
    }
    labels[v] = static_cast<int>(best);
  }
  return labels;
}

int RobotModel::link_index(const std::string& name) const {
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (links[i].name == name) return static_cast<int>(i);
  }
  throw ConfigError("unknown robot link: " + name);
}

std::vector<int> RobotModel::non_feet_links() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (std::find(feet_links.begin(), feet_links.end(), static_cast<int>(i)) ==
        feet_links.end()) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

void RobotModel::validate() const {
  const int nl = static_cast<int>(links.size());
  require(nl >= 1, "robot needs at least one link");
  require(links[0].parent == -1, "robot link 0 must be the root");
  require(links[0].dof == -1, "robot root link cannot carry a joint");
  std::set<int> dofs;
  for (int i = 1; i < nl; ++i) {
    const RobotLink& l = links[i];
    require(l.parent >= 0 && l.parent < i,
            "link " + l.name + " must have a parent with a lower index");
    if (l.dof >= 0) {
      require(l.dof < static_cast<int>(joint_limits.size()),
              "link " + l.name + " references a missing joint limit");
      require(std::abs(l.axis.norm() - 1.0) < 1e-9,
              "link " + l.name + " has a non-unit joint axis");
      require(dofs.insert(l.dof).second, "duplicate dof index");
    }
  }
  require(dofs.size() == joint_limits.size(),
          "every joint limit must belong to exactly one link");
  for (const auto& [lo, hi] : joint_limits) {
    require(lo <= hi, "joint limit min exceeds max");
  }
  for (const auto& kp : keypoint_map) {
    require(kp.robot_link >= 0 && kp.robot_link < nl,
            "keypoint map references a missing robot link");
    require(kp.human_joint >= 0, "keypoint map has a negative human joint");
  }
  for (const auto& [part, link] : part_to_link) {
    require(link >= 0 && link < nl, "part_to_link references a missing link");
  }
  for (int l : upper_body_links) {
    require(l >= 0 && l < nl, "upper-body link out of range");
  }
  for (int l : feet_links) require(l >= 0 && l < nl, "foot link out of range");
  for (int p : part_labels) {
    if (!part_to_link.contains(p)) {
      throw ConfigError("body part " + std::to_string(p) +
                        " has no robot link in part_to_link");
    }
  }
}

void RobotModel::validate(const BodyTemplate& body) const {
  validate();
  for (const auto& kp : keypoint_map) {
    require(kp.human_joint < static_cast<int>(body.num_joints()),
            "keypoint map references a missing human joint");
  }
  require(part_labels.size() == body.num_vertices(),
          "part_labels must have one entry per template vertex");
}

FkResult forward_kinematics(const RobotModel& robot,
                            const Eigen::Ref<const Eigen::VectorXd>& joint_angles,
                            const Vec3& root_position, const Vec3& root_rotvec) {
  const std::size_t nl = robot.links.size();
  if (joint_angles.size() != static_cast<Eigen::Index>(robot.num_dofs())) {
    throw InvalidInput("joint angle vector has wrong length");
  }
  FkResult out;
  out.joint_angles = joint_angles;
  for (std::size_t d = 0; d < robot.num_dofs(); ++d) {
    const auto [lo, hi] = robot.joint_limits[d];
    const double q = std::clamp(joint_angles[d], lo, hi);
    if (q != joint_angles[d]) out.clamped = true;
    out.joint_angles[d] = q;
  }
  out.positions.resize(nl);
  out.orientations.resize(nl);
  out.positions[0] = root_position;
  out.orientations[0] = quat_from_rotvec(root_rotvec);
  for (std::size_t i = 1; i < nl; ++i) {
    const RobotLink& l = robot.links[i];
    const Quat& parent_q = out.orientations[l.parent];
    out.positions[i] = out.positions[l.parent] + parent_q * l.offset;
    if (l.dof >= 0) {
      out.orientations[i] =
          parent_q * Quat(Eigen::AngleAxisd(out.joint_angles[l.dof], l.axis));
    } else {
      out.orientations[i] = parent_q;
    }
  }
  return out;
}

}  // namespace duet
