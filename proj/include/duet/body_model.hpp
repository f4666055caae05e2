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

#ifndef DUET_BODY_MODEL_HPP_
#define DUET_BODY_MODEL_HPP_

#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "duet/rotation.hpp"

namespace duet {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

// Parametric skinned body: template mesh, linear shape space, skinning
// weights, joint regressor and a topologically ordered joint tree
// (parents[0] == -1, parents[j] < j). Immutable once created.
class BodyTemplate {
 public:
  // Validates every invariant and throws InvalidInput on violation.
  // `blendshapes[b]` is the per-vertex displacement for a unit coefficient b.
  static BodyTemplate create(Points vertices, Faces faces,
                             std::vector<Points> blendshapes,
                             Eigen::MatrixXd skin_weights,
                             Eigen::MatrixXd joint_regressor,
                             std::vector<int> parents,
                             std::vector<std::string> joint_names = {});

  std::size_t num_vertices() const { return vertices_.rows(); }
  std::size_t num_faces() const { return faces_->rows(); }
  std::size_t num_shapes() const { return blendshapes_.size(); }
  std::size_t num_joints() const { return parents_.size(); }
  // Joints below the root, i.e. the rows of a pose frame.
  std::size_t num_body_joints() const { return parents_.size() - 1; }

  const Points& vertices() const { return vertices_; }
  const Faces& faces() const { return *faces_; }
  const std::shared_ptr<const Faces>& shared_faces() const { return faces_; }
  const std::vector<Points>& blendshapes() const { return blendshapes_; }
  const Eigen::MatrixXd& skin_weights() const { return skin_weights_; }
  const Eigen::MatrixXd& joint_regressor() const { return joint_regressor_; }
  const std::vector<int>& parents() const { return parents_; }
  const std::vector<std::string>& joint_names() const { return joint_names_; }

  // Structure-of-arrays caches used by the kernels: [x0..xV-1 y.. z..].
  const std::vector<double>& soa_vertices() const { return soa_vertices_; }
  const std::vector<double>& soa_blendshape(std::size_t b) const {
    return soa_blendshapes_[b];
  }
  // Joint-major skinning weights, J x V.
  const std::vector<double>& weights_joint_major() const { return weights_t_; }

 private:
  BodyTemplate() = default;

  Points vertices_;
  std::shared_ptr<const Faces> faces_;
  std::vector<Points> blendshapes_;
  Eigen::MatrixXd skin_weights_;
  Eigen::MatrixXd joint_regressor_;
  std::vector<int> parents_;
  std::vector<std::string> joint_names_;

  std::vector<double> soa_vertices_;
  std::vector<std::vector<double>> soa_blendshapes_;
  std::vector<double> weights_t_;
};

// One body's motion clip. theta holds T rows of 3*J_body axis-angle values
// (joint j of the frame at columns 3(j-1)..3(j-1)+2, joint 0 is the root).
struct HumanMotion {
  Eigen::VectorXd beta;
  Eigen::MatrixXd theta;
  Eigen::MatrixX3d root_translation;
  Eigen::MatrixX3d root_rotation;
  double dt = 1.0 / 30.0;

  std::size_t num_frames() const { return theta.rows(); }
  // Throws InvalidInput unless the motion fits `body`.
  void validate(const BodyTemplate& body) const;
};

struct PosedMesh {
  Points vertices;
  std::shared_ptr<const Faces> faces;

  std::size_t num_faces() const { return faces->rows(); }
  Eigen::Matrix3d triangle(std::size_t f) const;  // rows are the corners
};

PosedMesh pose_body(const BodyTemplate& body, const Eigen::VectorXd& beta,
                    const Eigen::Ref<const Eigen::VectorXd>& theta_frame,
                    const Vec3& root_t, const Vec3& root_r);

// Frame t of a motion posed with an explicit shape.
PosedMesh pose_frame(const BodyTemplate& body, const Eigen::VectorXd& beta,
                     const HumanMotion& motion, std::size_t t);

// Shaped rest vertices regressed to joints: R * (T + S beta).
Points rest_joints(const BodyTemplate& body, const Eigen::VectorXd& beta);

// joint_regressor * posed vertices.
Points joint_positions(const BodyTemplate& body, const PosedMesh& posed);

// Argmax of the skinning weights per vertex, ties to the lower joint.
std::vector<int> part_labels_from_skinning(const BodyTemplate& body);

struct RobotLink {
  std::string name;
  int parent = -1;
  Vec3 offset = Vec3::Zero();  // parent frame, at zero joint angles
  Vec3 axis = Vec3::Zero();    // zero for a fixed link
  int dof = -1;                // index into the joint vector, -1 if fixed
};

struct KeypointPair {
  int human_joint = 0;
  int robot_link = 0;
};

// Tree of revolute links. links[0] is the floating root; parents precede
// children.
struct RobotModel {
  std::vector<RobotLink> links;
  std::vector<std::pair<double, double>> joint_limits;  // per DOF, radians
  std::vector<KeypointPair> keypoint_map;
  std::vector<int> part_labels;       // per template vertex
  std::map<int, int> part_to_link;    // body part -> link
  std::vector<int> upper_body_links;  // keypoints used by the interaction reward
  std::vector<int> feet_links;        // excluded from contact rewards

  std::size_t num_links() const { return links.size(); }
  std::size_t num_dofs() const { return joint_limits.size(); }
  int link_index(const std::string& name) const;
  std::vector<int> non_feet_links() const;
  // Throws InvalidInput / ConfigError on violated invariants. With a body,
  // also checks the human side of the keypoint map and the part labels.
  void validate() const;
  void validate(const BodyTemplate& body) const;
};

struct FkResult {
  std::vector<Vec3> positions;
  std::vector<Quat> orientations;
  Eigen::VectorXd joint_angles;  // after clamping
  bool clamped = false;
};

FkResult forward_kinematics(const RobotModel& robot,
                            const Eigen::Ref<const Eigen::VectorXd>& joint_angles,
                            const Vec3& root_position, const Vec3& root_rotvec);

}  // namespace duet

#endif  // DUET_BODY_MODEL_HPP_
