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

#ifndef DUET_CONTACT_HPP_
#define DUET_CONTACT_HPP_

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "duet/body_model.hpp"

namespace duet {

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  bool contains(const Aabb& b, double slack) const {
    return (b.lo.array() >= lo.array() - slack).all() &&
           (b.hi.array() <= hi.array() + slack).all();
  }
};

// Squared gap between two boxes, zero when they overlap.
double box_distance_squared(const Aabb& a, const Aabb& b);

// Binary tree over the faces of one mesh. Splits at the median face
// centroid along the widest centroid axis; leaves hold at most kLeafSize
// faces.
class Bvh {
 public:
  static constexpr int kLeafSize = 4;

  struct Node {
    Aabb box;
    int left = -1;   // child node indices, -1 for leaves
    int right = -1;
    int first = 0;   // range into face_order() for leaves
    int count = 0;
    bool is_leaf() const { return left < 0; }
  };

  // Throws InvalidInput on a mesh without faces.
  static Bvh build(const PosedMesh& mesh);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& root() const { return nodes_.front(); }
  const std::vector<int>& face_order() const { return order_; }
  const std::vector<Aabb>& face_boxes() const { return face_boxes_; }
  // Faces with zero area; kept in the tree.
  const std::vector<int>& degenerate_faces() const { return degenerate_; }

 private:
  std::vector<Node> nodes_;
  std::vector<int> order_;
  std::vector<Aabb> face_boxes_;
  std::vector<int> degenerate_;
};

// Exact minimum Euclidean distance between two triangles given as 3x3
// matrices whose rows are the corners; zero when they intersect.
double face_distance(const Eigen::Matrix3d& tri_a, const Eigen::Matrix3d& tri_b);

struct ContactPair {
  int face_a = 0;
  int face_b = 0;
  double distance = 0.0;

  friend bool operator==(const ContactPair&, const ContactPair&) = default;
};

struct ContactSet {
  std::vector<std::vector<ContactPair>> per_frame;
  double epsilon = 0.0;

  std::size_t num_frames() const { return per_frame.size(); }
  std::size_t total_pairs() const;
};

// Every face pair with distance <= epsilon, sorted by (face_a, face_b).
std::vector<ContactPair> collision_pairs(const PosedMesh& mesh_a,
                                         const PosedMesh& mesh_b,
                                         double epsilon);
std::vector<ContactPair> collision_pairs(const PosedMesh& mesh_a, const Bvh& bvh_a,
                                         const PosedMesh& mesh_b, const Bvh& bvh_b,
                                         double epsilon);

// All F_a x F_b pairs, no acceleration structure. Reference for tests.
std::vector<ContactPair> collision_pairs_brute_force(const PosedMesh& mesh_a,
                                                     const PosedMesh& mesh_b,
                                                     double epsilon);

// Per-frame contacts between two posed motions. Each body is shaped with its
// motion's own beta unless an override is given.
ContactSet detect_sequence(const BodyTemplate& body, const HumanMotion& motion_a,
                           const HumanMotion& motion_b, double epsilon,
                           const std::optional<Eigen::VectorXd>& beta_a = {},
                           const std::optional<Eigen::VectorXd>& beta_b = {});

}  // namespace duet

#endif  // DUET_CONTACT_HPP_
