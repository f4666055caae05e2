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

#include "duet/contact.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <utility>

#include "duet/errors.hpp"
#include "parallel.hpp"

namespace duet {
namespace {

// Boxes are widened by this much before pruning so that rounding in the box
// gap can never discard a pair whose triangle distance rounds to <= epsilon.
constexpr double kPruneSlack = 1e-9;

Aabb face_box(const PosedMesh& mesh, int f) {
  Aabb box;
  for (int k = 0; k < 3; ++k) box.extend(Vec3(mesh.vertices.row((*mesh.faces)(f, k))));
  return box;
}

}  // namespace

double box_distance_squared(const Aabb& a, const Aabb& b) {
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double gap = std::max({0.0, b.lo[i] - a.hi[i], a.lo[i] - b.hi[i]});
    d2 += gap * gap;
  }
  return d2;
}

std::size_t ContactSet::total_pairs() const {
  std::size_t n = 0;
  for (const auto& frame : per_frame) n += frame.size();
  return n;
}

Bvh Bvh::build(const PosedMesh& mesh) {
  const int nf = static_cast<int>(mesh.num_faces());
  if (nf < 1) throw InvalidInput("cannot build a BVH over a mesh without faces");

  Bvh bvh;
  bvh.face_boxes_.resize(nf);
  std::vector<Vec3> centroids(nf);
  for (int f = 0; f < nf; ++f) {
    bvh.face_boxes_[f] = face_box(mesh, f);
    const Eigen::Matrix3d tri = mesh.triangle(f);
    centroids[f] = tri.colwise().mean().transpose();
    const Vec3 n = (Vec3(tri.row(1)) - Vec3(tri.row(0)))
                       .cross(Vec3(tri.row(2)) - Vec3(tri.row(0)));
    if (n.squaredNorm() == 0.0) bvh.degenerate_.push_back(f);
  }
  bvh.order_.resize(nf);
  std::iota(bvh.order_.begin(), bvh.order_.end(), 0);
  bvh.nodes_.reserve(2 * (nf / kLeafSize + 1));

  // Iterative build; (node, first, count) work items.
  struct Item {
    int node, first, count;
  };
  bvh.nodes_.emplace_back();
  std::vector<Item> stack{{0, 0, nf}};
  while (!stack.empty()) {
    const Item item = stack.back();
    stack.pop_back();
    Aabb box;
    Aabb centroid_box;
    for (int i = item.first; i < item.first + item.count; ++i) {
      box.extend(bvh.face_boxes_[bvh.order_[i]]);
      centroid_box.extend(centroids[bvh.order_[i]]);
    }
    bvh.nodes_[item.node].box = box;
    if (item.count <= kLeafSize) {
      bvh.nodes_[item.node].first = item.first;
      bvh.nodes_[item.node].count = item.count;
      continue;
    }
    int axis = 0;
    (centroid_box.hi - centroid_box.lo).maxCoeff(&axis);
    const int mid = item.first + item.count / 2;
    auto begin = bvh.order_.begin() + item.first;
    std::nth_element(begin, bvh.order_.begin() + mid, begin + item.count,
                     [&](int a, int b) {
                       const double ca = centroids[a][axis];
                       const double cb = centroids[b][axis];
                       return ca < cb || (ca == cb && a < b);
                     });
    const int left = static_cast<int>(bvh.nodes_.size());
    bvh.nodes_.emplace_back();
    bvh.nodes_.emplace_back();
    bvh.nodes_[item.node].left = left;
    bvh.nodes_[item.node].right = left + 1;
    stack.push_back({left + 1, mid, item.first + item.count - mid});
    stack.push_back({left, item.first, mid - item.first});
  }
  return bvh;
}

std::vector<ContactPair> collision_pairs(const PosedMesh& mesh_a, const Bvh& bvh_a,
                                         const PosedMesh& mesh_b, const Bvh& bvh_b,
                                         double epsilon) {
  if (!(epsilon >= 0.0)) throw InvalidInput("epsilon must be >= 0");
  const double reach = epsilon + kPruneSlack;
  const double reach2 = reach * reach;
  std::vector<ContactPair> out;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  const auto& na = bvh_a.nodes();
  const auto& nb = bvh_b.nodes();
  while (!stack.empty()) {
    const auto [ia, ib] = stack.back();
    stack.pop_back();
    const Bvh::Node& a = na[ia];
    const Bvh::Node& b = nb[ib];
    if (box_distance_squared(a.box, b.box) > reach2) continue;
    if (a.is_leaf() && b.is_leaf()) {
      for (int i = a.first; i < a.first + a.count; ++i) {
        const int fa = bvh_a.face_order()[i];
        const Eigen::Matrix3d ta = mesh_a.triangle(fa);
        for (int k = b.first; k < b.first + b.count; ++k) {
          const int fb = bvh_b.face_order()[k];
          if (box_distance_squared(bvh_a.face_boxes()[fa],
                                   bvh_b.face_boxes()[fb]) > reach2) {
            continue;
          }
          const double d = face_distance(ta, mesh_b.triangle(fb));
          if (d <= epsilon) out.push_back({fa, fb, d});
        }
      }
      continue;
    }
    // Descend the larger (or the only internal) side.
    const bool split_a =
        !a.is_leaf() && (b.is_leaf() || (a.box.hi - a.box.lo).squaredNorm() >=
                                             (b.box.hi - b.box.lo).squaredNorm());
    if (split_a) {
      stack.push_back({a.left, ib});
      stack.push_back({a.right, ib});
    } else {
      stack.push_back({ia, b.left});
      stack.push_back({ia, b.right});
    }
  }
  std::sort(out.begin(), out.end(), [](const ContactPair& x, const ContactPair& y) {
    return std::tie(x.face_a, x.face_b) < std::tie(y.face_a, y.face_b);
  });
  return out;
}

std::vector<ContactPair> collision_pairs(const PosedMesh& mesh_a,
                                         const PosedMesh& mesh_b,
                                         double epsilon) {
  if (!(epsilon >= 0.0)) throw InvalidInput("epsilon must be >= 0");
  const Bvh bvh_a = Bvh::build(mesh_a);
  const Bvh bvh_b = Bvh::build(mesh_b);
  return collision_pairs(mesh_a, bvh_a, mesh_b, bvh_b, epsilon);
}

std::vector<ContactPair> collision_pairs_brute_force(const PosedMesh& mesh_a,
                                                     const PosedMesh& mesh_b,
                                                     double epsilon) {
  if (!(epsilon >= 0.0)) throw InvalidInput("epsilon must be >= 0");
  // Bounding spheres around the first corner only skip pairs that are
  // farther apart than the triangles can possibly reach.
  auto spheres = [](const PosedMesh& m) {
    std::vector<std::pair<Vec3, double>> s(m.num_faces());
    for (std::size_t f = 0; f < m.num_faces(); ++f) {
      const Eigen::Matrix3d t = m.triangle(f);
      const Vec3 c = t.row(0);
      const double r = std::max((Vec3(t.row(1)) - c).norm(), (Vec3(t.row(2)) - c).norm());
      s[f] = {c, r};
    }
    return s;
  };
  const auto sa = spheres(mesh_a);
  const auto sb = spheres(mesh_b);
  std::vector<ContactPair> out;
  for (std::size_t fa = 0; fa < mesh_a.num_faces(); ++fa) {
    const Eigen::Matrix3d ta = mesh_a.triangle(fa);
    for (std::size_t fb = 0; fb < mesh_b.num_faces(); ++fb) {
      const double gap = (sa[fa].first - sb[fb].first).norm() - sa[fa].second -
                         sb[fb].second;
      if (gap > epsilon + 1e-6) continue;
      const double d = face_distance(ta, mesh_b.triangle(fb));
      if (d <= epsilon) {
        out.push_back({static_cast<int>(fa), static_cast<int>(fb), d});
      }
    }
  }
  return out;
}

ContactSet detect_sequence(const BodyTemplate& body, const HumanMotion& motion_a,
                           const HumanMotion& motion_b, double epsilon,
                           const std::optional<Eigen::VectorXd>& beta_a,
                           const std::optional<Eigen::VectorXd>& beta_b) {
  if (!(epsilon >= 0.0)) throw InvalidInput("epsilon must be >= 0");
  motion_a.validate(body);
  motion_b.validate(body);
  if (motion_a.num_frames() != motion_b.num_frames()) {
    throw InvalidInput("motions have different lengths (" +
                       std::to_string(motion_a.num_frames()) + " vs " +
                       std::to_string(motion_b.num_frames()) + ")");
  }
  if (motion_a.dt != motion_b.dt) throw InvalidInput("motions have different dt");
  const Eigen::VectorXd& shape_a = beta_a ? *beta_a : motion_a.beta;
  const Eigen::VectorXd& shape_b = beta_b ? *beta_b : motion_b.beta;

  ContactSet set;
  set.epsilon = epsilon;
  set.per_frame.resize(motion_a.num_frames());
  detail::parallel_for(motion_a.num_frames(), [&](std::size_t t) {
    const PosedMesh a = pose_frame(body, shape_a, motion_a, t);
    const PosedMesh b = pose_frame(body, shape_b, motion_b, t);
    set.per_frame[t] = collision_pairs(a, b, epsilon);
  });
  return set;
}

}  // namespace duet
