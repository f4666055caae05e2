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

#include "duet/rotation.hpp"

#include <cmath>
#include <numbers>

namespace duet {

Quat quat_from_rotvec(const Vec3& rotvec) {
  const double angle = rotvec.norm();
  const double half = 0.5 * angle;
  // sin(x/2)/x, Taylor expanded near zero.
  double k;
  if (angle < 1e-8) {
    k = 0.5 - angle * angle / 48.0;
  } else {
    k = std::sin(half) / angle;
  }
  return Quat(std::cos(half), k * rotvec.x(), k * rotvec.y(), k * rotvec.z());
}

Vec3 rotvec_from_quat(const Quat& q_in) {
  Quat q = q_in.normalized();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const Vec3 v = q.vec();
  const double s = v.norm();
  if (s < 1e-12) {
    // angle = 2 asin(s) ~ 2 s
    return 2.0 * v;
  }
  const double angle = 2.0 * std::atan2(s, q.w());
  return v * (angle / s);
}

Mat3 matrix_from_rotvec(const Vec3& rotvec) {
  return quat_from_rotvec(rotvec).toRotationMatrix();
}

Vec3 rotvec_from_matrix(const Mat3& m) { return rotvec_from_quat(Quat(m)); }

double geodesic_angle(const Quat& a, const Quat& b) {
  return rotvec_from_quat(a.conjugate() * b).norm();
}

Vec3 principal_rotvec(const Vec3& rotvec) {
  if (rotvec.norm() <= std::numbers::pi) return rotvec;
  return rotvec_from_quat(quat_from_rotvec(rotvec));
}

}  // namespace duet
