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

#ifndef DUET_ROTATION_HPP_
#define DUET_ROTATION_HPP_

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace duet {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

// Axis-angle vectors are the storage format; quaternions are used for
// composition. All conversions are smooth through the zero rotation.
Quat quat_from_rotvec(const Vec3& rotvec);

// Principal log map: the result has norm in [0, pi].
Vec3 rotvec_from_quat(const Quat& q);

Mat3 matrix_from_rotvec(const Vec3& rotvec);
Vec3 rotvec_from_matrix(const Mat3& m);

// Angle of the relative rotation a^-1 b, in [0, pi].
double geodesic_angle(const Quat& a, const Quat& b);

// Same rotation, expressed with norm in [0, pi].
Vec3 principal_rotvec(const Vec3& rotvec);

}  // namespace duet

#endif  // DUET_ROTATION_HPP_
