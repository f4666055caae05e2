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

// Triangle-triangle distance.
//
// If an edge of either triangle pierces the other triangle the distance is
// zero. Otherwise the minimum is attained between an edge pair or between a
// vertex and the opposite face, so the nine edge-edge and six vertex-face
// closest-point problems cover every case.

#include <algorithm>
#include <cmath>

#include "duet/contact.hpp"

namespace duet {
namespace {

double segment_segment_distance2(const Vec3& p1, const Vec3& q1, const Vec3& p2,
                                 const Vec3& q2) {
  const Vec3 d1 = q1 - p1;
  const Vec3 d2 = q2 - p2;
  const Vec3 r = p1 - p2;
  const double a = d1.dot(d1);
  const double e = d2.dot(d2);
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;
  if (a == 0.0 && e == 0.0) return r.squaredNorm();
  if (a == 0.0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e == 0.0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      if (denom > 0.0) s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p1 + d1 * s) - (p2 + d2 * t)).squaredNorm();
}

// Closest point on a non-degenerate triangle (Voronoi region walk).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    return a + ab * (d1 / (d1 - d3));
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    return a + ac * (d2 / (d2 - d6));
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  }

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

bool segment_pierces_triangle(const Vec3& p, const Vec3& q, const Vec3& a,
                              const Vec3& b, const Vec3& c, const Vec3& n) {
  const double dp = n.dot(p - a);
  const double dq = n.dot(q - a);
  if ((dp > 0.0 && dq > 0.0) || (dp < 0.0 && dq < 0.0)) return false;
  // Coplanar segments are covered by the edge-edge and vertex-face cases.
  if (dp == dq) return false;
  const Vec3 x = p + (q - p) * (dp / (dp - dq));
  return n.dot((b - a).cross(x - a)) >= 0.0 &&
         n.dot((c - b).cross(x - b)) >= 0.0 &&
         n.dot((a - c).cross(x - c)) >= 0.0;
}

bool edges_pierce(const Eigen::Matrix3d& edges_of, const Eigen::Matrix3d& tri,
                  const Vec3& n) {
  const Vec3 a = tri.row(0), b = tri.row(1), c = tri.row(2);
  for (int i = 0; i < 3; ++i) {
    const Vec3 p = edges_of.row(i);
    const Vec3 q = edges_of.row((i + 1) % 3);
    if (segment_pierces_triangle(p, q, a, b, c, n)) return true;
  }
  return false;
}

}  // namespace

double face_distance(const Eigen::Matrix3d& tri_a, const Eigen::Matrix3d& tri_b) {
  const Vec3 na = (Vec3(tri_a.row(1)) - Vec3(tri_a.row(0)))
                      .cross(Vec3(tri_a.row(2)) - Vec3(tri_a.row(0)));
  const Vec3 nb = (Vec3(tri_b.row(1)) - Vec3(tri_b.row(0)))
                      .cross(Vec3(tri_b.row(2)) - Vec3(tri_b.row(0)));
  const bool a_ok = na.squaredNorm() > 0.0;
  const bool b_ok = nb.squaredNorm() > 0.0;

  if (b_ok && edges_pierce(tri_a, tri_b, nb)) return 0.0;
  if (a_ok && edges_pierce(tri_b, tri_a, na)) return 0.0;

  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const Vec3 p1 = tri_a.row(i), q1 = tri_a.row((i + 1) % 3);
    for (int j = 0; j < 3; ++j) {
      const Vec3 p2 = tri_b.row(j), q2 = tri_b.row((j + 1) % 3);
      best = std::min(best, segment_segment_distance2(p1, q1, p2, q2));
    }
  }
  if (b_ok) {
    for (int i = 0; i < 3; ++i) {
      const Vec3 p = tri_a.row(i);
      best = std::min(best, (p - closest_point_on_triangle(p, tri_b.row(0),
                                                           tri_b.row(1),
                                                           tri_b.row(2)))
                                .squaredNorm());
    }
  }
  if (a_ok) {
    for (int i = 0; i < 3; ++i) {
      const Vec3 p = tri_b.row(i);
      best = std::min(best, (p - closest_point_on_triangle(p, tri_a.row(0),
                                                           tri_a.row(1),
                                                           tri_a.row(2)))
                                .squaredNorm());
    }
  }
  return std::sqrt(best);
}

}  // namespace duet
