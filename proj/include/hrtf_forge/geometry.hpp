// Copyright 2026 The hrtf-forge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "hrtf_forge/error.hpp"

namespace hforge {

template <typename Scalar>
struct TriangleProjection {
  Eigen::Matrix<Scalar, 3, 1> closest;
  Eigen::Matrix<Scalar, 3, 1> barycentric;  // weights of (a, b, c)
  Scalar squared_distance;
  Scalar distance() const { return std::sqrt(squared_distance); }
};

/// Closest point on triangle (a, b, c) to p, by Voronoi-region
/// classification. No degeneracy check; see point_to_triangle.
template <typename Scalar>
TriangleProjection<Scalar> closest_point_on_triangle(const Eigen::Matrix<Scalar, 3, 1>& p,
                                                     const Eigen::Matrix<Scalar, 3, 1>& a,
                                                     const Eigen::Matrix<Scalar, 3, 1>& b,
                                                     const Eigen::Matrix<Scalar, 3, 1>& c) {
  using V = Eigen::Matrix<Scalar, 3, 1>;
  auto make = [&](Scalar wa, Scalar wb, Scalar wc) {
    TriangleProjection<Scalar> r;
    r.barycentric = V(wa, wb, wc);
    r.closest = wa * a + wb * b + wc * c;
    r.squared_distance = (p - r.closest).squaredNorm();
    return r;
  };
  const V ab = b - a;
  const V ac = c - a;
  const V ap = p - a;
  const Scalar d1 = ab.dot(ap);
  const Scalar d2 = ac.dot(ap);
  if (d1 <= Scalar(0) && d2 <= Scalar(0)) return make(1, 0, 0);

  const V bp = p - b;
  const Scalar d3 = ab.dot(bp);
  const Scalar d4 = ac.dot(bp);
  if (d3 >= Scalar(0) && d4 <= d3) return make(0, 1, 0);

  const Scalar vc = d1 * d4 - d3 * d2;
  if (vc <= Scalar(0) && d1 >= Scalar(0) && d3 <= Scalar(0)) {
    const Scalar v = d1 / (d1 - d3);
    return make(1 - v, v, 0);
  }

  const V cp = p - c;
  const Scalar d5 = ab.dot(cp);
  const Scalar d6 = ac.dot(cp);
  if (d6 >= Scalar(0) && d5 <= d6) return make(0, 0, 1);

  const Scalar vb = d5 * d2 - d1 * d6;
  if (vb <= Scalar(0) && d2 >= Scalar(0) && d6 <= Scalar(0)) {
    const Scalar w = d2 / (d2 - d6);
    return make(1 - w, 0, w);
  }

  const Scalar va = d3 * d6 - d5 * d4;
  if (va <= Scalar(0) && (d4 - d3) >= Scalar(0) && (d5 - d6) >= Scalar(0)) {
    const Scalar w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return make(0, 1 - w, w);
  }

  const Scalar denom = Scalar(1) / (va + vb + vc);
  const Scalar v = vb * denom;
  const Scalar w = vc * denom;
  return make(1 - v - w, v, w);
}

/// Triangle whose area is negligible relative to its longest edge squared.
template <typename Scalar>
bool is_degenerate_triangle(const Eigen::Matrix<Scalar, 3, 1>& a, const Eigen::Matrix<Scalar, 3, 1>& b,
                            const Eigen::Matrix<Scalar, 3, 1>& c) {
  const Scalar twice_area = (b - a).cross(c - a).norm();
  const Scalar longest =
      std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()});
  return !(twice_area > Scalar(1e-14) * longest) || !(longest > Scalar(0));
}

/// Closest point and Euclidean distance from p to triangle (a, b, c). Throws
/// InvalidArgument for degenerate triangles.
template <typename Scalar>
TriangleProjection<Scalar> point_to_triangle(const Eigen::Matrix<Scalar, 3, 1>& p,
                                             const Eigen::Matrix<Scalar, 3, 1>& a,
                                             const Eigen::Matrix<Scalar, 3, 1>& b,
                                             const Eigen::Matrix<Scalar, 3, 1>& c) {
  if (is_degenerate_triangle(a, b, c)) throw InvalidArgument("point_to_triangle: degenerate triangle");
  return closest_point_on_triangle(p, a, b, c);
}

/// Signed solid angle subtended by triangle (a, b, c) at p
/// (Van Oosterom and Strackee).
template <typename Scalar>
Scalar solid_angle(const Eigen::Matrix<Scalar, 3, 1>& p, const Eigen::Matrix<Scalar, 3, 1>& a,
                   const Eigen::Matrix<Scalar, 3, 1>& b, const Eigen::Matrix<Scalar, 3, 1>& c) {
  const Eigen::Matrix<Scalar, 3, 1> ra = a - p, rb = b - p, rc = c - p;
  const Scalar la = ra.norm(), lb = rb.norm(), lc = rc.norm();
  const Scalar numer = ra.dot(rb.cross(rc));
  const Scalar denom = la * lb * lc + ra.dot(rb) * lc + ra.dot(rc) * lb + rb.dot(rc) * la;
  return Scalar(2) * std::atan2(numer, denom);
}

}  // namespace hforge
