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

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hforge {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Face = std::array<int, 3>;

/// Acoustic/anatomical region a face belongs to.
enum class Region : std::uint8_t { Skin = 0, LeftEar = 1, RightEar = 2 };

std::string_view region_name(Region r);             // "skin", "left_ear", "right_ear"
std::optional<Region> region_from_name(std::string_view name);

/// Indexed triangle surface. Units are meters. `labels` is either empty or
/// holds one Region per face.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<Region> labels;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }
  bool has_labels() const { return !labels.empty(); }
  bool empty() const { return faces.empty(); }

  const Vec3& corner(std::size_t f, int k) const { return vertices[faces[f][k]]; }
};

/// Throws MeshError when an index is out of range, a face repeats a vertex,
/// a coordinate is non-finite, or the label array has the wrong length.
void check_indices(const TriangleMesh& mesh);

/// Axis-aligned box.
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
  bool valid() const { return (lo.array() <= hi.array()).all(); }
  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 extent() const { return hi - lo; }
  bool contains(const Aabb& b) const {
    return (lo.array() <= b.lo.array()).all() && (hi.array() >= b.hi.array()).all();
  }
  /// Squared distance from p to the box (0 inside).
  double squared_distance(const Vec3& p) const {
    const Vec3 d = (lo - p).cwiseMax(p - hi).cwiseMax(Vec3::Zero());
    return d.squaredNorm();
  }
};

Aabb bounding_box(const TriangleMesh& mesh);

/// Unnormalized face normal (b - a) x (c - a); its norm is twice the area.
Vec3 face_normal_scaled(const TriangleMesh& mesh, std::size_t f);
Vec3 face_normal(const TriangleMesh& mesh, std::size_t f);
double face_area(const TriangleMesh& mesh, std::size_t f);
Vec3 face_centroid(const TriangleMesh& mesh, std::size_t f);
double surface_area(const TriangleMesh& mesh);

/// Signed enclosed volume (positive for outward-oriented closed meshes).
double signed_volume(const TriangleMesh& mesh);

/// Area-weighted vertex normals (unit length; zero for isolated vertices).
std::vector<Vec3> vertex_normals(const TriangleMesh& mesh);

/// Unique undirected edges (lo, hi) in order of first appearance scanning
/// faces, and for each face the edge ids of (v0v1, v1v2, v2v0).
struct EdgeTable {
  std::vector<std::pair<int, int>> edges;
  std::vector<std::array<int, 3>> face_edges;
};
EdgeTable build_edge_table(const TriangleMesh& mesh);

double max_edge_length(const TriangleMesh& mesh);
double mean_edge_length(const TriangleMesh& mesh);

/// Rotation + translation: x' = rotation * x + translation.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }
  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  RigidTransform inverse() const;
  /// (*this) after `first`: x -> this(first(x)).
  RigidTransform compose(const RigidTransform& first) const;
  /// Orthonormal with determinant +1 within `tol`.
  bool is_valid(double tol = 1e-9) const;
};

/// v' = R v + t for every vertex; faces and labels are copied. Throws
/// InvalidArgument when the rotation is not proper orthonormal.
TriangleMesh apply_transform(const TriangleMesh& mesh, const RigidTransform& t);

}  // namespace hforge
