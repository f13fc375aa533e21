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

#include "hrtf_forge/mesh.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

#include "hrtf_forge/error.hpp"

namespace hforge {

std::string_view region_name(Region r) {
  switch (r) {
    case Region::Skin: return "skin";
    case Region::LeftEar: return "left_ear";
    case Region::RightEar: return "right_ear";
  }
  return "skin";
}

std::optional<Region> region_from_name(std::string_view name) {
  if (name == "skin") return Region::Skin;
  if (name == "left_ear") return Region::LeftEar;
  if (name == "right_ear") return Region::RightEar;
  return std::nullopt;
}

void check_indices(const TriangleMesh& mesh) {
  const int n = static_cast<int>(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (!mesh.vertices[i].allFinite())
      throw MeshError("vertex " + std::to_string(i) + " has a non-finite coordinate");
  }
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& t = mesh.faces[f];
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= n)
        throw MeshError("face " + std::to_string(f) + " references vertex " +
                        std::to_string(t[k]) + " out of range");
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw MeshError("face " + std::to_string(f) + " repeats a vertex index");
  }
  if (!mesh.labels.empty() && mesh.labels.size() != mesh.faces.size())
    throw MeshError("label count does not match face count");
}

Aabb bounding_box(const TriangleMesh& mesh) {
  Aabb box;
  for (const Vec3& v : mesh.vertices) box.extend(v);
  return box;
}

Vec3 face_normal_scaled(const TriangleMesh& mesh, std::size_t f) {
  const Vec3& a = mesh.corner(f, 0);
  return (mesh.corner(f, 1) - a).cross(mesh.corner(f, 2) - a);
}

Vec3 face_normal(const TriangleMesh& mesh, std::size_t f) {
  const Vec3 n = face_normal_scaled(mesh, f);
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

double face_area(const TriangleMesh& mesh, std::size_t f) {
  return 0.5 * face_normal_scaled(mesh, f).norm();
}

Vec3 face_centroid(const TriangleMesh& mesh, std::size_t f) {
  return (mesh.corner(f, 0) + mesh.corner(f, 1) + mesh.corner(f, 2)) / 3.0;
}

double surface_area(const TriangleMesh& mesh) {
  double sum = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) sum += face_area(mesh, f);
  return sum;
}

double signed_volume(const TriangleMesh& mesh) {
  double sum = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f)
    sum += mesh.corner(f, 0).dot(mesh.corner(f, 1).cross(mesh.corner(f, 2)));
  return sum / 6.0;
}

std::vector<Vec3> vertex_normals(const TriangleMesh& mesh) {
  std::vector<Vec3> normals(mesh.vertices.size(), Vec3::Zero());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Vec3 n = face_normal_scaled(mesh, f);
    for (int k = 0; k < 3; ++k) normals[mesh.faces[f][k]] += n;
  }
  for (Vec3& n : normals) {
    const double len = n.norm();
    if (len > 0.0) n /= len;
  }
  return normals;
}

EdgeTable build_edge_table(const TriangleMesh& mesh) {
  EdgeTable table;
  table.face_edges.resize(mesh.faces.size());
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(mesh.faces.size() * 2);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    for (int k = 0; k < 3; ++k) {
      int a = mesh.faces[f][k];
      int b = mesh.faces[f][(k + 1) % 3];
      if (a > b) std::swap(a, b);
      const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
      auto [it, inserted] = index.try_emplace(key, static_cast<int>(table.edges.size()));
      if (inserted) table.edges.emplace_back(a, b);
      table.face_edges[f][k] = it->second;
    }
  }
  return table;
}

double max_edge_length(const TriangleMesh& mesh) {
  double best = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f)
    for (int k = 0; k < 3; ++k)
      best = std::max(best, (mesh.corner(f, k) - mesh.corner(f, (k + 1) % 3)).norm());
  return best;
}

double mean_edge_length(const TriangleMesh& mesh) {
  const EdgeTable table = build_edge_table(mesh);
  if (table.edges.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [a, b] : table.edges) sum += (mesh.vertices[a] - mesh.vertices[b]).norm();
  return sum / static_cast<double>(table.edges.size());
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

RigidTransform RigidTransform::compose(const RigidTransform& first) const {
  RigidTransform out;
  out.rotation = rotation * first.rotation;
  out.translation = rotation * first.translation + translation;
  return out;
}

bool RigidTransform::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

TriangleMesh apply_transform(const TriangleMesh& mesh, const RigidTransform& t) {
  if (!t.is_valid()) throw InvalidArgument("apply_transform: rotation is not proper orthonormal");
  TriangleMesh out;
  out.faces = mesh.faces;
  out.labels = mesh.labels;
  out.vertices.reserve(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) out.vertices.push_back(t.apply(v));
  return out;
}

}  // namespace hforge
