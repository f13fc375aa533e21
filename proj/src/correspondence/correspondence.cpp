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

#include "hrtf_forge/correspondence.hpp"

#include <cmath>
#include <numbers>

#include "hrtf_forge/error.hpp"
#include "hrtf_forge/parallel.hpp"

namespace hforge {

Projection project_point(const Vec3& p, const Vec3& n, const TriangleBVH& target, double max_normal_angle_deg) {
  const TriangleMesh& mesh = target.mesh();
  const double cos_max = std::cos(max_normal_angle_deg * std::numbers::pi / 180.0);
  ClosestHit hit = target.closest_filtered(p, [&](int f) {
    const Vec3 fn = face_normal_scaled(mesh, f);
    const double len = fn.norm();
    return len > 0.0 && fn.dot(n) >= cos_max * len;
  });
  Projection out;
  if (!hit.found()) {
    hit = target.closest(p);
    out.fallback = true;
  }
  out.point.face = hit.face;
  out.point.barycentric = hit.barycentric;
  out.position = hit.point;
  out.distance = hit.distance;
  return out;
}

std::vector<Projection> project_vertices(const TriangleMesh& query, const TriangleBVH& target,
                                         double max_normal_angle_deg) {
  const std::vector<Vec3> normals = vertex_normals(query);
  std::vector<Projection> out(query.vertices.size());
  parallel_for(0, static_cast<std::ptrdiff_t>(out.size()), [&](std::ptrdiff_t i) {
    out[i] = project_point(query.vertices[i], normals[i], target, max_normal_angle_deg);
  });
  return out;
}

CorrespondenceMap build_correspondence(const TriangleMesh& query, const TriangleBVH& target,
                                       double max_normal_angle_deg, const std::string& target_mesh_id) {
  const std::vector<Projection> proj = project_vertices(query, target, max_normal_angle_deg);
  CorrespondenceMap map;
  map.target_mesh_id = target_mesh_id;
  for (std::size_t i = 0; i < proj.size(); ++i) {
    if (proj[i].fallback)
      map.rejected.push_back(static_cast<int>(i));
    else
      map.entries.push_back({static_cast<int>(i), proj[i].point});
  }
  if (map.fallback_fraction() > 0.5)
    throw MeshError("build_correspondence: " + std::to_string(map.rejected.size()) + " of " +
                    std::to_string(map.query_count()) +
                    " vertices failed the normal test (meshes not aligned?)");
  return map;
}

CorrespondenceMap build_correspondence(const TriangleMesh& query, const TriangleMesh& target,
                                       double max_normal_angle_deg, const std::string& target_mesh_id) {
  const TriangleBVH bvh(target);
  return build_correspondence(query, bvh, max_normal_angle_deg, target_mesh_id);
}

Vec3 resolve(const SurfacePoint& point, const TriangleMesh& target) {
  if (point.face < 0 || static_cast<std::size_t>(point.face) >= target.faces.size())
    throw InvalidArgument("resolve: face index " + std::to_string(point.face) + " out of range");
  const Vec3& w = point.barycentric;
  return w[0] * target.corner(point.face, 0) + w[1] * target.corner(point.face, 1) +
         w[2] * target.corner(point.face, 2);
}

std::vector<Vec3> resolve(const CorrespondenceMap& map, const TriangleMesh& target) {
  std::vector<Vec3> out;
  out.reserve(map.entries.size());
  for (const auto& e : map.entries) out.push_back(resolve(e.point, target));
  return out;
}

}  // namespace hforge
