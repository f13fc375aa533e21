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

#include <string>
#include <vector>

#include "hrtf_forge/bvh.hpp"
#include "hrtf_forge/mesh.hpp"

namespace hforge {

inline constexpr double kDefaultMaxNormalAngleDeg = 60.0;

/// Point on a target surface: face index plus barycentric weights of its
/// corners (non-negative, summing to 1).
struct SurfacePoint {
  int face = -1;
  Vec3 barycentric = Vec3::Zero();
};

struct Projection {
  SurfacePoint point;
  Vec3 position = Vec3::Zero();
  double distance = 0.0;
  bool fallback = false;  // no face passed the normal test
};

/// Closest point on target among faces whose unit normal is within
/// max_normal_angle_deg of n; the unconstrained closest point (flagged as
/// fallback) when no face qualifies.
Projection project_point(const Vec3& p, const Vec3& n, const TriangleBVH& target, double max_normal_angle_deg);

struct CorrespondenceMap {
  struct Entry {
    int query = -1;  // query vertex index
    SurfacePoint point;
  };
  std::string target_mesh_id;
  std::vector<Entry> entries;  // normal-compatible projections, in query order
  std::vector<int> rejected;   // query vertices that needed the fallback

  std::size_t query_count() const { return entries.size() + rejected.size(); }
  double fallback_fraction() const {
    return query_count() ? static_cast<double>(rejected.size()) / static_cast<double>(query_count()) : 0.0;
  }
};

/// Projects every query vertex (with its area-weighted normal) onto the
/// target. Throws MeshError when more than half of the vertices fall back.
CorrespondenceMap build_correspondence(const TriangleMesh& query, const TriangleMesh& target,
                                       double max_normal_angle_deg = kDefaultMaxNormalAngleDeg,
                                       const std::string& target_mesh_id = {});
CorrespondenceMap build_correspondence(const TriangleMesh& query, const TriangleBVH& target,
                                       double max_normal_angle_deg = kDefaultMaxNormalAngleDeg,
                                       const std::string& target_mesh_id = {});

/// Per-vertex projections without the fallback limit (one per query vertex).
std::vector<Projection> project_vertices(const TriangleMesh& query, const TriangleBVH& target,
                                         double max_normal_angle_deg);

/// b0 A + b1 B + b2 C for every entry. Throws InvalidArgument on a face index
/// outside the target.
std::vector<Vec3> resolve(const CorrespondenceMap& map, const TriangleMesh& target);
Vec3 resolve(const SurfacePoint& point, const TriangleMesh& target);

}  // namespace hforge
