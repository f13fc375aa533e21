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

#include <functional>
#include <memory>
#include <vector>

#include "hrtf_forge/mesh.hpp"

namespace hforge {

struct ClosestHit {
  int face = -1;
  Vec3 point = Vec3::Zero();
  Vec3 barycentric = Vec3::Zero();
  double distance = std::numeric_limits<double>::infinity();

  bool found() const { return face >= 0; }
};

/// Axis-aligned bounding-volume hierarchy over the faces of one mesh. The
/// BVH keeps a shared handle on the mesh, so it stays valid on its own.
/// Queries are const and thread-safe.
class TriangleBVH {
 public:
  struct Node {
    Aabb box;
    int left = -1;   // child node ids, -1 for leaves
    int right = -1;
    int first = 0;   // leaf: range into face_order()
    int count = 0;
  };

  TriangleBVH() = default;
  /// Throws InvalidArgument on an empty mesh.
  explicit TriangleBVH(std::shared_ptr<const TriangleMesh> mesh);
  explicit TriangleBVH(const TriangleMesh& mesh);

  const TriangleMesh& mesh() const { return *mesh_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<int>& face_order() const { return order_; }

  /// Exact closest point on the surface.
  ClosestHit closest(const Vec3& p) const;

  /// Closest point among faces accepted by `keep`; not found when no face
  /// qualifies.
  ClosestHit closest_filtered(const Vec3& p, const std::function<bool(int)>& keep) const;

 private:
  void build(int node, int first, int count, std::vector<Vec3>& centroids);
  ClosestHit query(const Vec3& p, const std::function<bool(int)>* keep) const;

  std::shared_ptr<const TriangleMesh> mesh_;
  std::vector<Node> nodes_;
  std::vector<int> order_;
};

/// Reference O(F) scan with the same tie-breaking as the BVH (first face
/// reaching the minimum in index order wins).
ClosestHit closest_brute_force(const TriangleMesh& mesh, const Vec3& p);

}  // namespace hforge
