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

#include "hrtf_forge/bvh.hpp"

#include <algorithm>
#include <numeric>

#include "hrtf_forge/error.hpp"
#include "hrtf_forge/geometry.hpp"

namespace hforge {

namespace {
constexpr int kLeafSize = 4;

inline bool better(double d2, int face, double best_d2, int best_face) {
  return d2 < best_d2 || (d2 == best_d2 && face < best_face);
}
}  // namespace

TriangleBVH::TriangleBVH(const TriangleMesh& mesh)
    : TriangleBVH(std::make_shared<const TriangleMesh>(mesh)) {}

TriangleBVH::TriangleBVH(std::shared_ptr<const TriangleMesh> mesh) : mesh_(std::move(mesh)) {
  if (!mesh_ || mesh_->faces.empty()) throw InvalidArgument("TriangleBVH: mesh has no faces");
  const int n = static_cast<int>(mesh_->faces.size());
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  std::vector<Vec3> centroids(n);
  for (int f = 0; f < n; ++f) centroids[f] = face_centroid(*mesh_, f);
  nodes_.reserve(2 * (n / kLeafSize + 1));
  nodes_.emplace_back();
  build(0, 0, n, centroids);
}

void TriangleBVH::build(int node, int first, int count, std::vector<Vec3>& centroids) {
  Aabb box, cbox;
  for (int i = first; i < first + count; ++i) {
    const int f = order_[i];
    for (int k = 0; k < 3; ++k) box.extend(mesh_->corner(f, k));
    cbox.extend(centroids[f]);
  }
  nodes_[node].box = box;
  nodes_[node].first = first;
  nodes_[node].count = count;
  if (count <= kLeafSize) return;

  int axis = 0;
  cbox.extent().maxCoeff(&axis);
  const int mid = first + count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                   [&](int a, int b) {
                     const double ca = centroids[a][axis], cb = centroids[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const int left = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  const int right = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  nodes_[node].left = left;
  nodes_[node].right = right;
  nodes_[node].count = 0;
  build(left, first, mid - first, centroids);
  build(right, mid, first + count - mid, centroids);
}

ClosestHit TriangleBVH::query(const Vec3& p, const std::function<bool(int)>* keep) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  int best_face = -1;
  TriangleProjection<double> best_proj{};

  std::vector<int> stack;
  stack.reserve(64);
  stack.push_back(0);
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const Node& node = nodes_[id];
    if (node.box.squared_distance(p) > best_d2) continue;
    if (node.left < 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int f = order_[i];
        if (keep && !(*keep)(f)) continue;
        const auto proj = closest_point_on_triangle<double>(p, mesh_->corner(f, 0), mesh_->corner(f, 1),
                                                            mesh_->corner(f, 2));
        if (better(proj.squared_distance, f, best_d2, best_face)) {
          best_d2 = proj.squared_distance;
          best_face = f;
          best_proj = proj;
        }
      }
      continue;
    }
    const double dl = nodes_[node.left].box.squared_distance(p);
    const double dr = nodes_[node.right].box.squared_distance(p);
    // Push the farther child first so the nearer one is expanded next.
    if (dl <= dr) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  ClosestHit hit;
  if (best_face >= 0) {
    hit.face = best_face;
    hit.point = best_proj.closest;
    hit.barycentric = best_proj.barycentric;
    hit.distance = std::sqrt(best_d2);
  }
  return hit;
}

ClosestHit TriangleBVH::closest(const Vec3& p) const { return query(p, nullptr); }

ClosestHit TriangleBVH::closest_filtered(const Vec3& p, const std::function<bool(int)>& keep) const {
  return query(p, &keep);
}

ClosestHit closest_brute_force(const TriangleMesh& mesh, const Vec3& p) {
  ClosestHit hit;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto proj =
        closest_point_on_triangle<double>(p, mesh.corner(f, 0), mesh.corner(f, 1), mesh.corner(f, 2));
    if (better(proj.squared_distance, static_cast<int>(f), best_d2, hit.face)) {
      best_d2 = proj.squared_distance;
      hit.face = static_cast<int>(f);
      hit.point = proj.closest;
      hit.barycentric = proj.barycentric;
    }
  }
  hit.distance = std::sqrt(best_d2);
  return hit;
}

}  // namespace hforge
