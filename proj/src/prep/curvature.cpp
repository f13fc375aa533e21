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

#include <deque>

#include "hrtf_forge/log.hpp"
#include "hrtf_forge/prep.hpp"
#include "hrtf_forge/topology.hpp"

namespace hforge {

namespace {
double cot(const Vec3& u, const Vec3& v) {
  const double s = u.cross(v).norm();
  return s > 0.0 ? u.dot(v) / s : 0.0;
}
}  // namespace

std::vector<double> mixed_areas(const TriangleMesh& mesh) {
  std::vector<double> area(mesh.vertices.size(), 0.0);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const double tri = face_area(mesh, f);
    for (int k = 0; k < 3; ++k) {
      const Vec3& p = mesh.corner(f, k);
      const Vec3& q = mesh.corner(f, (k + 1) % 3);
      const Vec3& r = mesh.corner(f, (k + 2) % 3);
      const bool obtuse_p = (q - p).dot(r - p) < 0.0;
      const bool obtuse_other = (p - q).dot(r - q) < 0.0 || (p - r).dot(q - r) < 0.0;
      double a;
      if (obtuse_p) {
        a = 0.5 * tri;
      } else if (obtuse_other) {
        a = 0.25 * tri;
      } else {
        // Voronoi region: (|pr|^2 cot q + |pq|^2 cot r) / 8
        a = ((r - p).squaredNorm() * cot(p - q, r - q) + (q - p).squaredNorm() * cot(p - r, q - r)) / 8.0;
      }
      area[mesh.faces[f][k]] += a;
    }
  }
  return area;
}

std::vector<double> estimate_curvature(const TriangleMesh& mesh) {
  const std::size_t n = mesh.vertices.size();
  std::vector<Vec3> lap(n, Vec3::Zero());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    for (int k = 0; k < 3; ++k) {
      // Edge (i, j) opposite corner o contributes cot(o) (v_j - v_i) to both ends.
      const int i = mesh.faces[f][k], j = mesh.faces[f][(k + 1) % 3], o = mesh.faces[f][(k + 2) % 3];
      const double w = cot(mesh.vertices[i] - mesh.vertices[o], mesh.vertices[j] - mesh.vertices[o]);
      const Vec3 d = mesh.vertices[j] - mesh.vertices[i];
      lap[i] += w * d;
      lap[j] -= w * d;
    }
  }
  const std::vector<double> area = mixed_areas(mesh);

  std::vector<char> boundary(n, 0);
  const EdgeTable edges = build_edge_table(mesh);
  std::vector<int> uses(edges.edges.size(), 0);
  for (const auto& fe : edges.face_edges)
    for (int e : fe) ++uses[e];
  for (std::size_t e = 0; e < edges.edges.size(); ++e)
    if (uses[e] == 1) boundary[edges.edges[e].first] = boundary[edges.edges[e].second] = 1;

  std::vector<double> kappa(n, 0.0);
  int degenerate = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (area[v] > 0.0) {
      kappa[v] = lap[v].norm() / (4.0 * area[v]);
    } else if (!boundary[v]) {
      ++degenerate;
    }
  }
  if (degenerate > 0)
    log::warn("curvature", "zero mixed area; curvature set to 0", "vertices=" + std::to_string(degenerate));

  // Boundary vertices take the value of the nearest interior vertex by hops.
  std::vector<std::vector<int>> adj(n);
  for (const auto& [a, b] : edges.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> source(n, -1);
  std::deque<int> queue;
  for (std::size_t v = 0; v < n; ++v)
    if (!boundary[v] && !adj[v].empty()) {
      source[v] = static_cast<int>(v);
      queue.push_back(static_cast<int>(v));
    }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int w : adj[v])
      if (source[w] < 0) {
        source[w] = source[v];
        queue.push_back(w);
      }
  }
  for (std::size_t v = 0; v < n; ++v)
    if (boundary[v] && source[v] >= 0) kappa[v] = kappa[source[v]];
  return kappa;
}

}  // namespace hforge
