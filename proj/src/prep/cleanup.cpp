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

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include "hrtf_forge/error.hpp"
#include "hrtf_forge/log.hpp"
#include "hrtf_forge/prep.hpp"
#include "hrtf_forge/spatial_hash.hpp"
#include "hrtf_forge/topology.hpp"

namespace hforge {

namespace {

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

// Representative of each vertex after welding; the lowest index of a
// cluster wins, so positions never move.
std::vector<int> weld_map(const std::vector<Vec3>& pts, double tol) {
  std::vector<int> parent(pts.size());
  std::iota(parent.begin(), parent.end(), 0);
  if (tol <= 0.0) return parent;
  SpatialHash grid(tol);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    grid.visit_near(pts[i], [&](int j) {
      if ((pts[i] - pts[j]).norm() <= tol) {
        const int a = find_root(parent, static_cast<int>(i)), b = find_root(parent, j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    });
    grid.insert(pts[i], static_cast<int>(i));
  }
  for (std::size_t i = 0; i < pts.size(); ++i) parent[i] = find_root(parent, static_cast<int>(i));
  return parent;
}

// Flood fill over manifold edges so adjacent faces traverse shared edges in
// opposite directions.
void orient_consistently(TriangleMesh& mesh) {
  std::map<std::pair<int, int>, std::vector<int>> edge_faces;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f)
    for (int k = 0; k < 3; ++k) {
      const int a = mesh.faces[f][k], b = mesh.faces[f][(k + 1) % 3];
      edge_faces[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(f));
    }
  auto has_directed = [&](int f, int a, int b) {
    const Face& t = mesh.faces[f];
    for (int k = 0; k < 3; ++k)
      if (t[k] == a && t[(k + 1) % 3] == b) return true;
    return false;
  };

  std::vector<char> seen(mesh.faces.size(), 0);
  bool conflict = false;
  for (std::size_t seed = 0; seed < mesh.faces.size(); ++seed) {
    if (seen[seed]) continue;
    seen[seed] = 1;
    std::deque<int> queue{static_cast<int>(seed)};
    while (!queue.empty()) {
      const int f = queue.front();
      queue.pop_front();
      for (int k = 0; k < 3; ++k) {
        const int a = mesh.faces[f][k], b = mesh.faces[f][(k + 1) % 3];
        const auto& adj = edge_faces[{std::min(a, b), std::max(a, b)}];
        if (adj.size() != 2) continue;
        const int g = adj[0] == f ? adj[1] : adj[0];
        const bool same_direction = has_directed(g, a, b);
        if (!seen[g]) {
          if (same_direction) std::swap(mesh.faces[g][1], mesh.faces[g][2]);
          seen[g] = 1;
          queue.push_back(g);
        } else if (same_direction) {
          conflict = true;
        }
      }
    }
  }
  if (conflict) log::warn("cleanup", "surface is not orientable; orientation left partially inconsistent");
}

}  // namespace

TriangleMesh cleanup(const TriangleMesh& mesh, double weld_tol, double area_eps) {
  check_indices(mesh);
  const std::vector<int> rep = weld_map(mesh.vertices, weld_tol);

  TriangleMesh work;
  work.vertices = mesh.vertices;
  std::set<std::array<int, 3>> seen_faces;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    Face t{rep[mesh.faces[f][0]], rep[mesh.faces[f][1]], rep[mesh.faces[f][2]]};
    if (t[0] == t[1] || t[1] == t[2] || t[2] == t[0]) continue;
    const double area = 0.5 * (work.vertices[t[1]] - work.vertices[t[0]])
                                  .cross(work.vertices[t[2]] - work.vertices[t[0]])
                                  .norm();
    if (!(area >= area_eps)) continue;
    std::array<int, 3> key = t;
    std::sort(key.begin(), key.end());
    if (!seen_faces.insert(key).second) continue;
    work.faces.push_back(t);
    if (mesh.has_labels()) work.labels.push_back(mesh.labels[f]);
  }
  if (work.faces.empty()) throw MeshError("cleanup: no faces left after removing degenerate faces");

  // Largest component by area; ties go to the lowest component id.
  int count = 0;
  const std::vector<int> comp = face_components(work, &count);
  if (count > 1) {
    std::vector<double> area(count, 0.0);
    for (std::size_t f = 0; f < work.faces.size(); ++f) area[comp[f]] += face_area(work, f);
    const int keep = static_cast<int>(std::max_element(area.begin(), area.end()) - area.begin());
    TriangleMesh kept;
    kept.vertices = work.vertices;
    for (std::size_t f = 0; f < work.faces.size(); ++f) {
      if (comp[f] != keep) continue;
      kept.faces.push_back(work.faces[f]);
      if (work.has_labels()) kept.labels.push_back(work.labels[f]);
    }
    log::info("cleanup", "dropped smaller components", "components=" + std::to_string(count));
    work = std::move(kept);
  }

  orient_consistently(work);
  if (signed_volume(work) < 0.0)
    for (Face& t : work.faces) std::swap(t[1], t[2]);

  // Compact vertices, keeping their original order.
  std::vector<int> remap(work.vertices.size(), -1);
  for (const Face& t : work.faces)
    for (int v : t) remap[v] = 0;
  TriangleMesh out;
  for (std::size_t v = 0; v < work.vertices.size(); ++v)
    if (remap[v] == 0) {
      remap[v] = static_cast<int>(out.vertices.size());
      out.vertices.push_back(work.vertices[v]);
    }
  out.faces.reserve(work.faces.size());
  for (const Face& t : work.faces) out.faces.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
  out.labels = std::move(work.labels);
  return out;
}

}  // namespace hforge
