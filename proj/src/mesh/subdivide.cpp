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

#include "hrtf_forge/subdivide.hpp"

#include "hrtf_forge/error.hpp"
#include "hrtf_forge/topology.hpp"

namespace hforge {

SubdivisionStencil subdivision_stencil(const TriangleMesh& mesh) {
  SubdivisionStencil s;
  s.old_vertex_count = static_cast<int>(mesh.vertices.size());
  s.edges = build_edge_table(mesh);
  s.faces.reserve(mesh.faces.size() * 4);
  const int base = s.old_vertex_count;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto [a, b, c] = mesh.faces[f];
    const int ab = base + s.edges.face_edges[f][0];
    const int bc = base + s.edges.face_edges[f][1];
    const int ca = base + s.edges.face_edges[f][2];
    s.faces.push_back({a, ab, ca});
    s.faces.push_back({ab, b, bc});
    s.faces.push_back({ca, bc, c});
    s.faces.push_back({ab, bc, ca});
  }
  return s;
}

TriangleMesh midpoint_subdivide_unchecked(const TriangleMesh& mesh) {
  SubdivisionStencil s = subdivision_stencil(mesh);
  TriangleMesh out;
  out.vertices = mesh.vertices;
  out.vertices.reserve(mesh.vertices.size() + s.edges.edges.size());
  for (const auto& [a, b] : s.edges.edges) out.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
  out.faces = std::move(s.faces);
  if (mesh.has_labels()) {
    out.labels.reserve(out.faces.size());
    for (Region r : mesh.labels) out.labels.insert(out.labels.end(), 4, r);
  }
  return out;
}

TriangleMesh midpoint_subdivide(const TriangleMesh& mesh) {
  check_indices(mesh);
  const ValidationReport report = validate(mesh);
  if (!report.is_manifold || !report.is_watertight)
    throw MeshError("midpoint_subdivide: input must be a watertight manifold mesh");
  return midpoint_subdivide_unchecked(mesh);
}

}  // namespace hforge
