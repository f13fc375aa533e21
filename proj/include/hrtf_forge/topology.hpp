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

#include <optional>
#include <string>
#include <vector>

#include "hrtf_forge/mesh.hpp"

namespace hforge {

struct ValidationReport {
  bool is_manifold = false;
  bool is_watertight = false;
  std::optional<int> genus;  // present only for watertight manifold meshes
  int duplicate_vertex_count = 0;
  int degenerate_face_count = 0;
  int component_count = 0;
  int boundary_edge_count = 0;
  int nonmanifold_edge_count = 0;
  int vertex_count = 0;
  int edge_count = 0;
  int face_count = 0;
  Aabb bounding_box;

  bool is_closed_genus0() const { return is_manifold && is_watertight && genus && *genus == 0; }
  /// Multi-line `key: value` text.
  std::string to_text() const;
};

/// Report-only diagnostics. Genus sums g = (2 - V + E - F) / 2 over
/// face-connected components.
ValidationReport validate(const TriangleMesh& mesh, double weld_tol = 1e-6, double area_eps = 1e-12);

/// Face-connected components (faces sharing an edge). Returns a component id
/// per face, ids numbered by first face.
std::vector<int> face_components(const TriangleMesh& mesh, int* count = nullptr);

/// Half-edge connectivity. Half-edge 3f + k runs from faces[f][k] to
/// faces[f][(k+1)%3]; `twin` is -1 on boundary half-edges.
struct HalfEdgeMesh {
  std::vector<int> origin;
  std::vector<int> twin;
  std::vector<int> vertex_half_edge;  // one outgoing half-edge per vertex (-1 if isolated)
  int face_count = 0;

  int size() const { return static_cast<int>(origin.size()); }
  static int face(int h) { return h / 3; }
  static int next(int h) { return 3 * (h / 3) + (h % 3 + 1) % 3; }
  static int prev(int h) { return 3 * (h / 3) + (h % 3 + 2) % 3; }
  int dest(int h) const { return origin[next(h)]; }
  /// Vertex of h's face not on h.
  int opposite(int h) const { return origin[prev(h)]; }
  bool is_boundary(int h) const { return twin[h] < 0; }

  /// Outgoing half-edges of v in rotation order (starting at
  /// vertex_half_edge[v]).
  std::vector<int> outgoing(int v) const;
};

/// Throws MeshError naming the edge when an edge has more than two incident
/// faces or two faces traverse it in the same direction.
HalfEdgeMesh build_half_edge(const TriangleMesh& mesh);

}  // namespace hforge
