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

#include <vector>

#include "hrtf_forge/mesh.hpp"

namespace hforge {

/// Connectivity of one 1-to-4 split: vertex V + e is the new vertex on edge
/// e of `edges`; each face (a, b, c) becomes
/// (a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca).
struct SubdivisionStencil {
  int old_vertex_count = 0;
  EdgeTable edges;
  std::vector<Face> faces;
};

SubdivisionStencil subdivision_stencil(const TriangleMesh& mesh);

/// Applies the stencil with new vertices at edge midpoints. Labels are
/// inherited by the four children. Throws MeshError unless the input is a
/// watertight manifold.
TriangleMesh midpoint_subdivide(const TriangleMesh& mesh);

/// Same connectivity, no topology checks (open meshes allowed).
TriangleMesh midpoint_subdivide_unchecked(const TriangleMesh& mesh);

}  // namespace hforge
