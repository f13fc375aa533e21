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

#include "hrtf_forge/bvh.hpp"
#include "hrtf_forge/mesh.hpp"

namespace hforge {

struct HausdorffResult {
  double forward = 0.0;    // max over samples of A of distance to surface B
  double backward = 0.0;   // max over samples of B of distance to surface A
  double symmetric = 0.0;  // max(forward, backward)
};

/// Fixed barycentric sample pattern used by hausdorff(): `count` points of
/// an R2 low-discrepancy sequence folded into the triangle.
std::vector<Vec3> barycentric_pattern(int count);

/// Mesh vertices followed by `per_face` pattern points on every face.
std::vector<Vec3> surface_samples(const TriangleMesh& mesh, int per_face);

/// Sampled Hausdorff distance between two surfaces.
HausdorffResult hausdorff(const TriangleMesh& a, const TriangleMesh& b, int samples_per_face = 4);
HausdorffResult hausdorff(const TriangleMesh& a, const TriangleBVH& a_bvh, const TriangleMesh& b,
                          const TriangleBVH& b_bvh, int samples_per_face = 4);

/// Generalized winding number of a closed surface around p (about 1 inside,
/// 0 outside for outward orientation).
double winding_number(const TriangleMesh& mesh, const Vec3& p);
bool is_inside(const TriangleMesh& mesh, const Vec3& p);

}  // namespace hforge
