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

#include "hrtf_forge/mesh.hpp"

// Closed, outward-oriented fixture meshes.
namespace hforge::shapes {

TriangleMesh icosahedron(double radius = 1.0);

/// Icosahedron midpoint-subdivided `level` times, vertices pushed to the
/// sphere. level 3 has 1280 faces, level 4 has 5120.
TriangleMesh icosphere(int level, double radius = 1.0, const Vec3& center = Vec3::Zero());

/// icosphere scaled per axis.
TriangleMesh ellipsoid(int level, const Vec3& semi_axes);

/// Axis-aligned cube [-half, half]^3 with two triangles per side.
TriangleMesh cube(double half = 0.5);

/// nu x nv quad grid torus (major radius R about z, minor radius r).
TriangleMesh torus(int nu, int nv, double major_radius, double minor_radius);

/// Open square patch in z = 0 with nx x ny quads over [0,size]^2.
TriangleMesh flat_grid(int nx, int ny, double size);

/// Capsule along z: cylinder of `radius` and length 2*half_length with
/// hemispherical caps. `segments` around, `rings` per cap quarter-circle.
TriangleMesh capsule(double radius, double half_length, int segments, int rings, int cylinder_rings);

}  // namespace hforge::shapes
