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

#include "hrtf_forge/mesh.hpp"

namespace hforge {

// ---------------------------------------------------------------- alignment

struct IcpResult {
  RigidTransform transform;  // maps source into the target frame
  double rms = 0.0;          // RMS closest-point distance after `transform`
  int iterations = 0;
  bool converged = false;
  /// RMS failed to improve for three consecutive iterations; `transform`
  /// is the best one seen.
  bool stalled = false;
};

/// Point-to-point ICP of every source vertex against the target surface.
/// Stops when the RMS improvement drops below convergence_eps or after
/// max_iters iterations.
IcpResult icp_align(const TriangleMesh& source, const TriangleMesh& target, int max_iters = 100,
                    double convergence_eps = 1e-12);

/// Least-squares rotation and translation mapping `from[i]` onto `to[i]`
/// (Kabsch with reflection guard).
RigidTransform kabsch(const std::vector<Vec3>& from, const std::vector<Vec3>& to);

// ---------------------------------------------------------------- behead

struct CutPlane {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();  // unit length; the +normal side is kept
};

/// Clips the mesh to the +normal half-space and caps every planar hole.
/// Returns the input unchanged (with a notice on the log) when the plane
/// does not cross the mesh. Cap faces are labeled Skin when labels exist.
TriangleMesh behead(const TriangleMesh& mesh, const CutPlane& plane);

// ---------------------------------------------------------------- cleanup

inline constexpr double kDefaultWeldTolerance = 1e-6;
inline constexpr double kDefaultAreaEpsilon = 1e-12;

/// Welds vertices closer than weld_tol, drops degenerate and duplicate
/// faces, keeps the component with the largest surface area, makes the
/// orientation consistent and outward, and drops unreferenced vertices.
/// Throws MeshError when nothing survives.
TriangleMesh cleanup(const TriangleMesh& mesh, double weld_tol = kDefaultWeldTolerance,
                     double area_eps = kDefaultAreaEpsilon);

// ---------------------------------------------------------------- curvature

/// Absolute discrete mean curvature per vertex (1/m) from the cotangent
/// Laplacian and mixed Voronoi areas. Boundary vertices copy the value of
/// the nearest interior vertex (fewest edge hops, lowest index on ties).
std::vector<double> estimate_curvature(const TriangleMesh& mesh);

/// Mixed Voronoi area per vertex.
std::vector<double> mixed_areas(const TriangleMesh& mesh);

// ---------------------------------------------------------------- grading

struct GradingParams {
  double alpha = 0.5;        // target edge length as a fraction of the curvature radius
  double h_min = 1e-3;       // m
  double h_max = 1e-2;       // m
  double kappa_floor = 1.0;  // 1/m
  int iterations = 10;
  double smoothing_lambda = 0.5;

  /// Throws InvalidArgument on violated bounds.
  void check() const;
  double target_length(double abs_curvature) const;
};

/// Target edge length per vertex of `mesh` from its own curvature.
std::vector<double> sizing_field(const TriangleMesh& mesh, const GradingParams& params);

/// Incremental isotropic remeshing against the curvature sizing field of the
/// input. Requires a watertight manifold; labels are not carried over.
TriangleMesh grade(const TriangleMesh& mesh, const GradingParams& params);

/// Fraction of edges of `graded` whose length lies in [4/5, 4/3] of the mean
/// endpoint target, with targets interpolated from `reference`.
double grading_conformance(const TriangleMesh& graded, const TriangleMesh& reference,
                           const GradingParams& params);

// ---------------------------------------------------------------- labels

struct EarMarkers {
  Vec3 left = Vec3::Zero();
  Vec3 right = Vec3::Zero();
  double radius = 0.0;  // m
};

/// Faces whose centroid lies within `radius` of a marker get that ear's
/// label (nearer marker wins); all others are Skin. Throws MeshError when a
/// marker captures no face.
TriangleMesh label_regions(const TriangleMesh& mesh, const EarMarkers& markers);

}  // namespace hforge
