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

#include <array>
#include <cstdint>
#include <vector>

#include "hrtf_forge/mesh.hpp"
#include "hrtf_forge/nn/mlp.hpp"
#include "hrtf_forge/subdivide.hpp"
#include "hrtf_forge/topology.hpp"

namespace hforge::nn {

/// Geometric inputs per half-flap: local coordinates of the edge end and the
/// two opposite vertices, relative to the edge origin.
inline constexpr int kGeometryDim = 9;

/// The three subdivision networks.
///   init_net:   9 -> hidden -> d          (initial per-vertex features)
///   vertex_net: 9 + 4d -> hidden -> 3 + d (even-vertex displacement, feature)
///   edge_net:   9 + 4d -> hidden -> 3 + d (odd-vertex displacement, feature)
struct SubdivNetParams {
  int feature_dim = 32;
  int levels = 2;
  Mlp init_net;
  Mlp vertex_net;
  Mlp edge_net;

  /// Zero-initialized networks with the given hidden widths.
  static SubdivNetParams zeros(int feature_dim, const std::vector<int>& hidden, int levels);
  /// Glorot-initialized networks from a seeded generator.
  static SubdivNetParams random(int feature_dim, const std::vector<int>& hidden, int levels, std::uint64_t seed);

  /// Throws InvalidArgument when network widths do not match feature_dim.
  void check() const;
  std::size_t parameter_count() const;
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& values);
  /// All three networks set to zero (same shapes).
  SubdivNetParams zeros_like() const;
};

/// Stencil and local frame of one half-edge a -> b with opposite vertices c
/// (own face) and d (twin face). Columns of `frame` are the x (edge), y and
/// z (mean face normal) axes.
struct HalfFlap {
  std::array<int, 4> stencil;  // a, b, c, d
  Mat3 frame;
};

/// Half-flaps of every half-edge (index = half-edge id). Throws MeshError
/// on boundary half-edges.
std::vector<HalfFlap> build_half_flaps(const TriangleMesh& mesh, const HalfEdgeMesh& he);

/// Geometric inputs (rows, kGeometryDim wide) of every half-flap with
/// lengths divided by `scale`.
Matrix half_flap_geometry(const TriangleMesh& mesh, const std::vector<HalfFlap>& flaps, double scale);

/// Full network input per half-flap: geometry followed by the features of
/// a, b, c, d (rows of `features`).
Matrix half_flap_features(const TriangleMesh& mesh, const std::vector<HalfFlap>& flaps, double scale,
                          const Matrix& features);

/// Everything the backward pass needs from one level.
struct LevelState {
  TriangleMesh mesh;  // input mesh of this level
  Matrix features;    // per-vertex features, rows
  std::vector<HalfFlap> flaps;
  SubdivisionStencil stencil;
  std::vector<int> valence;
  double scale = 1.0;
  Matrix input;
  Mlp::Cache vertex_cache, edge_cache;
  Matrix vertex_out, edge_out;
};

struct ForwardResult {
  TriangleMesh mesh;                // final level
  std::vector<LevelState> levels;   // one per subdivision step
  Mlp::Cache init_cache;
  std::vector<int> coarse_valence;
};

/// Runs `levels` rounds of learned subdivision. The coarse mesh must be a
/// watertight manifold. levels = 0 returns the input.
ForwardResult forward(const SubdivNetParams& params, const TriangleMesh& coarse, int levels);

/// Parameter gradients given dL/d(final vertex positions). Exact through
/// every level, including the dependence of deeper-level frames on the
/// predicted positions; the per-level scales are constants. Throws
/// NumericalError naming the parameter block on non-finite values.
SubdivNetParams backward(const SubdivNetParams& params, const ForwardResult& fwd,
                         const std::vector<Vec3>& d_positions);

/// Forward pass only.
TriangleMesh upsample(const SubdivNetParams& params, const TriangleMesh& mesh, int levels);

}  // namespace hforge::nn
