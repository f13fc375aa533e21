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

#include "hrtf_forge/nn/subdiv_net.hpp"

#include <string>

#include <unsupported/Eigen/AutoDiff>

#include "hrtf_forge/error.hpp"
#include "hrtf_forge/parallel.hpp"

namespace hforge::nn {

namespace {

std::vector<int> with_ends(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

// Frame of the half-flap (a -> b, c opposite in own face, d across the
// twin): x along the edge, z the mean face normal made orthogonal to x.
template <typename S>
Eigen::Matrix<S, 3, 3> flap_frame(const Eigen::Matrix<S, 3, 1>& pa, const Eigen::Matrix<S, 3, 1>& pb,
                                  const Eigen::Matrix<S, 3, 1>& pc, const Eigen::Matrix<S, 3, 1>& pd) {
  using V = Eigen::Matrix<S, 3, 1>;
  V x = pb - pa;
  x /= x.norm();
  V n1 = (pb - pa).cross(pc - pa);
  n1 /= n1.norm();
  V n2 = (pa - pb).cross(pd - pb);
  n2 /= n2.norm();
  V z = n1 + n2;
  z -= x * x.dot(z);
  if (z.norm() < 1e-12) z = n1 - x * x.dot(n1);
  z /= z.norm();
  Eigen::Matrix<S, 3, 3> r;
  r.col(0) = x;
  r.col(1) = z.cross(x);
  r.col(2) = z;
  return r;
}

// d vec(R) / d(p_a, p_b, p_c, p_d); vec is column-major.
Eigen::Matrix<double, 9, 12> frame_jacobian(const TriangleMesh& mesh, const HalfFlap& flap) {
  using Ad = Eigen::AutoDiffScalar<Eigen::Matrix<double, 12, 1>>;
  using AdVec = Eigen::Matrix<Ad, 3, 1>;
  std::array<AdVec, 4> q;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 3; ++i) q[k][i] = Ad(mesh.vertices[flap.stencil[k]][i], 12, 3 * k + i);
  const Eigen::Matrix<Ad, 3, 3> r = flap_frame<Ad>(q[0], q[1], q[2], q[3]);
  Eigen::Matrix<double, 9, 12> jac;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) jac.row(i + 3 * j) = r(i, j).derivatives().transpose();
  return jac;
}

std::vector<int> outgoing_valence(const HalfEdgeMesh& he, std::size_t vertex_count) {
  std::vector<int> val(vertex_count, 0);
  for (int h = 0; h < he.size(); ++h) ++val[he.origin[h]];
  return val;
}

}  // namespace

SubdivNetParams SubdivNetParams::zeros(int feature_dim, const std::vector<int>& hidden, int levels) {
  if (feature_dim <= 0) throw InvalidArgument("SubdivNetParams: feature_dim must be positive");
  if (levels < 0) throw InvalidArgument("SubdivNetParams: levels must be >= 0");
  SubdivNetParams p;
  p.feature_dim = feature_dim;
  p.levels = levels;
  const int in = kGeometryDim + 4 * feature_dim;
  p.init_net = Mlp(with_ends(kGeometryDim, hidden, feature_dim));
  p.vertex_net = Mlp(with_ends(in, hidden, 3 + feature_dim));
  p.edge_net = Mlp(with_ends(in, hidden, 3 + feature_dim));
  return p;
}

SubdivNetParams SubdivNetParams::random(int feature_dim, const std::vector<int>& hidden, int levels,
                                        std::uint64_t seed) {
  SubdivNetParams p = zeros(feature_dim, hidden, levels);
  std::mt19937_64 rng(seed);
  p.init_net.init_glorot(rng);
  p.vertex_net.init_glorot(rng);
  p.edge_net.init_glorot(rng);
  return p;
}

void SubdivNetParams::check() const {
  const int d = feature_dim;
  const int in = kGeometryDim + 4 * d;
  if (init_net.dims().empty() || init_net.input_dim() != kGeometryDim || init_net.output_dim() != d)
    throw InvalidArgument("SubdivNetParams: init_net must map 9 -> feature_dim");
  if (vertex_net.dims().empty() || vertex_net.input_dim() != in || vertex_net.output_dim() != 3 + d)
    throw InvalidArgument("SubdivNetParams: vertex_net must map 9 + 4 feature_dim -> 3 + feature_dim");
  if (edge_net.dims().empty() || edge_net.input_dim() != in || edge_net.output_dim() != 3 + d)
    throw InvalidArgument("SubdivNetParams: edge_net must map 9 + 4 feature_dim -> 3 + feature_dim");
}

std::size_t SubdivNetParams::parameter_count() const {
  return init_net.parameter_count() + vertex_net.parameter_count() + edge_net.parameter_count();
}

std::vector<double> SubdivNetParams::flatten() const {
  std::vector<double> v;
  v.reserve(parameter_count());
  init_net.flatten_into(v);
  vertex_net.flatten_into(v);
  edge_net.flatten_into(v);
  return v;
}

void SubdivNetParams::unflatten(const std::vector<double>& values) {
  if (values.size() != parameter_count()) throw InvalidArgument("SubdivNetParams: parameter count mismatch");
  std::size_t pos = 0;
  init_net.unflatten_from(values, pos);
  vertex_net.unflatten_from(values, pos);
  edge_net.unflatten_from(values, pos);
}

SubdivNetParams SubdivNetParams::zeros_like() const {
  SubdivNetParams p = *this;
  p.init_net = Mlp(init_net.dims());
  p.vertex_net = Mlp(vertex_net.dims());
  p.edge_net = Mlp(edge_net.dims());
  return p;
}

std::vector<HalfFlap> build_half_flaps(const TriangleMesh& mesh, const HalfEdgeMesh& he) {
  for (int h = 0; h < he.size(); ++h)
    if (he.is_boundary(h)) throw MeshError("half-flap: boundary half-edge " + std::to_string(h));
  std::vector<HalfFlap> flaps(he.size());
  parallel_for(0, he.size(), [&](std::ptrdiff_t hi) {
    const int h = static_cast<int>(hi);
    HalfFlap& flap = flaps[h];
    flap.stencil = {he.origin[h], he.dest(h), he.opposite(h), he.opposite(he.twin[h])};
    flap.frame = flap_frame<double>(mesh.vertices[flap.stencil[0]], mesh.vertices[flap.stencil[1]],
                                    mesh.vertices[flap.stencil[2]], mesh.vertices[flap.stencil[3]]);
  });
  return flaps;
}

Matrix half_flap_geometry(const TriangleMesh& mesh, const std::vector<HalfFlap>& flaps, double scale) {
  Matrix g(static_cast<Eigen::Index>(flaps.size()), kGeometryDim);
  const double inv = 1.0 / scale;
  parallel_for(0, static_cast<std::ptrdiff_t>(flaps.size()), [&](std::ptrdiff_t h) {
    const HalfFlap& f = flaps[h];
    const Vec3& pa = mesh.vertices[f.stencil[0]];
    for (int k = 0; k < 3; ++k) {
      const Vec3 local = f.frame.transpose() * (mesh.vertices[f.stencil[k + 1]] - pa) * inv;
      g.row(h).segment<3>(3 * k) = local.transpose();
    }
  });
  return g;
}

Matrix half_flap_features(const TriangleMesh& mesh, const std::vector<HalfFlap>& flaps, double scale,
                          const Matrix& features) {
  const Eigen::Index d = features.cols();
  Matrix x(static_cast<Eigen::Index>(flaps.size()), kGeometryDim + 4 * d);
  x.leftCols(kGeometryDim) = half_flap_geometry(mesh, flaps, scale);
  for (std::size_t h = 0; h < flaps.size(); ++h)
    for (int k = 0; k < 4; ++k) x.row(h).segment(kGeometryDim + k * d, d) = features.row(flaps[h].stencil[k]);
  return x;
}

ForwardResult forward(const SubdivNetParams& params, const TriangleMesh& coarse, int levels) {
  params.check();
  ForwardResult out;
  out.mesh = coarse;
  if (levels == 0) return out;
  if (levels < 0) throw InvalidArgument("forward: levels must be >= 0");
  const ValidationReport report = validate(coarse);
  if (!report.is_manifold || !report.is_watertight)
    throw MeshError("forward: coarse mesh must be a watertight manifold");

  const int d = params.feature_dim;
  TriangleMesh mesh = coarse;
  double scale = mean_edge_length(coarse);
  HalfEdgeMesh he = build_half_edge(mesh);
  std::vector<HalfFlap> flaps = build_half_flaps(mesh, he);

  // Initial features: mean of init_net over outgoing half-flaps.
  out.coarse_valence = outgoing_valence(he, mesh.vertices.size());
  const Matrix init_out = params.init_net.forward(half_flap_geometry(mesh, flaps, scale), &out.init_cache);
  Matrix features = Matrix::Zero(static_cast<Eigen::Index>(mesh.vertices.size()), d);
  for (int h = 0; h < he.size(); ++h) features.row(he.origin[h]) += init_out.row(h);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) features.row(v) /= out.coarse_valence[v];

  for (int level = 0; level < levels; ++level) {
    LevelState st;
    st.mesh = mesh;
    st.features = features;
    st.flaps = flaps;
    st.stencil = subdivision_stencil(mesh);
    st.valence = outgoing_valence(he, mesh.vertices.size());
    st.scale = scale;
    st.input = half_flap_features(mesh, flaps, scale, features);
    st.vertex_out = params.vertex_net.forward(st.input, &st.vertex_cache);
    st.edge_out = params.edge_net.forward(st.input, &st.edge_cache);

    const std::size_t nv = mesh.vertices.size();
    const std::size_t ne = st.stencil.edges.edges.size();
    std::vector<Vec3> disp_v(nv, Vec3::Zero()), disp_e(ne, Vec3::Zero());
    Matrix feat_next = Matrix::Zero(static_cast<Eigen::Index>(nv + ne), d);
    for (int h = 0; h < he.size(); ++h) {
      const HalfFlap& f = st.flaps[h];
      const int a = f.stencil[0];
      const int e = st.stencil.edges.face_edges[h / 3][h % 3];
      disp_v[a] += scale * (f.frame * st.vertex_out.row(h).head<3>().transpose());
      disp_e[e] += scale * (f.frame * st.edge_out.row(h).head<3>().transpose());
      feat_next.row(a) += st.vertex_out.row(h).tail(d);
      feat_next.row(nv + e) += st.edge_out.row(h).tail(d);
    }

    TriangleMesh next;
    next.vertices.resize(nv + ne);
    for (std::size_t v = 0; v < nv; ++v) {
      next.vertices[v] = mesh.vertices[v] + disp_v[v] / st.valence[v];
      feat_next.row(v) /= st.valence[v];
    }
    for (std::size_t e = 0; e < ne; ++e) {
      const auto [a, b] = st.stencil.edges.edges[e];
      next.vertices[nv + e] = 0.5 * (mesh.vertices[a] + mesh.vertices[b]) + disp_e[e] / 2.0;
      feat_next.row(nv + e) /= 2.0;
    }
    next.faces = st.stencil.faces;
    out.levels.push_back(std::move(st));

    mesh = std::move(next);
    features = std::move(feat_next);
    scale *= 0.5;
    if (level + 1 < levels) {
      he = build_half_edge(mesh);
      flaps = build_half_flaps(mesh, he);
    }
  }
  if (coarse.has_labels()) {
    mesh.labels = coarse.labels;
    for (int level = 0; level < levels; ++level) {
      std::vector<Region> next;
      next.reserve(mesh.labels.size() * 4);
      for (Region r : mesh.labels) next.insert(next.end(), 4, r);
      mesh.labels = std::move(next);
    }
  }
  out.mesh = std::move(mesh);
  return out;
}

SubdivNetParams backward(const SubdivNetParams& params, const ForwardResult& fwd,
                         const std::vector<Vec3>& d_positions) {
  SubdivNetParams grad = params.zeros_like();
  if (fwd.levels.empty()) return grad;
  const int d = params.feature_dim;
  if (d_positions.size() != fwd.mesh.vertices.size())
    throw InvalidArgument("backward: gradient size does not match the forward mesh");

  std::vector<Vec3> dp = d_positions;
  Matrix df = Matrix::Zero(static_cast<Eigen::Index>(dp.size()), d);

  for (int level = static_cast<int>(fwd.levels.size()) - 1; level >= 0; --level) {
    const LevelState& st = fwd.levels[level];
    const std::size_t nv = st.mesh.vertices.size();
    const Eigen::Index nh = static_cast<Eigen::Index>(st.flaps.size());
    Matrix dv(nh, 3 + d), de(nh, 3 + d);
    for (Eigen::Index h = 0; h < nh; ++h) {
      const HalfFlap& f = st.flaps[h];
      const int a = f.stencil[0];
      const int e = st.stencil.edges.face_edges[h / 3][h % 3];
      const double wv = 1.0 / st.valence[a];
      dv.row(h).head<3>() = (st.scale * wv * (f.frame.transpose() * dp[a])).transpose();
      dv.row(h).tail(d) = wv * df.row(a);
      de.row(h).head<3>() = (st.scale * 0.5 * (f.frame.transpose() * dp[nv + e])).transpose();
      de.row(h).tail(d) = 0.5 * df.row(nv + e);
    }
    const Matrix dx = params.vertex_net.backward(st.vertex_cache, dv, grad.vertex_net) +
                      params.edge_net.backward(st.edge_cache, de, grad.edge_net);

    std::vector<Vec3> dp_prev(dp.begin(), dp.begin() + static_cast<std::ptrdiff_t>(nv));
    for (std::size_t e = 0; e < st.stencil.edges.edges.size(); ++e) {
      const auto [a, b] = st.stencil.edges.edges[e];
      dp_prev[a] += 0.5 * dp[nv + e];
      dp_prev[b] += 0.5 * dp[nv + e];
    }
    Matrix df_prev = Matrix::Zero(static_cast<Eigen::Index>(nv), d);
    const double inv = 1.0 / st.scale;
    // Level 0 positions are inputs, so only deeper levels need the position
    // chain (including the frame's dependence on the stencil).
    const bool chain_positions = level > 0;
    for (Eigen::Index h = 0; h < nh; ++h) {
      const HalfFlap& f = st.flaps[h];
      for (int k = 0; k < 4; ++k) df_prev.row(f.stencil[k]) += dx.row(h).segment(kGeometryDim + k * d, d);
      if (!chain_positions) continue;
      const Vec3& pa = st.mesh.vertices[f.stencil[0]];
      Vec3 sum = Vec3::Zero();
      Mat3 d_frame = Mat3::Zero();
      for (int k = 0; k < 3; ++k) {
        const Vec3 dg = dx.row(h).segment<3>(3 * k).transpose();
        const Vec3 g = f.frame * dg * inv;
        dp_prev[f.stencil[k + 1]] += g;
        sum += g;
        d_frame += (st.mesh.vertices[f.stencil[k + 1]] - pa) * inv * dg.transpose();
      }
      dp_prev[f.stencil[0]] -= sum;
      const int a = f.stencil[0];
      const int e = st.stencil.edges.face_edges[h / 3][h % 3];
      d_frame += (st.scale / st.valence[a]) * dp[a] * st.vertex_out.row(h).head<3>();
      d_frame += (st.scale * 0.5) * dp[nv + e] * st.edge_out.row(h).head<3>();
      const Eigen::Matrix<double, 12, 1> dstencil =
          frame_jacobian(st.mesh, f).transpose() * Eigen::Map<const Eigen::Matrix<double, 9, 1>>(d_frame.data());
      for (int k = 0; k < 4; ++k) dp_prev[f.stencil[k]] += dstencil.segment<3>(3 * k);
    }
    dp = std::move(dp_prev);
    df = std::move(df_prev);
  }

  // Initial features: mean over outgoing half-flaps of init_net.
  const LevelState& first = fwd.levels.front();
  Matrix di(static_cast<Eigen::Index>(first.flaps.size()), d);
  for (std::size_t h = 0; h < first.flaps.size(); ++h) {
    const int a = first.flaps[h].stencil[0];
    di.row(h) = df.row(a) / fwd.coarse_valence[a];
  }
  params.init_net.backward(fwd.init_cache, di, grad.init_net);

  if (!grad.init_net.all_finite()) throw NumericalError("backward: non-finite gradient in init_net");
  if (!grad.vertex_net.all_finite()) throw NumericalError("backward: non-finite gradient in vertex_net");
  if (!grad.edge_net.all_finite()) throw NumericalError("backward: non-finite gradient in edge_net");
  return grad;
}

TriangleMesh upsample(const SubdivNetParams& params, const TriangleMesh& mesh, int levels) {
  return forward(params, mesh, levels).mesh;
}

}  // namespace hforge::nn
