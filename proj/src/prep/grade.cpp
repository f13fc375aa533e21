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
#include <cmath>
#include <memory>
#include <numeric>

#include "hrtf_forge/bvh.hpp"
#include "hrtf_forge/error.hpp"
#include "hrtf_forge/log.hpp"
#include "hrtf_forge/parallel.hpp"
#include "hrtf_forge/prep.hpp"
#include "hrtf_forge/topology.hpp"

namespace hforge {

void GradingParams::check() const {
  if (!(h_min > 0.0) || !(h_max > h_min)) throw InvalidArgument("grading: need 0 < h_min < h_max");
  if (!(alpha > 0.0)) throw InvalidArgument("grading: alpha must be positive");
  if (!(kappa_floor > 0.0)) throw InvalidArgument("grading: kappa_floor must be positive");
  if (iterations < 1) throw InvalidArgument("grading: iterations must be >= 1");
  if (!(smoothing_lambda >= 0.0 && smoothing_lambda <= 1.0))
    throw InvalidArgument("grading: smoothing_lambda must be in [0, 1]");
}

double GradingParams::target_length(double abs_curvature) const {
  return std::clamp(alpha / std::max(abs_curvature, kappa_floor), h_min, h_max);
}

std::vector<double> sizing_field(const TriangleMesh& mesh, const GradingParams& params) {
  const std::vector<double> kappa = estimate_curvature(mesh);
  std::vector<double> h(kappa.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = params.target_length(kappa[i]);
  return h;
}

namespace {

constexpr double kLongRatio = 4.0 / 3.0;
constexpr double kShortRatio = 4.0 / 5.0;

// Reference surface plus its per-vertex sizing, interpolated through the
// closest point.
class SizingOracle {
 public:
  SizingOracle(const TriangleMesh& reference, const GradingParams& params)
      : mesh_(std::make_shared<TriangleMesh>(reference)), bvh_(mesh_), h_(sizing_field(reference, params)) {}

  // Closest reference point and interpolated target length.
  std::pair<Vec3, double> query(const Vec3& p) const {
    const ClosestHit hit = bvh_.closest(p);
    const Face& t = mesh_->faces[hit.face];
    const double h = hit.barycentric[0] * h_[t[0]] + hit.barycentric[1] * h_[t[1]] + hit.barycentric[2] * h_[t[2]];
    return {hit.point, h};
  }

 private:
  std::shared_ptr<TriangleMesh> mesh_;
  TriangleBVH bvh_;
  std::vector<double> h_;
};

// Triangle soup with vertex-to-face incidence for local edits.
class Remesher {
 public:
  Remesher(const TriangleMesh& mesh, const SizingOracle& sizing) : sizing_(sizing), p_(mesh.vertices), f_(mesh.faces) {
    h_.resize(p_.size());
    for (std::size_t i = 0; i < p_.size(); ++i) h_[i] = sizing_.query(p_[i]).second;
  }

  TriangleMesh mesh() const {
    TriangleMesh m;
    m.vertices = p_;
    m.faces = f_;
    return m;
  }

  void iterate(double lambda) {
    split_long_edges();
    collapse_short_edges();
    flip_for_valence();
    smooth_and_project(lambda);
  }

 private:
  double target(int a, int b) const { return 0.5 * (h_[a] + h_[b]); }

  // Red-green refinement of every edge longer than 4/3 of its target;
  // repeated until none remains (bounded).
  void split_long_edges() {
    for (int pass = 0; pass < 8; ++pass) {
      TriangleMesh m = mesh();
      const EdgeTable et = build_edge_table(m);
      std::vector<int> mid(et.edges.size(), -1);
      int marked = 0;
      for (std::size_t e = 0; e < et.edges.size(); ++e) {
        const auto [a, b] = et.edges[e];
        if ((p_[a] - p_[b]).norm() > kLongRatio * target(a, b)) {
          mid[e] = static_cast<int>(p_.size());
          const auto [pos, h] = sizing_.query(0.5 * (p_[a] + p_[b]));
          p_.push_back(pos);
          h_.push_back(h);
          ++marked;
        }
      }
      if (marked == 0) return;
      std::vector<Face> faces;
      faces.reserve(f_.size() * 2);
      for (std::size_t f = 0; f < f_.size(); ++f) {
        const Face& t = f_[f];
        const int m0 = mid[et.face_edges[f][0]], m1 = mid[et.face_edges[f][1]], m2 = mid[et.face_edges[f][2]];
        const int count = (m0 >= 0) + (m1 >= 0) + (m2 >= 0);
        if (count == 0) {
          faces.push_back(t);
        } else if (count == 3) {
          faces.push_back({t[0], m0, m2});
          faces.push_back({m0, t[1], m1});
          faces.push_back({m2, m1, t[2]});
          faces.push_back({m0, m1, m2});
        } else {
          // Rotate so the first marked edge (in cyclic order) is edge 0.
          const int ms[3] = {m0, m1, m2};
          int r = 0;
          if (count == 1) {
            while (ms[r] < 0) ++r;
          } else {
            while (!(ms[r] >= 0 && ms[(r + 1) % 3] >= 0)) ++r;
          }
          const int a = t[r], b = t[(r + 1) % 3], c = t[(r + 2) % 3];
          const int mab = ms[r], mbc = ms[(r + 1) % 3];
          if (count == 1) {
            faces.push_back({a, mab, c});
            faces.push_back({mab, b, c});
          } else {
            faces.push_back({mab, b, mbc});
            // Quad a, mab, mbc, c split along the shorter diagonal.
            if ((p_[a] - p_[mbc]).squaredNorm() <= (p_[mab] - p_[c]).squaredNorm()) {
              faces.push_back({a, mab, mbc});
              faces.push_back({a, mbc, c});
            } else {
              faces.push_back({a, mab, c});
              faces.push_back({mab, mbc, c});
            }
          }
        }
      }
      f_ = std::move(faces);
    }
  }

  void build_incidence() {
    vf_.assign(p_.size(), {});
    alive_.assign(f_.size(), 1);
    for (std::size_t f = 0; f < f_.size(); ++f)
      for (int v : f_[f]) vf_[v].push_back(static_cast<int>(f));
  }

  std::vector<int> faces_with_edge(int a, int b) const {
    std::vector<int> out;
    for (int f : vf_[a])
      if (alive_[f] && (f_[f][0] == b || f_[f][1] == b || f_[f][2] == b)) out.push_back(f);
    return out;
  }

  std::vector<int> neighbors(int v) const {
    std::vector<int> n;
    for (int f : vf_[v]) {
      if (!alive_[f]) continue;
      for (int w : f_[f])
        if (w != v) n.push_back(w);
    }
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
    return n;
  }

  int valence(int v) const {
    int n = 0;
    for (int f : vf_[v]) n += alive_[f];
    return n;
  }

  static int third(const Face& t, int a, int b) {
    for (int v : t)
      if (v != a && v != b) return v;
    return -1;
  }

  Vec3 normal_of(const Face& t) const { return (p_[t[1]] - p_[t[0]]).cross(p_[t[2]] - p_[t[0]]); }

  void compact() {
    std::vector<Face> faces;
    for (std::size_t f = 0; f < f_.size(); ++f)
      if (alive_[f]) faces.push_back(f_[f]);
    std::vector<int> remap(p_.size(), -1);
    for (const Face& t : faces)
      for (int v : t) remap[v] = 0;
    std::vector<Vec3> p;
    std::vector<double> h;
    for (std::size_t v = 0; v < p_.size(); ++v)
      if (remap[v] == 0) {
        remap[v] = static_cast<int>(p.size());
        p.push_back(p_[v]);
        h.push_back(h_[v]);
      }
    for (Face& t : faces)
      for (int& v : t) v = remap[v];
    p_ = std::move(p);
    h_ = std::move(h);
    f_ = std::move(faces);
  }

  void collapse_short_edges() {
    build_incidence();
    const EdgeTable et = build_edge_table(mesh());
    std::vector<std::pair<double, int>> order;
    for (std::size_t e = 0; e < et.edges.size(); ++e) {
      const auto [a, b] = et.edges[e];
      const double len = (p_[a] - p_[b]).norm();
      if (len < kShortRatio * target(a, b)) order.emplace_back(len / target(a, b), static_cast<int>(e));
    }
    std::sort(order.begin(), order.end());
    std::vector<int> merged_into(p_.size(), -1);
    int live_vertices = static_cast<int>(p_.size());

    for (const auto& [ratio, e] : order) {
      const int a = et.edges[e].first, b = et.edges[e].second;
      if (merged_into[a] >= 0 || merged_into[b] >= 0) continue;
      if (live_vertices <= 4) break;
      if ((p_[a] - p_[b]).norm() >= kShortRatio * target(a, b)) continue;
      const std::vector<int> shared = faces_with_edge(a, b);
      if (shared.size() != 2) continue;
      const int c = third(f_[shared[0]], a, b), d = third(f_[shared[1]], a, b);
      if (c == d) continue;
      // Link condition: the only common neighbors are the two opposite vertices.
      const std::vector<int> na = neighbors(a), nb = neighbors(b);
      std::vector<int> common;
      std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(common));
      if (common.size() != 2) continue;
      if (valence(c) <= 3 || valence(d) <= 3) continue;
      if (valence(a) + valence(b) - 4 < 3) continue;

      const Vec3 m = 0.5 * (p_[a] + p_[b]);
      const double hm = 0.5 * (h_[a] + h_[b]);
      bool ok = true;
      for (int v : {a, b}) {
        for (int f : vf_[v]) {
          if (!alive_[f] || f == shared[0] || f == shared[1]) continue;
          Face t = f_[f];
          const Vec3 before = normal_of(t);
          for (int& w : t)
            if (w == a || w == b) w = -1;
          Vec3 q[3];
          for (int k = 0; k < 3; ++k) q[k] = t[k] < 0 ? m : p_[t[k]];
          const Vec3 after = (q[1] - q[0]).cross(q[2] - q[0]);
          if (after.dot(before) <= 0.0 || after.norm() <= 1e-3 * before.norm()) {
            ok = false;
            break;
          }
          for (int w : t)
            if (w >= 0 && (m - p_[w]).norm() > kLongRatio * 0.5 * (hm + h_[w])) {
              ok = false;
              break;
            }
          if (!ok) break;
        }
        if (!ok) break;
      }
      if (!ok) continue;

      // Apply: b merges into a at the midpoint.
      p_[a] = m;
      h_[a] = hm;
      alive_[shared[0]] = alive_[shared[1]] = 0;
      for (int f : vf_[b]) {
        if (!alive_[f]) continue;
        for (int& w : f_[f])
          if (w == b) w = a;
        vf_[a].push_back(f);
      }
      vf_[b].clear();
      std::vector<int>& list = vf_[a];
      list.erase(std::remove_if(list.begin(), list.end(), [&](int f) { return !alive_[f]; }), list.end());
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
      for (int v : {c, d}) {
        std::vector<int>& lv = vf_[v];
        lv.erase(std::remove_if(lv.begin(), lv.end(), [&](int f) { return !alive_[f]; }), lv.end());
      }
      merged_into[b] = a;
      --live_vertices;
    }
    compact();
  }

  void flip_for_valence() {
    build_incidence();
    const EdgeTable et = build_edge_table(mesh());
    auto dev = [](int val) { return (val - 6) * (val - 6); };
    for (const auto& [a, b] : et.edges) {
      const std::vector<int> shared = faces_with_edge(a, b);
      if (shared.size() != 2) continue;
      // Orient so shared[0] traverses a -> b.
      int f1 = shared[0], f2 = shared[1];
      int va = a, vb = b;
      const Face& t1 = f_[f1];
      bool forward = false;
      for (int k = 0; k < 3; ++k)
        if (t1[k] == va && t1[(k + 1) % 3] == vb) forward = true;
      if (!forward) std::swap(va, vb);
      const int c = third(f_[f1], va, vb), d = third(f_[f2], va, vb);
      if (c == d || !faces_with_edge(c, d).empty()) continue;
      const int wa = valence(va), wb = valence(vb), wc = valence(c), wd = valence(d);
      if (wa <= 3 || wb <= 3) continue;
      const int before = dev(wa) + dev(wb) + dev(wc) + dev(wd);
      const int after = dev(wa - 1) + dev(wb - 1) + dev(wc + 1) + dev(wd + 1);
      if (after >= before) continue;
      const Face n1{va, d, c}, n2{vb, c, d};
      const Vec3 old_n = normal_of(f_[f1]).normalized() + normal_of(f_[f2]).normalized();
      const Vec3 m1 = normal_of(n1), m2 = normal_of(n2);
      // Fold check: both new faces agree with the old pair and with each other.
      if (m1.dot(old_n) <= 0.0 || m2.dot(old_n) <= 0.0) continue;
      if (m1.normalized().dot(m2.normalized()) < 0.5) continue;
      f_[f1] = n1;
      f_[f2] = n2;
      for (int v : {va, vb}) {
        std::vector<int>& lv = vf_[v];
        lv.erase(std::remove(lv.begin(), lv.end(), v == va ? f2 : f1), lv.end());
      }
      vf_[c].push_back(f2);
      vf_[d].push_back(f1);
    }
  }

  void smooth_and_project(double lambda) {
    const TriangleMesh m = mesh();
    const std::vector<Vec3> normals = vertex_normals(m);
    std::vector<Vec3> sum(p_.size(), Vec3::Zero());
    std::vector<int> count(p_.size(), 0);
    const EdgeTable et = build_edge_table(m);
    for (const auto& [a, b] : et.edges) {
      sum[a] += p_[b];
      sum[b] += p_[a];
      ++count[a];
      ++count[b];
    }
    std::vector<Vec3> next(p_.size());
    std::vector<double> h(p_.size());
    parallel_for(0, static_cast<std::ptrdiff_t>(p_.size()), [&](std::ptrdiff_t v) {
      Vec3 q = p_[v];
      if (count[v] > 0) {
        const Vec3 delta = sum[v] / count[v] - p_[v];
        q += lambda * (delta - normals[v] * normals[v].dot(delta));
      }
      const auto [proj, hv] = sizing_.query(q);
      next[v] = proj;
      h[v] = hv;
    });
    p_ = std::move(next);
    h_ = std::move(h);
  }

  const SizingOracle& sizing_;
  std::vector<Vec3> p_;
  std::vector<double> h_;
  std::vector<Face> f_;
  std::vector<std::vector<int>> vf_;
  std::vector<char> alive_;
};

}  // namespace

TriangleMesh grade(const TriangleMesh& mesh, const GradingParams& params) {
  params.check();
  check_indices(mesh);
  const ValidationReport report = validate(mesh);
  if (!report.is_manifold || !report.is_watertight) throw MeshError("grade: input must be a watertight manifold");
  const SizingOracle sizing(mesh, params);
  Remesher remesher(mesh, sizing);
  for (int it = 0; it < params.iterations; ++it) remesher.iterate(params.smoothing_lambda);
  TriangleMesh out = remesher.mesh();
  log::info("grade", "remeshed",
            "faces_in=" + std::to_string(mesh.faces.size()) + " faces_out=" + std::to_string(out.faces.size()));
  return out;
}

double grading_conformance(const TriangleMesh& graded, const TriangleMesh& reference, const GradingParams& params) {
  const SizingOracle sizing(reference, params);
  std::vector<double> h(graded.vertices.size());
  for (std::size_t v = 0; v < h.size(); ++v) h[v] = sizing.query(graded.vertices[v]).second;
  const EdgeTable et = build_edge_table(graded);
  if (et.edges.empty()) return 0.0;
  std::size_t good = 0;
  for (const auto& [a, b] : et.edges) {
    const double len = (graded.vertices[a] - graded.vertices[b]).norm();
    const double t = 0.5 * (h[a] + h[b]);
    good += (len >= kShortRatio * t && len <= kLongRatio * t);
  }
  return static_cast<double>(good) / static_cast<double>(et.edges.size());
}

}  // namespace hforge
