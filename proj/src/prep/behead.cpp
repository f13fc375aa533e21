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

#include <cmath>
#include <map>

#include "hrtf_forge/error.hpp"
#include "hrtf_forge/log.hpp"
#include "hrtf_forge/prep.hpp"

namespace hforge {

namespace {

using Vec2 = Eigen::Vector2d;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      inside = !inside;
  }
  return inside;
}

// Ear clipping of a counter-clockwise simple polygon. Returns index triples
// into `poly`, counter-clockwise.
std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& poly) {
  std::vector<int> idx(poly.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<std::array<int, 3>> tris;
  std::size_t guard = 0;
  while (idx.size() > 3) {
    bool clipped = false;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const int ia = idx[(i + idx.size() - 1) % idx.size()], ib = idx[i], ic = idx[(i + 1) % idx.size()];
      const Vec2 &a = poly[ia], &b = poly[ib], &c = poly[ic];
      if (cross2(b - a, c - b) <= 0.0) continue;  // reflex or flat
      bool empty = true;
      for (int j : idx) {
        if (j == ia || j == ib || j == ic) continue;
        const Vec2& p = poly[j];
        if (cross2(b - a, p - a) >= 0.0 && cross2(c - b, p - b) >= 0.0 && cross2(a - c, p - c) >= 0.0) {
          empty = false;
          break;
        }
      }
      if (!empty) continue;
      tris.push_back({ia, ib, ic});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped || ++guard > 4 * poly.size()) throw MeshError("behead: cap triangulation failed (no ear found)");
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

}  // namespace

TriangleMesh behead(const TriangleMesh& mesh, const CutPlane& plane) {
  check_indices(mesh);
  if (std::abs(plane.normal.norm() - 1.0) > 1e-9) throw InvalidArgument("behead: plane normal must be unit length");
  const Aabb box = bounding_box(mesh);
  const double snap = 1e-9 * box.extent().norm();

  std::vector<double> d(mesh.vertices.size());
  bool any_pos = false, any_neg = false;
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = plane.normal.dot(mesh.vertices[i] - plane.point);
    if (std::abs(d[i]) < snap) d[i] = 0.0;
    any_pos |= d[i] > 0.0;
    any_neg |= d[i] < 0.0;
  }
  if (!any_pos || !any_neg) {
    log::info("behead", "cut plane does not cross the mesh; returning input unchanged");
    return mesh;
  }

  TriangleMesh out;
  std::vector<int> keep_id(mesh.vertices.size(), -1);
  auto kept_vertex = [&](int v) {
    if (keep_id[v] < 0) {
      keep_id[v] = static_cast<int>(out.vertices.size());
      Vec3 p = mesh.vertices[v];
      if (d[v] == 0.0) p -= plane.normal * plane.normal.dot(p - plane.point);
      out.vertices.push_back(p);
    }
    return keep_id[v];
  };
  std::map<std::pair<int, int>, int> cut_id;
  auto cut_vertex = [&](int a, int b) {
    const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
    auto it = cut_id.find(key);
    if (it != cut_id.end()) return it->second;
    const int lo = key.first, hi = key.second;
    const double t = d[lo] / (d[lo] - d[hi]);
    Vec3 p = mesh.vertices[lo] + t * (mesh.vertices[hi] - mesh.vertices[lo]);
    p -= plane.normal * plane.normal.dot(p - plane.point);
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(p);
    cut_id.emplace(key, id);
    return id;
  };

  const bool labeled = mesh.has_labels();
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& t = mesh.faces[f];
    if (d[t[0]] <= 0.0 && d[t[1]] <= 0.0 && d[t[2]] <= 0.0) continue;
    // Sutherland-Hodgman against the half-space d >= 0.
    std::vector<int> poly;
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      if (d[a] >= 0.0) poly.push_back(kept_vertex(a));
      if ((d[a] > 0.0 && d[b] < 0.0) || (d[a] < 0.0 && d[b] > 0.0)) poly.push_back(cut_vertex(a, b));
    }
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
      out.faces.push_back({poly[0], poly[k], poly[k + 1]});
      if (labeled) out.labels.push_back(mesh.labels[f]);
    }
  }

  // Boundary half-edges of the clipped surface, keyed by origin.
  std::map<std::pair<int, int>, int> directed;
  for (const Face& t : out.faces)
    for (int k = 0; k < 3; ++k) ++directed[{t[k], t[(k + 1) % 3]}];
  std::map<int, int> next_of;
  for (const auto& [e, count] : directed) {
    if (directed.count({e.second, e.first})) continue;
    if (!next_of.emplace(e.first, e.second).second)
      throw MeshError("behead: boundary is pinched at vertex " + std::to_string(e.first));
  }

  // Plane basis with e1 x e2 = -normal, so counter-clockwise loops in (e1, e2)
  // yield cap faces facing -normal.
  Vec3 e1 = plane.normal.unitOrthogonal();
  Vec3 e2 = -plane.normal.cross(e1);
  auto to2d = [&](int v) {
    const Vec3 r = out.vertices[v] - plane.point;
    return Vec2(r.dot(e1), r.dot(e2));
  };

  std::vector<std::vector<int>> loops;
  std::map<int, char> used;
  for (const auto& [start, unused] : next_of) {
    if (used.count(start)) continue;
    std::vector<int> loop;
    int v = start;
    while (!used.count(v)) {
      used[v] = 1;
      loop.push_back(v);
      auto it = next_of.find(v);
      if (it == next_of.end()) throw MeshError("behead: open boundary chain (input not watertight?)");
      v = it->second;
    }
    if (v != start) throw MeshError("behead: boundary chain does not close");
    // Cap traverses the loop in reverse.
    std::reverse(loop.begin(), loop.end());
    loops.push_back(std::move(loop));
  }

  std::vector<std::vector<Vec2>> loops2d;
  for (const auto& loop : loops) {
    std::vector<Vec2> pts;
    for (int v : loop) pts.push_back(to2d(v));
    loops2d.push_back(std::move(pts));
  }
  for (std::size_t i = 0; i < loops.size(); ++i)
    for (std::size_t j = 0; j < loops.size(); ++j)
      if (i != j && point_in_polygon(loops2d[i][0], loops2d[j]))
        throw MeshError("behead: nested cut loops are not supported by the cap triangulation");

  for (std::size_t i = 0; i < loops.size(); ++i) {
    const auto& loop = loops[i];
    const auto& pts = loops2d[i];
    double signed_area = 0.0;
    Vec2 centroid = Vec2::Zero();
    for (std::size_t k = 0; k < pts.size(); ++k) {
      signed_area += 0.5 * cross2(pts[k], pts[(k + 1) % pts.size()]);
      centroid += pts[k];
    }
    centroid /= static_cast<double>(pts.size());
    if (signed_area <= 0.0) throw MeshError("behead: cut loop has unexpected orientation");

    bool star = true;
    for (std::size_t k = 0; k < pts.size() && star; ++k)
      star = cross2(pts[k] - centroid, pts[(k + 1) % pts.size()] - centroid) > 1e-12 * signed_area;

    if (star) {
      const int c = static_cast<int>(out.vertices.size());
      out.vertices.push_back(plane.point + centroid.x() * e1 + centroid.y() * e2);
      for (std::size_t k = 0; k < loop.size(); ++k) {
        out.faces.push_back({c, loop[k], loop[(k + 1) % loop.size()]});
        if (labeled) out.labels.push_back(Region::Skin);
      }
    } else {
      for (const auto& tri : ear_clip(pts)) {
        out.faces.push_back({loop[tri[0]], loop[tri[1]], loop[tri[2]]});
        if (labeled) out.labels.push_back(Region::Skin);
      }
    }
  }
  return out;
}

}  // namespace hforge
