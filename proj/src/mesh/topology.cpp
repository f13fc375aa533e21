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

#include "hrtf_forge/topology.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "hrtf_forge/error.hpp"
#include "hrtf_forge/spatial_hash.hpp"

namespace hforge {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Link of a vertex is a single path or cycle.
bool fan_is_disk(const std::vector<std::pair<int, int>>& link) {
  std::map<int, std::vector<int>> adj;
  for (const auto& [a, b] : link) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  int ends = 0;
  for (const auto& [v, n] : adj) {
    if (n.size() > 2) return false;
    if (n.size() == 1) ++ends;
  }
  if (ends != 0 && ends != 2) return false;
  // connectivity
  std::vector<int> stack{adj.begin()->first};
  std::map<int, bool> seen{{adj.begin()->first, true}};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return seen.size() == adj.size() &&
         std::all_of(seen.begin(), seen.end(), [](const auto& kv) { return kv.second; });
}

}  // namespace

std::vector<int> face_components(const TriangleMesh& mesh, int* count) {
  const EdgeTable table = build_edge_table(mesh);
  UnionFind uf(mesh.faces.size());
  std::vector<int> first_face(table.edges.size(), -1);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    for (int e : table.face_edges[f]) {
      if (first_face[e] < 0)
        first_face[e] = static_cast<int>(f);
      else
        uf.unite(first_face[e], static_cast<int>(f));
    }
  }
  std::vector<int> comp(mesh.faces.size(), -1);
  std::unordered_map<int, int> ids;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const int root = uf.find(static_cast<int>(f));
    auto [it, inserted] = ids.try_emplace(root, static_cast<int>(ids.size()));
    comp[f] = it->second;
  }
  if (count) *count = static_cast<int>(ids.size());
  return comp;
}

ValidationReport validate(const TriangleMesh& mesh, double weld_tol, double area_eps) {
  ValidationReport r;
  r.vertex_count = static_cast<int>(mesh.vertices.size());
  r.face_count = static_cast<int>(mesh.faces.size());
  r.bounding_box = bounding_box(mesh);

  // Duplicate vertices: any earlier vertex within weld_tol.
  {
    SpatialHash grid(std::max(weld_tol, 1e-300));
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      bool dup = false;
      grid.visit_near(mesh.vertices[i], [&](int j) {
        if ((mesh.vertices[j] - mesh.vertices[i]).norm() <= weld_tol) dup = true;
      });
      if (dup) ++r.duplicate_vertex_count;
      grid.insert(mesh.vertices[i], static_cast<int>(i));
    }
  }

  // Usable faces (valid indices) for the topology analysis.
  TriangleMesh topo;
  topo.vertices = mesh.vertices;
  const int nv = static_cast<int>(mesh.vertices.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& t = mesh.faces[f];
    const bool in_range = std::all_of(t.begin(), t.end(), [&](int i) { return i >= 0 && i < nv; });
    const bool repeated = t[0] == t[1] || t[1] == t[2] || t[0] == t[2];
    if (!in_range || repeated || face_area(mesh, f) < area_eps) ++r.degenerate_face_count;
    if (in_range && !repeated) topo.faces.push_back(t);
  }

  const EdgeTable table = build_edge_table(topo);
  r.edge_count = static_cast<int>(table.edges.size());
  std::vector<int> edge_faces(table.edges.size(), 0);
  for (const auto& fe : table.face_edges)
    for (int e : fe) ++edge_faces[e];

  bool edges_ok = true;
  bool all_two = true;
  for (int c : edge_faces) {
    if (c == 1) ++r.boundary_edge_count;
    if (c > 2) {
      ++r.nonmanifold_edge_count;
      edges_ok = false;
    }
    if (c != 2) all_two = false;
  }

  // Vertex fans.
  std::vector<std::vector<std::pair<int, int>>> links(mesh.vertices.size());
  for (const Face& t : topo.faces) {
    for (int k = 0; k < 3; ++k) links[t[k]].emplace_back(t[(k + 1) % 3], t[(k + 2) % 3]);
  }
  bool fans_ok = true;
  for (const auto& link : links) {
    if (!link.empty() && !fan_is_disk(link)) {
      fans_ok = false;
      break;
    }
  }

  r.is_manifold = edges_ok && fans_ok;
  r.is_watertight = all_two && !topo.faces.empty();

  int ncomp = 0;
  const std::vector<int> comp = face_components(topo, &ncomp);
  r.component_count = ncomp;

  if (r.is_manifold && r.is_watertight) {
    std::vector<long> v_count(ncomp, 0), e_count(ncomp, 0), f_count(ncomp, 0);
    std::vector<int> vertex_comp(mesh.vertices.size(), -1);
    for (std::size_t f = 0; f < topo.faces.size(); ++f) {
      ++f_count[comp[f]];
      for (int v : topo.faces[f]) {
        if (vertex_comp[v] < 0) {
          vertex_comp[v] = comp[f];
          ++v_count[comp[f]];
        }
      }
    }
    std::vector<int> edge_comp(table.edges.size(), -1);
    for (std::size_t f = 0; f < topo.faces.size(); ++f)
      for (int e : table.face_edges[f]) edge_comp[e] = comp[f];
    for (int c : edge_comp) ++e_count[c];
    int genus = 0;
    for (int c = 0; c < ncomp; ++c) {
      const long chi = v_count[c] - e_count[c] + f_count[c];
      genus += static_cast<int>((2 - chi) / 2);
    }
    r.genus = genus;
  }
  return r;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "vertices: " << vertex_count << '\n'
     << "edges: " << edge_count << '\n'
     << "faces: " << face_count << '\n'
     << "manifold: " << (is_manifold ? "true" : "false") << '\n'
     << "watertight: " << (is_watertight ? "true" : "false") << '\n'
     << "genus: " << (genus ? std::to_string(*genus) : std::string("absent")) << '\n'
     << "components: " << component_count << '\n'
     << "boundary_edges: " << boundary_edge_count << '\n'
     << "nonmanifold_edges: " << nonmanifold_edge_count << '\n'
     << "duplicate_vertices: " << duplicate_vertex_count << '\n'
     << "degenerate_faces: " << degenerate_face_count << '\n';
  if (bounding_box.valid()) {
    os << "bbox_min: [" << bounding_box.lo.x() << ", " << bounding_box.lo.y() << ", "
       << bounding_box.lo.z() << "]\n"
       << "bbox_max: [" << bounding_box.hi.x() << ", " << bounding_box.hi.y() << ", "
       << bounding_box.hi.z() << "]\n";
  }
  return os.str();
}

std::vector<int> HalfEdgeMesh::outgoing(int v) const {
  std::vector<int> out;
  const int start = vertex_half_edge[v];
  if (start < 0) return out;
  // Rotate clockwise until a boundary is hit, then collect counter-clockwise.
  int h = start;
  for (int guard = 0; guard < size(); ++guard) {
    const int t = twin[prev(h)];
    if (t < 0 || t == start) break;
    h = t;
  }
  const int first = h;
  do {
    out.push_back(h);
    const int t = twin[h];
    if (t < 0) break;
    h = next(t);
  } while (h != first && static_cast<int>(out.size()) <= size());
  return out;
}

HalfEdgeMesh build_half_edge(const TriangleMesh& mesh) {
  check_indices(mesh);
  HalfEdgeMesh he;
  const int nh = static_cast<int>(mesh.faces.size()) * 3;
  he.face_count = static_cast<int>(mesh.faces.size());
  he.origin.resize(nh);
  he.twin.assign(nh, -1);
  he.vertex_half_edge.assign(mesh.vertices.size(), -1);

  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(nh);
  auto key = [](int a, int b) {
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  };
  auto edge_name = [](int a, int b) {
    return "(" + std::to_string(std::min(a, b)) + ", " + std::to_string(std::max(a, b)) + ")";
  };
  for (int f = 0; f < he.face_count; ++f) {
    for (int k = 0; k < 3; ++k) {
      const int h = 3 * f + k;
      const int a = mesh.faces[f][k];
      const int b = mesh.faces[f][(k + 1) % 3];
      he.origin[h] = a;
      if (he.vertex_half_edge[a] < 0) he.vertex_half_edge[a] = h;
      if (!directed.try_emplace(key(a, b), h).second)
        throw MeshError("non-manifold edge " + edge_name(a, b) +
                        ": traversed twice in the same direction");
    }
  }
  for (int h = 0; h < nh; ++h) {
    const int a = he.origin[h];
    const int b = he.origin[HalfEdgeMesh::next(h)];
    auto it = directed.find(key(b, a));
    if (it != directed.end()) he.twin[h] = it->second;
  }
  // A third face on an edge shows up as a twin relation that is not mutual.
  for (int h = 0; h < nh; ++h) {
    const int t = he.twin[h];
    if (t >= 0 && he.twin[t] != h)
      throw MeshError("non-manifold edge " + edge_name(he.origin[h], he.origin[HalfEdgeMesh::next(h)]));
  }
  // Vertex fans must be single disks for the rotation order to be well defined.
  std::vector<int> fan_size(mesh.vertices.size(), 0);
  for (int h = 0; h < nh; ++h) ++fan_size[he.origin[h]];
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (fan_size[v] == 0) continue;
    // Prefer a boundary half-edge as the start so that outgoing() sees the whole fan.
    const auto fan = he.outgoing(static_cast<int>(v));
    if (static_cast<int>(fan.size()) != fan_size[v])
      throw MeshError("non-manifold vertex " + std::to_string(v) + ": incident faces form several fans");
  }
  return he;
}

}  // namespace hforge
