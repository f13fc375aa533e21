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

#include "hrtf_forge/shapes.hpp"

#include <cmath>
#include <numbers>

#include "hrtf_forge/subdivide.hpp"

namespace hforge::shapes {

namespace {
void orient_outward(TriangleMesh& mesh) {
  if (signed_volume(mesh) < 0.0)
    for (Face& f : mesh.faces) std::swap(f[1], f[2]);
}
}  // namespace

TriangleMesh icosahedron(double radius) {
  const double phi = std::numbers::phi;
  TriangleMesh m;
  m.vertices = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
                {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
                {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (Vec3& v : m.vertices) v = v.normalized() * radius;
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
             {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  orient_outward(m);
  return m;
}

TriangleMesh icosphere(int level, double radius, const Vec3& center) {
  TriangleMesh m = icosahedron(1.0);
  for (int i = 0; i < level; ++i) {
    m = midpoint_subdivide_unchecked(m);
    for (Vec3& v : m.vertices) v.normalize();
  }
  for (Vec3& v : m.vertices) v = center + radius * v;
  return m;
}

TriangleMesh ellipsoid(int level, const Vec3& semi_axes) {
  TriangleMesh m = icosphere(level, 1.0);
  for (Vec3& v : m.vertices) v = v.cwiseProduct(semi_axes);
  return m;
}

TriangleMesh cube(double half) {
  TriangleMesh m;
  for (int i = 0; i < 8; ++i)
    m.vertices.emplace_back((i & 1) ? half : -half, (i & 2) ? half : -half, (i & 4) ? half : -half);
  m.faces = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
             {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  orient_outward(m);
  return m;
}

TriangleMesh torus(int nu, int nv, double major_radius, double minor_radius) {
  TriangleMesh m;
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < nu; ++i) {
    const double u = two_pi * i / nu;
    for (int j = 0; j < nv; ++j) {
      const double v = two_pi * j / nv;
      const double ring = major_radius + minor_radius * std::cos(v);
      m.vertices.emplace_back(ring * std::cos(u), ring * std::sin(u), minor_radius * std::sin(v));
    }
  }
  auto id = [&](int i, int j) { return ((i + nu) % nu) * nv + (j + nv) % nv; };
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  orient_outward(m);
  return m;
}

TriangleMesh flat_grid(int nx, int ny, double size) {
  TriangleMesh m;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) m.vertices.emplace_back(size * i / nx, size * j / ny, 0.0);
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return m;
}

TriangleMesh capsule(double radius, double half_length, int segments, int rings, int cylinder_rings) {
  // Latitude rings from top pole to bottom pole; the cylinder band is
  // inserted between the two hemispheres.
  std::vector<std::pair<double, double>> profile;  // (ring radius, z)
  const double half_pi = 0.5 * std::numbers::pi;
  for (int i = 1; i <= rings; ++i) {
    const double t = half_pi * i / rings;
    profile.emplace_back(radius * std::sin(t), half_length + radius * std::cos(t));
  }
  for (int i = 1; i < cylinder_rings; ++i)
    profile.emplace_back(radius, half_length - 2.0 * half_length * i / cylinder_rings);
  for (int i = 0; i < rings; ++i) {
    const double t = half_pi * i / rings;
    profile.emplace_back(radius * std::cos(t), -half_length - radius * std::sin(t));
  }

  TriangleMesh m;
  m.vertices.emplace_back(0.0, 0.0, half_length + radius);
  for (const auto& [r, z] : profile)
    for (int s = 0; s < segments; ++s) {
      const double a = 2.0 * std::numbers::pi * s / segments;
      m.vertices.emplace_back(r * std::cos(a), r * std::sin(a), z);
    }
  const int bottom = static_cast<int>(m.vertices.size());
  m.vertices.emplace_back(0.0, 0.0, -half_length - radius);

  const int nrings = static_cast<int>(profile.size());
  auto id = [&](int ring, int s) { return 1 + ring * segments + (s % segments); };
  for (int s = 0; s < segments; ++s) m.faces.push_back({0, id(0, s), id(0, s + 1)});
  for (int ring = 0; ring + 1 < nrings; ++ring)
    for (int s = 0; s < segments; ++s) {
      m.faces.push_back({id(ring, s), id(ring + 1, s), id(ring + 1, s + 1)});
      m.faces.push_back({id(ring, s), id(ring + 1, s + 1), id(ring, s + 1)});
    }
  for (int s = 0; s < segments; ++s) m.faces.push_back({bottom, id(nrings - 1, s + 1), id(nrings - 1, s)});
  orient_outward(m);
  return m;
}

}  // namespace hforge::shapes
