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

#include "hrtf_forge/distance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hrtf_forge/error.hpp"
#include "hrtf_forge/geometry.hpp"
#include "hrtf_forge/parallel.hpp"

namespace hforge {

std::vector<Vec3> barycentric_pattern(int count) {
  // R2 sequence (plastic-number Weyl sequence), reflected into the triangle.
  constexpr double g = 1.32471795724474602596;
  constexpr double a1 = 1.0 / g;
  constexpr double a2 = 1.0 / (g * g);
  std::vector<Vec3> pattern;
  pattern.reserve(std::max(count, 0));
  for (int i = 0; i < count; ++i) {
    double u = std::fmod(0.5 + a1 * (i + 1), 1.0);
    double v = std::fmod(0.5 + a2 * (i + 1), 1.0);
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    pattern.emplace_back(1.0 - u - v, u, v);
  }
  return pattern;
}

std::vector<Vec3> surface_samples(const TriangleMesh& mesh, int per_face) {
  const std::vector<Vec3> pattern = barycentric_pattern(per_face);
  std::vector<Vec3> samples = mesh.vertices;
  samples.reserve(mesh.vertices.size() + mesh.faces.size() * pattern.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    for (const Vec3& w : pattern)
      samples.push_back(w[0] * mesh.corner(f, 0) + w[1] * mesh.corner(f, 1) + w[2] * mesh.corner(f, 2));
  }
  return samples;
}

namespace {
double directed(const std::vector<Vec3>& samples, const TriangleBVH& target) {
  std::vector<double> d(samples.size());
  parallel_for(0, static_cast<std::ptrdiff_t>(samples.size()),
               [&](std::ptrdiff_t i) { d[i] = target.closest(samples[i]).distance; });
  double best = 0.0;
  for (double x : d) best = std::max(best, x);
  return best;
}
}  // namespace

HausdorffResult hausdorff(const TriangleMesh& a, const TriangleBVH& a_bvh, const TriangleMesh& b,
                          const TriangleBVH& b_bvh, int samples_per_face) {
  HausdorffResult r;
  r.forward = directed(surface_samples(a, samples_per_face), b_bvh);
  r.backward = directed(surface_samples(b, samples_per_face), a_bvh);
  r.symmetric = std::max(r.forward, r.backward);
  return r;
}

HausdorffResult hausdorff(const TriangleMesh& a, const TriangleMesh& b, int samples_per_face) {
  if (a.empty() || b.empty()) throw InvalidArgument("hausdorff: both meshes must have faces");
  const TriangleBVH bvh_a(a), bvh_b(b);
  return hausdorff(a, bvh_a, b, bvh_b, samples_per_face);
}

double winding_number(const TriangleMesh& mesh, const Vec3& p) {
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f)
    total += solid_angle<double>(p, mesh.corner(f, 0), mesh.corner(f, 1), mesh.corner(f, 2));
  return total / (4.0 * std::numbers::pi);
}

bool is_inside(const TriangleMesh& mesh, const Vec3& p) { return std::abs(winding_number(mesh, p)) > 0.5; }

}  // namespace hforge
