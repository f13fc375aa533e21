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
#include <cstring>
#include <filesystem>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "doctest.h"
#include "hrtf_forge/bvh.hpp"
#include "hrtf_forge/distance.hpp"
#include "hrtf_forge/error.hpp"
#include "hrtf_forge/geometry.hpp"
#include "hrtf_forge/mesh_io.hpp"
#include "hrtf_forge/shapes.hpp"
#include "hrtf_forge/subdivide.hpp"
#include "hrtf_forge/topology.hpp"
#include "test_util.hpp"

using namespace hforge;

namespace {

// Second STL reader written against the format description only: counts
// facets and distinct float triples without sharing any code with mesh_io.
std::pair<std::size_t, std::size_t> oracle_stl_counts(const std::string& bytes) {
  std::uint32_t n = 0;
  std::memcpy(&n, bytes.data() + 80, 4);
  std::set<std::array<float, 3>> distinct;
  for (std::uint32_t i = 0; i < n; ++i) {
    const char* rec = bytes.data() + 84 + 50 * static_cast<std::size_t>(i);
    for (int k = 0; k < 3; ++k) {
      std::array<float, 3> v;
      std::memcpy(v.data(), rec + 12 + 12 * k, 12);
      for (float& x : v)
        if (x == 0.0f) x = 0.0f;
      distinct.insert(v);
    }
  }
  return {distinct.size(), n};
}

std::string one_facet_binary() {
  std::string s(84, '\0');
  const std::uint32_t n = 1;
  std::memcpy(s.data() + 80, &n, 4);
  const float rec[12] = {0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0};
  s.append(reinterpret_cast<const char*>(rec), sizeof rec);
  s.append(2, '\0');
  return s;
}

// Dense barycentric grid minimization.
double grid_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c, int n) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n - i; ++j) {
      const double u = double(i) / n, v = double(j) / n;
      best = std::min(best, (p - ((1 - u - v) * a + u * b + v * c)).norm());
    }
  return best;
}

double brute_directed(const std::vector<Vec3>& samples, const TriangleMesh& target) {
  double worst = 0.0;
  for (const Vec3& s : samples) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < target.faces.size(); ++f)
      best = std::min(best,
                      closest_point_on_triangle<double>(s, target.corner(f, 0), target.corner(f, 1),
                                                        target.corner(f, 2))
                          .distance());
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_SUITE("mesh-core") {

TEST_CASE("binary STL single facet and unit scale") {
  const std::string bytes = one_facet_binary();
  TriangleMesh m = parse_stl(bytes, 1.0);
  CHECK(m.vertex_count() == 3);
  CHECK(m.face_count() == 1);
  TriangleMesh mm = parse_stl(bytes, 0.001);
  bool found = false;
  for (const Vec3& v : mm.vertices) found |= (v - Vec3(0.001, 0, 0)).norm() < 1e-15;
  CHECK(found);
}

TEST_CASE("STL malformed input reports a byte offset") {
  std::string bytes = one_facet_binary();
  bytes.resize(100);
  CHECK_THROWS_AS(parse_stl(bytes, 1.0), ParseError);
  CHECK_THROWS_AS(parse_stl(std::string(10, 'x'), 1.0), ParseError);
}

TEST_CASE("ASCII STL") {
  const std::string text =
      "solid t\n facet normal 0 0 1\n  outer loop\n   vertex 0 0 0\n   vertex 1 0 0\n   vertex 0 1 0\n"
      "  endloop\n endfacet\nendsolid t\n";
  TriangleMesh m = parse_stl(text, 1.0);
  CHECK(m.vertex_count() == 3);
  CHECK(m.face_count() == 1);
  CHECK_THROWS_AS(parse_stl("solid t\n facet normal 0 0 1\n outer loop\n vertex 0 x 0\n", 1.0), ParseError);
}

TEST_CASE("STL counts agree with an independent reader") {
  TriangleMesh head = shapes::ellipsoid(3, Vec3(0.08, 0.09, 0.11));
  const std::string bytes = format_stl(head);
  const auto [verts, faces] = oracle_stl_counts(bytes);
  TriangleMesh back = parse_stl(bytes);
  CHECK(back.vertex_count() == verts);
  CHECK(back.face_count() == faces);
}

TEST_CASE("STL round trip") {
  TriangleMesh sphere = shapes::icosphere(2);
  TriangleMesh back = parse_stl(format_stl(sphere, 1.0), 1.0);
  CHECK(back.face_count() == sphere.face_count());
  CHECK(back.vertex_count() == sphere.vertex_count());
  CHECK(hausdorff(sphere, back).symmetric < 1e-6);

  const auto dir = test_util::temp_dir("stl");
  save_stl(sphere, dir / "s.stl");
  TriangleMesh loaded = load_stl(dir / "s.stl");
  CHECK(loaded.face_count() == sphere.face_count());
  CHECK(hausdorff(sphere, loaded).symmetric < 1e-6);
}

TEST_CASE("OBJ groups, quads and label round trip") {
  const std::string text =
      "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\n"
      "g skin\nf 1 2 3 4\ng left_ear\nf 1 2 5\n";
  TriangleMesh m = parse_obj(text);
  REQUIRE(m.face_count() == 3);
  REQUIRE(m.has_labels());
  CHECK(m.labels[0] == Region::Skin);
  CHECK(m.labels[1] == Region::Skin);
  CHECK(m.labels[2] == Region::LeftEar);
  TriangleMesh back = parse_obj(format_obj(m));
  CHECK(back.labels == m.labels);
  CHECK(back.faces == m.faces);
  CHECK(back.vertices == m.vertices);
  CHECK_THROWS_AS(parse_obj("v 0 zero 0\n"), ParseError);
  try {
    parse_obj("v 0 0 0\nv 1 0 0\nv 0 q 0\n");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 3);
  }
}

TEST_CASE("validate icosahedron and open variants") {
  TriangleMesh ico = shapes::icosahedron();
  ValidationReport r = validate(ico);
  CHECK(r.is_manifold);
  CHECK(r.is_watertight);
  REQUIRE(r.genus);
  CHECK(*r.genus == 0);
  CHECK(r.vertex_count == 12);
  CHECK(r.edge_count == 30);
  CHECK(r.face_count == 20);

  TriangleMesh open = ico;
  open.faces.pop_back();
  ValidationReport ro = validate(open);
  CHECK_FALSE(ro.is_watertight);
  CHECK(ro.boundary_edge_count == 3);
  CHECK_FALSE(ro.genus.has_value());
}

TEST_CASE("torus genus from the Euler formula") {
  TriangleMesh t = shapes::torus(8, 8, 1.0, 0.3);
  ValidationReport r = validate(t);
  CHECK(r.is_manifold);
  CHECK(r.is_watertight);
  // V - E + F = 64 - 192 + 128 = 0 -> genus 1.
  CHECK(r.vertex_count - r.edge_count + r.face_count == 0);
  REQUIRE(r.genus);
  CHECK(*r.genus == 1);
}

TEST_CASE("half-edge structure") {
  HalfEdgeMesh he = build_half_edge(shapes::icosahedron());
  CHECK(he.size() == 60);
  for (int h = 0; h < he.size(); ++h) {
    REQUIRE(he.twin[h] >= 0);
    CHECK(he.twin[he.twin[h]] == h);
    CHECK(HalfEdgeMesh::next(HalfEdgeMesh::next(HalfEdgeMesh::next(h))) == h);
    CHECK(he.origin[he.twin[h]] == he.dest(h));
  }

  TriangleMesh fan;
  fan.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {-1, 0, 0}};
  fan.faces = {{0, 1, 2}, {0, 2, 3}};
  HalfEdgeMesh hf = build_half_edge(fan);
  int boundary = 0;
  for (int h = 0; h < hf.size(); ++h) boundary += hf.is_boundary(h);
  CHECK(boundary == 4);

  TriangleMesh bowtie;
  bowtie.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}, {0, 0, 1}};
  bowtie.faces = {{0, 1, 2}, {0, 3, 4}, {0, 1, 5}, {1, 0, 4}};
  CHECK_THROWS_AS(build_half_edge(bowtie), MeshError);
  CHECK_FALSE(validate(bowtie).is_manifold);
}

TEST_CASE("point_to_triangle") {
  const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
  auto r = point_to_triangle<double>(Vec3(1.0 / 3, 1.0 / 3, 1.0), a, b, c);
  CHECK(r.distance() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK((r.closest - Vec3(1.0 / 3, 1.0 / 3, 0)).norm() < 1e-15);
  CHECK(point_to_triangle<double>(a, a, b, c).distance() == 0.0);
  CHECK_THROWS_AS(point_to_triangle<double>(Vec3(1, 1, 1), a, b, Vec3(2, 0, 0)), InvalidArgument);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 2.5);
  for (int i = 0; i < 40; ++i) {
    const Vec3 p(u(rng), u(rng), 0.3 * u(rng));
    auto pr = point_to_triangle<double>(p, a, b, c);
    const Vec3& w = pr.barycentric;
    CHECK(w.minCoeff() >= 0.0);
    CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
    const double oracle = grid_distance(p, a, b, c, 2000);
    CHECK(pr.distance() <= oracle + 1e-12);
    CHECK(oracle - pr.distance() < 1e-6 + 1e-3);  // grid spacing bound
  }
  // Refined grid around the analytic foot point closes the gap to 1e-6.
  for (const Vec3& p : {Vec3(2.0, 2.0, 0.5), Vec3(-1.0, 0.4, 0.2), Vec3(0.3, -0.8, -0.4)}) {
    auto pr = point_to_triangle<double>(p, a, b, c);
    double best = std::numeric_limits<double>::infinity();
    const int n = 4000;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n - i; ++j) {
        const double uu = double(i) / n, vv = double(j) / n;
        best = std::min(best, (p - ((1 - uu - vv) * a + uu * b + vv * c)).norm());
      }
    CHECK(std::abs(best - pr.distance()) < 1e-6);
  }
}

TEST_CASE("BVH matches brute force") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (const TriangleMesh& m : {shapes::icosphere(2), shapes::torus(12, 8, 1.0, 0.35), shapes::flat_grid(10, 10, 1.0)}) {
    REQUIRE(m.face_count() <= 500);
    TriangleBVH bvh(m);
    // every face once, parents contain children
    std::vector<int> order = bvh.face_order();
    std::sort(order.begin(), order.end());
    for (std::size_t i = 0; i < order.size(); ++i) CHECK(order[i] == static_cast<int>(i));
    for (const auto& n : bvh.nodes())
      if (n.left >= 0) {
        CHECK(n.box.contains(bvh.nodes()[n.left].box));
        CHECK(n.box.contains(bvh.nodes()[n.right].box));
      }
    for (int q = 0; q < 100; ++q) {
      const Vec3 p(u(rng), u(rng), u(rng));
      ClosestHit h = bvh.closest(p);
      ClosestHit o = closest_brute_force(m, p);
      CHECK(std::abs(h.distance - o.distance) <= 1e-12);
      CHECK(h.face == o.face);
    }
    CHECK(bvh.closest(m.vertices[3]).distance == 0.0);
  }
  TriangleMesh grid = shapes::flat_grid(4, 4, 1.0);
  CHECK(TriangleBVH(grid).closest(Vec3(0.37, 0.61, 25.0)).distance == doctest::Approx(25.0).epsilon(1e-14));
}

TEST_CASE("hausdorff") {
  TriangleMesh s = shapes::icosphere(3);
  HausdorffResult same = hausdorff(s, s);
  // Face samples are rebuilt from barycentric weights, so zero holds up to
  // one rounding step of the coordinates.
  CHECK(same.forward < 1e-15);
  CHECK(same.backward < 1e-15);
  CHECK(same.symmetric < 1e-15);
  CHECK(hausdorff(s, s, 0).symmetric == 0.0);

  TriangleMesh a = shapes::icosphere(5, 1.0), b = shapes::icosphere(5, 1.1);
  HausdorffResult h = hausdorff(a, b);
  CHECK(std::abs(h.symmetric - 0.1) <= 0.005);
  HausdorffResult hr = hausdorff(b, a);
  CHECK(hr.symmetric == h.symmetric);
  CHECK(hr.forward == h.backward);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto soup = [&] {
    TriangleMesh m;
    for (int f = 0; f < 50; ++f) {
      const Vec3 base(u(rng), u(rng), u(rng));
      for (int k = 0; k < 3; ++k) m.vertices.push_back(base + 0.2 * Vec3(u(rng), u(rng), u(rng)));
      m.faces.push_back({3 * f, 3 * f + 1, 3 * f + 2});
    }
    return m;
  };
  TriangleMesh p = soup(), q = soup();
  HausdorffResult hs = hausdorff(p, q, 4);
  CHECK(std::abs(hs.forward - brute_directed(surface_samples(p, 4), q)) <= 1e-12);
  CHECK(std::abs(hs.backward - brute_directed(surface_samples(q, 4), p)) <= 1e-12);
}

TEST_CASE("apply_transform") {
  TriangleMesh m = shapes::torus(10, 6, 1.0, 0.3);
  CHECK(apply_transform(m, RigidTransform::identity()).vertices == m.vertices);

  RigidTransform shift;
  shift.translation = Vec3(1, 2, 3);
  Aabb b0 = bounding_box(m), b1 = bounding_box(apply_transform(m, shift));
  CHECK((b1.lo - b0.lo - Vec3(1, 2, 3)).norm() < 1e-12);
  CHECK((b1.hi - b0.hi - Vec3(1, 2, 3)).norm() < 1e-12);

  RigidTransform rz;
  rz.rotation = Eigen::AngleAxisd(std::numbers::pi / 2, Vec3::UnitZ()).toRotationMatrix();
  CHECK((rz.apply(Vec3(1, 0, 0)) - Vec3(0, 1, 0)).norm() < 1e-12);

  RigidTransform bad;
  bad.rotation(0, 0) = 2.0;
  CHECK_THROWS_AS(apply_transform(m, bad), InvalidArgument);
  RigidTransform mirror;
  mirror.rotation(0, 0) = -1.0;
  CHECK_THROWS_AS(apply_transform(m, mirror), InvalidArgument);

  // pairwise distances preserved
  RigidTransform t = test_util::random_rigid(5);
  TriangleMesh mt = apply_transform(m, t);
  CHECK(mt.faces == m.faces);
  for (std::size_t i = 0; i < m.vertices.size(); i += 7)
    for (std::size_t j = 0; j < m.vertices.size(); j += 5) {
      const double d0 = (m.vertices[i] - m.vertices[j]).norm();
      const double d1 = (mt.vertices[i] - mt.vertices[j]).norm();
      CHECK(std::abs(d0 - d1) <= 1e-9 * std::max(d0, 1.0));
    }
}

TEST_CASE("midpoint subdivision counts") {
  TriangleMesh ico = shapes::icosahedron();
  TriangleMesh s1 = midpoint_subdivide(ico);
  CHECK(s1.vertex_count() == 42);
  CHECK(s1.face_count() == 80);
  TriangleMesh s2 = midpoint_subdivide(s1);
  CHECK(s2.face_count() == 320);
  ValidationReport r = validate(s2);
  CHECK(r.is_closed_genus0());
  TriangleMesh open = ico;
  open.faces.pop_back();
  CHECK_THROWS_AS(midpoint_subdivide(open), MeshError);
}

TEST_CASE("fixture shapes are closed and outward") {
  for (const TriangleMesh& m : {shapes::icosahedron(), shapes::icosphere(3), shapes::cube(),
                                shapes::capsule(0.05, 0.1, 24, 6, 8), shapes::ellipsoid(2, Vec3(1, 2, 3))}) {
    ValidationReport r = validate(m);
    CHECK(r.is_closed_genus0());
    CHECK(signed_volume(m) > 0.0);
    CHECK(r.degenerate_face_count == 0);
  }
  CHECK(shapes::icosphere(3).face_count() == 1280);
  CHECK(shapes::icosphere(4).face_count() == 5120);
}

TEST_CASE("winding number") {
  TriangleMesh s = shapes::icosphere(2);
  CHECK(is_inside(s, Vec3(0.1, 0.2, 0.0)));
  CHECK_FALSE(is_inside(s, Vec3(1.5, 0.0, 0.0)));
}

TEST_CASE("Euler property on every fixture") {
  for (const TriangleMesh& m : {shapes::icosphere(1), shapes::torus(9, 7, 2.0, 0.5), shapes::cube()}) {
    ValidationReport r = validate(m);
    REQUIRE(r.genus);
    CHECK(r.vertex_count - r.edge_count + r.face_count == 2 - 2 * *r.genus);
  }
}

}  // TEST_SUITE
