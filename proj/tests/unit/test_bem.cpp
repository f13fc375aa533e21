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
#include <numbers>
#include <random>

#include <Eigen/LU>
#include <unsupported/Eigen/FFT>

#include "doctest.h"
#include "hrtf_forge/distance.hpp"
#include "hrtf_forge/error.hpp"
#include "hrtf_forge/geometry.hpp"
#include "hrtf_forge/hrtf.hpp"
#include "hrtf_forge/parallel.hpp"
#include "hrtf_forge/shapes.hpp"
#include "test_util.hpp"

using namespace hforge;
using namespace hforge::bem;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Closed form of int 1/r over a triangle containing x in its plane: each
// edge contributes h * [asinh(tan phi)] between its end angles, where h is
// the distance from x to the edge line.
double inverse_distance_integral(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& x) {
  double total = 0.0;
  const Vec3 v[3] = {a, b, c};
  for (int e = 0; e < 3; ++e) {
    const Vec3 p = v[e], q = v[(e + 1) % 3];
    const Vec3 t = (q - p).normalized();
    const Vec3 foot = p + t * (x - p).dot(t);
    const double h = (x - foot).norm();
    const double s1 = (p - foot).dot(t), s2 = (q - foot).dot(t);
    total += h * (std::asinh(s2 / h) - std::asinh(s1 / h));
  }
  return total;
}

// Smooth remainder (exp(ikr) - 1) / (4 pi r), integrated on a fine split.
Complex smooth_remainder(double k, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& x, int depth) {
  if (depth > 0) {
    const Vec3 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
    return smooth_remainder(k, a, ab, ca, x, depth - 1) + smooth_remainder(k, ab, b, bc, x, depth - 1) +
           smooth_remainder(k, ca, bc, c, x, depth - 1) + smooth_remainder(k, ab, bc, ca, x, depth - 1);
  }
  const TriangleRule& rule = triangle_rule(6);  // no centroid node
  const double area = 0.5 * (b - a).cross(c - a).norm();
  Complex sum = 0.0;
  for (std::size_t q = 0; q < rule.weights.size(); ++q) {
    const Vec3& w = rule.barycentric[q];
    const double r = (w[0] * a + w[1] * b + w[2] * c - x).norm();
    const Complex f = r < 1e-14 ? kI * k / (4 * kPi) : (std::exp(kI * (k * r)) - 1.0) / (4 * kPi * r);
    sum += rule.weights[q] * area * f;
  }
  return sum;
}

// Pulsating sphere of radius a, uniform normal velocity v.
Complex pulsating_sphere(double k, double omega, double rho, double a, double v, double r) {
  return kI * omega * rho * v * a * a * std::exp(kI * (k * (r - a))) / ((kI * k * a - 1.0) * r);
}

struct SurfaceSolution {
  CMatrix pressure, dpdn;
};

SurfaceSolution solve_uniform(const TriangleMesh& mesh, double k, const AcousticConfig& cfg) {
  const CMatrix v = CMatrix::Ones(static_cast<Eigen::Index>(mesh.faces.size()), 1);
  BemSystem sys = assemble(mesh, k, cfg, v);
  SurfaceSolution out;
  out.dpdn = sys.normal_derivative;
  out.pressure = solve(std::move(sys)).solution;
  return out;
}

double max_db_error(const HrtfSet& a, const HrtfSet& b, Ear ear, std::size_t f) {
  double worst = 0.0;
  for (std::size_t d = 0; d < a.direction_count(); ++d)
    worst = std::max(worst, std::abs(20.0 * std::log10(std::abs(a.at(d, ear, f)) / std::abs(b.at(d, ear, f)))));
  return worst;
}

double max_phase_error_deg(const HrtfSet& a, const HrtfSet& b, Ear ear, std::size_t f) {
  double worst = 0.0;
  for (std::size_t d = 0; d < a.direction_count(); ++d)
    worst = std::max(worst, std::abs(std::arg(a.at(d, ear, f) / b.at(d, ear, f))) * 180.0 / kPi);
  return worst;
}

}  // namespace

TEST_SUITE("bem-hrtf") {

TEST_CASE("triangle rules integrate monomials to their degree") {
  const std::pair<int, int> rules[] = {{1, 1}, {3, 2}, {6, 4}, {7, 5}, {12, 6}};
  for (const auto& [points, degree] : rules) {
    const TriangleRule& r = triangle_rule(points);
    CHECK(r.weights.size() == static_cast<std::size_t>(points));
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) {
        double sum = 0.0;  // reference triangle (0,0), (1,0), (0,1), area 1/2
        for (std::size_t q = 0; q < r.weights.size(); ++q)
          sum += 0.5 * r.weights[q] * std::pow(r.barycentric[q][1], a) * std::pow(r.barycentric[q][2], b);
        CHECK(sum == doctest::Approx(factorial(a) * factorial(b) / factorial(a + b + 2)).epsilon(1e-12));
      }
  }
  CHECK_THROWS_AS(triangle_rule(5), InvalidArgument);

  std::vector<double> x, w;
  gauss_legendre(8, x, w);
  for (int m = 0; m < 16; ++m) {
    double sum = 0.0;
    for (int i = 0; i < 8; ++i) sum += w[i] * std::pow(x[i], m);
    CHECK(sum == doctest::Approx(m % 2 == 0 ? 2.0 / (m + 1) : 0.0).scale(1.0).epsilon(1e-13));
  }
}

TEST_CASE("green's function and its normal derivative") {
  CHECK(green(0.0, Vec3::Zero(), Vec3(1, 0, 0)).real() == doctest::Approx(0.0795775).epsilon(1e-6));
  const Vec3 x(0.1, -0.2, 0.3), y(0.7, 0.4, -0.5);
  const double r = (x - y).norm();
  for (double k : {0.0, 1.0, 37.0, 500.0}) CHECK(std::abs(green(k, x, y)) == doctest::Approx(1.0 / (4 * kPi * r)));
  CHECK_THROWS_AS(green(1.0, x, x), InvalidArgument);
  CHECK_THROWS_AS(green_dn(1.0, x, x, Vec3::UnitZ()), InvalidArgument);

  const Vec3 n = Vec3(0.3, -0.5, 0.8).normalized();
  for (double k : {0.5, 12.0, 80.0}) {
    const double h = 1e-6;
    const Complex fd = (green(k, x, y + h * n) - green(k, x, y - h * n)) / (2 * h);
    const Complex an = green_dn(k, x, y, n);
    CHECK(std::abs(an - fd) / std::abs(an) < 1e-8);
  }
}

TEST_CASE("singular single layer matches an analytic split") {
  const Vec3 a(0.0, 0.0, 0.0), b(0.012, 0.001, 0.0), c(0.004, 0.011, 0.0);
  const Vec3 x = (a + b + c) / 3.0;
  for (double k : {0.0, 18.3, 120.0, 290.0}) {
    const Complex oracle = inverse_distance_integral(a, b, c, x) / (4 * kPi) + smooth_remainder(k, a, b, c, x, 5);
    const Complex ours = singular_single_layer(k, a, b, c, x);
    CHECK(std::abs(ours - oracle) / std::abs(oracle) < 1e-6);
  }
  // Off-centroid interior point, tilted triangle.
  const RigidTransform t = test_util::random_rigid(5, 0.1);
  const Vec3 ta = t.apply(a), tb = t.apply(b), tc = t.apply(c);
  const Vec3 p = 0.6 * ta + 0.3 * tb + 0.1 * tc;
  const Complex oracle = inverse_distance_integral(ta, tb, tc, p) / (4 * kPi) + smooth_remainder(50.0, ta, tb, tc, p, 5);
  CHECK(std::abs(singular_single_layer(50.0, ta, tb, tc, p) - oracle) / std::abs(oracle) < 1e-6);
}

TEST_CASE("well-separated element integrals match one-point quadrature") {
  const TriangleMesh m = shapes::icosphere(3, 0.0875);
  const std::size_t f = 17;
  const Vec3 c = face_centroid(m, f), n = face_normal(m, f);
  const double diam = max_edge_length(m);
  const Vec3 x = c + 60.0 * diam * Vec3(0.6, 0.0, 0.8);
  const double area = face_area(m, f);
  // The one-point error is dominated by phase variation across the element,
  // (k diam)^2 / 36, so keep k diam small.
  for (double k : {0.0, 2 * kPi * 500 / 343.0}) {
    const ElementIntegrals e = element_integrals(m, f, k, x, triangle_rule(7));
    CHECK(std::abs(e.single_layer - area * green(k, x, c)) / std::abs(e.single_layer) < 1e-3);
    CHECK(std::abs(e.double_layer - area * green_dn(k, x, c, n)) / std::abs(e.double_layer) < 1e-3);
  }
}

TEST_CASE("chief points lie deep inside and are reproducible") {
  const TriangleMesh m = shapes::ellipsoid(2, Vec3(0.09, 0.075, 0.11));
  const std::vector<Vec3> pts = chief_points(m, 16, 4);
  REQUIRE(pts.size() == 16);
  const TriangleBVH bvh(m);
  for (const Vec3& p : pts) {
    CHECK(is_inside(m, p));
    CHECK(bvh.closest(p).distance >= 0.2 * 0.05);  // true inradius is 0.075
  }
  CHECK(chief_points(m, 16, 4) == pts);
  CHECK(chief_points(m, 16, 5) != pts);
  const TriangleMesh open = shapes::flat_grid(3, 3, 1.0);
  CHECK_THROWS_AS(chief_points(open, 4, 1), MeshError);
}

TEST_CASE("assembly shape, determinism and preconditions") {
  const TriangleMesh m = sphere_fixture(2, 0.0875, 20.0);
  AcousticConfig cfg;
  cfg.frequencies = {1000.0};
  const double k = cfg.wavenumber(1000.0);
  const BemSystem a = assemble(m, k, cfg, std::vector<Region>{Region::LeftEar});
  CHECK(a.matrix.rows() == static_cast<Eigen::Index>(m.faces.size()) + cfg.chief_point_count);
  CHECK(a.matrix.cols() == static_cast<Eigen::Index>(m.faces.size()));
  CHECK(a.rhs.cols() == 1);
  set_thread_count(3);
  const BemSystem b = assemble(m, k, cfg, std::vector<Region>{Region::LeftEar});
  set_thread_count(1);
  CHECK((a.matrix.array() == b.matrix.array()).all());
  CHECK((a.rhs.array() == b.rhs.array()).all());

  TriangleMesh unlabeled = m;
  unlabeled.labels.assign(m.faces.size(), Region::Skin);
  CHECK_THROWS_AS(assemble(unlabeled, k, cfg, std::vector<Region>{Region::LeftEar}), InvalidArgument);
  TriangleMesh inverted = m;
  for (auto& f : inverted.faces) std::swap(f[1], f[2]);
  CHECK_THROWS_AS(assemble(inverted, k, cfg, std::vector<Region>{Region::LeftEar}), MeshError);
  AcousticConfig bad = cfg;
  bad.chief_point_count = 2;
  CHECK_THROWS_AS(bad.check(), ConfigError);
  bad = cfg;
  bad.frequencies = {500.0, 400.0};
  CHECK_THROWS_AS(bad.check(), ConfigError);
}

TEST_CASE("least squares: LU oracle, rank deficiency, linearity") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  const int size = 40;
  CMatrix a(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) a(i, j) = Complex(n(rng), n(rng)) + (i == j ? Complex(3.0 * size, 0.0) : 0.0);
  CMatrix b(size, 2);
  for (int i = 0; i < size; ++i) b(i, 0) = Complex(n(rng), n(rng)), b(i, 1) = Complex(n(rng), n(rng));
  const CMatrix lu = a.partialPivLu().solve(b);
  const SolveResult qr = least_squares(CMatrix(a), b);
  CHECK((qr.solution - lu).norm() / lu.norm() < 1e-10);
  CHECK(qr.relative_residual[0] < 1e-12);

  const SolveResult twice = least_squares(CMatrix(a), CMatrix(2.0 * b));
  CHECK((twice.solution - 2.0 * qr.solution).norm() <= 1e-14 * qr.solution.norm());

  CMatrix singular = a;
  singular.col(7) = singular.col(3);
  CHECK_THROWS_AS(least_squares(std::move(singular), b), NumericalError);
  CHECK_THROWS_AS(least_squares(CMatrix(a.topRows(10)), b.topRows(10)), InvalidArgument);

  // Inconsistent overdetermined system: residual above 1e-2 is an error.
  CMatrix tall(3, 1);
  tall << 1.0, 1.0, 1.0;
  CMatrix rhs(3, 1);
  rhs << 1.0, -1.0, 0.5;
  CHECK_THROWS_AS(least_squares(std::move(tall), rhs), NumericalError);
}

TEST_CASE("pulsating sphere: static limit, boundary values and far-field decay") {
  const double a = 0.0875;
  const TriangleMesh m = shapes::icosphere(3, a);
  AcousticConfig cfg;
  cfg.frequencies = {1.0};
  {
    const double k = cfg.wavenumber(1.0), omega = cfg.angular_frequency(1.0);
    const SurfaceSolution s = solve_uniform(m, k, cfg);
    const Complex expected = -kI * omega * cfg.density * a;  // static potential -v a
    for (Eigen::Index i = 0; i < s.pressure.rows(); ++i)
      CHECK(std::abs(s.pressure(i, 0) - expected) / std::abs(expected) < 0.01);
  }
  const double f = 2000.0, k = cfg.wavenumber(f), omega = cfg.angular_frequency(f);
  const SurfaceSolution s = solve_uniform(m, k, cfg);
  // Surface values.
  for (Eigen::Index i = 0; i < s.pressure.rows(); ++i) {
    const Complex exact = pulsating_sphere(k, omega, cfg.density, a, 1.0, a);
    CHECK(std::abs(s.pressure(i, 0) - exact) / std::abs(exact) < 0.02);
  }
  // Field points near the body and far away (kr > 10 for the decay check).
  const Vec3 dir = Vec3(0.3, 0.5, -0.8).normalized();
  const std::vector<Vec3> pts{1.3 * a * dir, 1.0 * dir, 2.0 * dir};
  const CMatrix p = evaluate_field(m, s.pressure, s.dpdn, k, pts, triangle_rule(7));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Complex exact = pulsating_sphere(k, omega, cfg.density, a, 1.0, pts[i].norm());
    CHECK(std::abs(p(static_cast<Eigen::Index>(i), 0) - exact) / std::abs(exact) < 0.02);
  }
  CHECK(std::abs(p(2, 0)) / std::abs(p(1, 0)) == doctest::Approx(0.5).epsilon(0.02));

  // Zero data, zero field; interior points rejected.
  const CMatrix zero = CMatrix::Zero(s.pressure.rows(), 1);
  CHECK(evaluate_field(m, zero, zero, k, pts, triangle_rule(7)).norm() == 0.0);
  CHECK_THROWS_AS(evaluate_field(m, zero, zero, k, {Vec3(0.01, 0, 0)}, triangle_rule(7)), InvalidArgument);
}

TEST_CASE("spherical hankel functions") {
  std::vector<Complex> h, dh;
  for (double x : {0.3, 2.0, 15.0, 80.0}) {
    spherical_hankel(25, x, h, dh);
    CHECK(std::abs(h[0] - Complex(std::sin(x), -std::cos(x)) / x) < 1e-14 * std::abs(h[0]));
    const Complex h1 = Complex(std::sin(x) / (x * x) - std::cos(x) / x, -std::cos(x) / (x * x) - std::sin(x) / x);
    CHECK(std::abs(h[1] - h1) < 1e-13 * std::abs(h1));
    // Wronskian j_n y_n' - j_n' y_n = 1 / x^2, where upward recurrence keeps
    // j_n accurate (n <= x).
    for (int n = 0; n <= std::min(25, static_cast<int>(x)); ++n) {
      const double w = h[n].real() * dh[n].imag() - dh[n].real() * h[n].imag();
      CHECK(w * x * x == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
  CHECK_THROWS_AS(spherical_hankel(3, 0.0, h, dh), InvalidArgument);
}

TEST_CASE("sphere series: plateau, static limit, reciprocity, term guard") {
  AcousticConfig medium;
  const double k = medium.wavenumber(3000.0);
  std::vector<Vec3> pts;
  for (int i = 0; i < 12; ++i) pts.push_back(1.2 * Vec3(std::cos(0.5 * i), std::sin(0.5 * i), 0.2).normalized());
  for (double cap : {0.0, 2.0e-4}) {
    SphereSource src;
    src.cap_area = cap;
    const SeriesResult base = analytic_sphere_response(src, pts, k, 40, medium);
    const SeriesResult more = analytic_sphere_response(src, pts, k, 50, medium);
    for (std::size_t i = 0; i < pts.size(); ++i)
      CHECK(std::abs(more.pressure[i] - base.pressure[i]) / std::abs(more.pressure[i]) < 1e-9);
    CHECK(base.tail_bound <= 1e-8);

    // k -> 0: p / (i omega rho) approaches the incompressible potential.
    const double k0 = 1e-7;
    const SeriesResult tiny = analytic_sphere_response(src, pts, k0, 25, medium);
    const std::vector<double> phi = static_sphere_potential(src, pts, 25);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Complex ratio = tiny.pressure[i] / (kI * k0 * medium.sound_speed * medium.density);
      CHECK(std::abs(ratio - phi[i]) / std::abs(phi[i]) < 1e-6);
    }
  }
  // Point source on the surface: the field depends on the angle only, so
  // exchanging source and receiver directions leaves it unchanged.
  const Vec3 u = Vec3(0.2, 0.9, -0.1).normalized(), w = Vec3(-0.7, 0.1, 0.6).normalized();
  SphereSource s1, s2;
  s1.direction = u;
  s2.direction = w;
  const Complex p12 = analytic_sphere_response(s1, {1.2 * w}, k, 40, medium).pressure[0];
  const Complex p21 = analytic_sphere_response(s2, {1.2 * u}, k, 40, medium).pressure[0];
  CHECK(std::abs(p12 - p21) / std::abs(p12) < 1e-12);

  SphereSource src;
  CHECK_THROWS_AS(analytic_sphere_response(src, pts, k, 10, medium), NumericalError);
  CHECK_THROWS_AS(analytic_sphere_response(src, {Vec3(0.05, 0, 0)}, k, 40, medium), InvalidArgument);
}

TEST_CASE("bem on a rigid sphere matches the series oracle at 1 kHz") {
  const double half_angle = 15.0;
  const TriangleMesh m = sphere_fixture(3, 0.0875, half_angle, Vec3::UnitX(), -Vec3::UnitX());
  REQUIRE(m.faces.size() == 1280);
  AcousticConfig cfg;
  cfg.frequencies = {1000.0};
  const EvalGrid grid = EvalGrid::ring(5.0, 0.0, 1.2);
  const HrtfSet bem = synthesize_hrtf(m, cfg, grid);
  SphereOracleConfig oracle;
  oracle.patch_half_angle_deg = half_angle;
  oracle.left = Vec3::UnitX();
  oracle.right = -Vec3::UnitX();
  const HrtfSet series = analytic_sphere_hrtf(oracle, cfg, grid);
  for (Ear ear : {Ear::Left, Ear::Right}) {
    CHECK(max_db_error(bem, series, ear, 0) < 0.5);
    CHECK(max_phase_error_deg(bem, series, ear, 0) < 5.0);
  }
  CHECK(bem.failed_frequencies_hz.empty());
}

TEST_CASE("mirror symmetry and normalization of synthesized HRTFs") {
  const TriangleMesh m = sphere_fixture(2, 0.0875, 20.0);
  AcousticConfig cfg;
  cfg.frequencies = {1500.0};
  EvalGrid grid = EvalGrid::ring(30.0, 0.0, 1.2);
  grid.directions.push_back({45.0, 20.0});
  grid.directions.push_back({315.0, 20.0});
  const HrtfSet h = synthesize_hrtf(m, cfg, grid);
  // Left ear at azimuth az mirrors the right ear at -az.
  auto mirrored = [&](std::size_t d) {
    const Direction dir = grid.directions[d];
    for (std::size_t e = 0; e < grid.directions.size(); ++e) {
      const Direction o = grid.directions[e];
      if (std::abs(std::fmod(o.azimuth_deg + dir.azimuth_deg, 360.0)) < 1e-9 && o.elevation_deg == dir.elevation_deg)
        return e;
    }
    FAIL("no mirrored direction");
    return std::size_t{0};
  };
  for (std::size_t d = 0; d < grid.directions.size(); ++d) {
    const Complex l = h.at(d, Ear::Left, 0), r = h.at(mirrored(d), Ear::Right, 0);
    CHECK(std::abs(l - r) / std::abs(l) < 0.01);
  }

  // Scaling the source velocity leaves the normalized values unchanged.
  const double k = cfg.wavenumber(1500.0), omega = cfg.angular_frequency(1500.0);
  CMatrix v = CMatrix::Zero(static_cast<Eigen::Index>(m.faces.size()), 2);
  for (std::size_t f = 0; f < m.faces.size(); ++f)
    if (m.labels[f] == Region::LeftEar) v(static_cast<Eigen::Index>(f), 0) = 1.0, v(static_cast<Eigen::Index>(f), 1) = 3.0;
  BemSystem sys = assemble(m, k, cfg, v);
  const CMatrix dpdn = sys.normal_derivative;
  const CMatrix p = solve(std::move(sys)).solution;
  const CMatrix field = evaluate_field(m, p, dpdn, k, grid.points(), triangle_rule(7));
  const double q = source_volume_velocity(m, Region::LeftEar);
  for (Eigen::Index d = 0; d < field.rows(); ++d) {
    const Complex h1 = field(d, 0) / reference_pressure(k, omega, cfg.density, q, 1.2);
    const Complex h3 = field(d, 1) / reference_pressure(k, omega, cfg.density, 3.0 * q, 1.2);
    CHECK(std::abs(h1 - h3) <= 1e-12 * std::abs(h1));
    CHECK(std::abs(std::conj(h1) - h.at(static_cast<std::size_t>(d), Ear::Left, 0)) < 1e-12 * std::abs(h1));
  }

  // Doubling the patch area doubles Q; what remains of the change in H is
  // the cap shape, which the series oracle reproduces.
  AcousticConfig low = cfg;
  low.frequencies = {300.0};
  const double half2 = std::acos(1.0 - 2.0 * (1.0 - std::cos(20.0 * kPi / 180.0))) * 180.0 / kPi;
  const TriangleMesh small_mesh = sphere_fixture(3, 0.0875, 20.0), large_mesh = sphere_fixture(3, 0.0875, half2);
  CHECK(source_volume_velocity(large_mesh, Region::LeftEar) / source_volume_velocity(small_mesh, Region::LeftEar) ==
        doctest::Approx(2.0).epsilon(0.1));
  const HrtfSet small = synthesize_hrtf(small_mesh, low, grid);
  const HrtfSet large = synthesize_hrtf(large_mesh, low, grid);
  SphereOracleConfig oracle;
  oracle.patch_half_angle_deg = 20.0;
  const HrtfSet small_ref = analytic_sphere_hrtf(oracle, low, grid);
  oracle.patch_half_angle_deg = half2;
  const HrtfSet large_ref = analytic_sphere_hrtf(oracle, low, grid);
  for (std::size_t d = 0; d < grid.directions.size(); ++d) {
    const Complex bem_ratio = large.at(d, Ear::Left, 0) / small.at(d, Ear::Left, 0);
    const Complex ref_ratio = large_ref.at(d, Ear::Left, 0) / small_ref.at(d, Ear::Left, 0);
    CHECK(std::abs(bem_ratio - ref_ratio) < 0.005);
  }
}

TEST_CASE("synthesis preconditions") {
  AcousticConfig cfg;
  cfg.frequencies = {500.0};
  const EvalGrid grid = EvalGrid::ring(90.0, 0.0, 1.2);
  TriangleMesh m = sphere_fixture(1, 0.0875, 30.0);
  TriangleMesh no_ears = m;
  no_ears.labels.assign(m.faces.size(), Region::Skin);
  CHECK_THROWS_AS(synthesize_hrtf(no_ears, cfg, grid), InvalidArgument);
  CHECK_THROWS_AS(synthesize_hrtf(m, cfg, EvalGrid::ring(90.0, 0.0, 0.05)), InvalidArgument);
  AcousticConfig none = cfg;
  none.frequencies.clear();
  CHECK_THROWS_AS(synthesize_hrtf(m, none, grid), InvalidArgument);
}

TEST_CASE("impulse responses") {
  const int taps = 64;
  const double fs = 48000.0;
  HrtfSet s;
  s.directions = {{0.0, 0.0}, {90.0, 0.0}};
  for (int b = 1; b <= taps / 2; ++b) s.frequencies.push_back(b * fs / taps);
  s.resize_values();
  const double tau = 10.0 / fs;
  for (std::size_t f = 0; f < s.frequency_count(); ++f) {
    const double w = 2 * kPi * s.frequencies[f];
    s.at(0, Ear::Left, f) = 1.0;
    s.at(0, Ear::Right, f) = std::exp(-kI * (w * tau));
    s.at(1, Ear::Left, f) = 1.0;
    s.at(1, Ear::Right, f) = 1.0;
  }
  const HrtfSet h = hrtf_to_hrir(s, fs, taps);
  REQUIRE(h.has_hrir());
  for (int t = 0; t < taps; ++t) {
    CHECK(h.impulse(0, Ear::Left)[t] == doctest::Approx(t == taps / 4 ? 1.0 : 0.0).scale(1.0).epsilon(1e-12));
    CHECK(h.impulse(0, Ear::Right)[t] == doctest::Approx(t == taps / 4 + 10 ? 1.0 : 0.0).scale(1.0).epsilon(1e-12));
  }

  // Round trip through a forward DFT, random spectrum below Nyquist.
  HrtfSet r;
  r.directions = {{0.0, 0.0}};
  for (int b = 1; b <= 20; ++b) r.frequencies.push_back(b * fs / taps);
  r.resize_values();
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  for (Complex& v : r.values) v = Complex(n(rng), n(rng));
  const HrtfSet rh = hrtf_to_hrir(r, fs, taps);
  Eigen::FFT<double> fft;
  for (Ear ear : {Ear::Left, Ear::Right}) {
    std::vector<double> x(taps);
    for (int t = 0; t < taps; ++t) x[t] = rh.impulse(0, ear)[(t + taps / 4) % taps];
    std::vector<Complex> spec;
    fft.fwd(spec, x);
    for (std::size_t b = 1; b <= r.frequency_count(); ++b) CHECK(std::abs(spec[b] - r.at(0, ear, b - 1)) < 1e-9);
    for (int b = 21; b < taps / 2; ++b) CHECK(std::abs(spec[b]) < 1e-12);
  }

  HrtfSet gap = r;
  gap.frequencies[5] += 100.0;
  CHECK_THROWS_AS(hrtf_to_hrir(gap, fs, taps), InvalidArgument);
  CHECK_THROWS_AS(hrtf_to_hrir(r, 44100.0, taps), InvalidArgument);
}

TEST_CASE("hrtf-json round trip, layout and rejection") {
  CHECK(base64_encode("") == "");
  CHECK(base64_encode("f") == "Zg==");
  CHECK(base64_encode("fo") == "Zm8=");
  CHECK(base64_encode("foo") == "Zm9v");
  CHECK(base64_encode("foobar") == "Zm9vYmFy");
  CHECK(base64_decode("Zm9vYmE=") == "fooba");
  CHECK_THROWS_AS(base64_decode("Zm9"), ParseError);
  CHECK_THROWS_AS(base64_decode("Zm!v"), ParseError);

  HrtfSet s;
  s.directions = {{0.0, 0.0}, {35.0, -15.0}, {270.0, 30.0}};
  s.radius = 1.2;
  s.frequencies = {750.0, 1500.0, 2250.0, 3000.0};
  s.resize_values();
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  for (Complex& v : s.values) v = Complex(n(rng), n(rng));
  s.failed_frequencies_hz = {600.0};
  const HrtfSet with_ir = hrtf_to_hrir(s, 6000.0, 8);

  for (DataEncoding enc : {DataEncoding::Base64, DataEncoding::Inline}) {
    const std::string text = format_hrtf_json(with_ir, enc);
    const HrtfSet back = parse_hrtf_json(text);
    CHECK(back.directions == with_ir.directions);
    CHECK(back.frequencies == with_ir.frequencies);
    CHECK(back.values == with_ir.values);
    CHECK(back.hrir == with_ir.hrir);
    CHECK(back.taps == 8);
    CHECK(back.failed_frequencies_hz == with_ir.failed_frequencies_hz);
    CHECK(format_hrtf_json(back, enc) == text);
    // Header field order.
    const auto pos = [&](const char* key) { return text.find(std::string("\"") + key + "\""); };
    CHECK(pos("schema") < pos("frequencies_hz"));
    CHECK(pos("frequencies_hz") < pos("directions"));
    CHECK(pos("directions") < pos("ears"));
    CHECK(pos("ears") < pos("data"));
  }
  // Direction-major, ear-middle, frequency-minor: the third pair is
  // direction 0, left ear, frequency 2.
  const std::string inl = format_hrtf_json(s, DataEncoding::Inline);
  const auto doc_data = inl.substr(inl.find("\"data\""));
  const HrtfSet back = parse_hrtf_json(inl);
  CHECK(back.at(0, Ear::Left, 2) == s.values[2]);
  CHECK(back.at(1, Ear::Right, 3) == s.values[(1 * 2 + 1) * 4 + 3]);
  (void)doc_data;

  const std::string good = format_hrtf_json(s);
  std::string bad = good;
  bad.replace(bad.find("hrtf-json/1"), 11, "hrtf-json/9");
  CHECK_THROWS_AS(parse_hrtf_json(bad), ParseError);
  CHECK_THROWS_AS(parse_hrtf_json(good.substr(0, good.size() / 2)), ParseError);
  bad = good;
  bad.insert(1, "\"extra\":1,");
  CHECK_THROWS_AS(parse_hrtf_json(bad), ParseError);
  HrtfSet short_set = s;
  short_set.frequencies.pop_back();
  short_set.resize_values();
  std::string mismatched = format_hrtf_json(short_set);
  const std::string full_data = good.substr(good.find("\"data\""));
  mismatched = mismatched.substr(0, mismatched.find("\"data\"")) + full_data;
  CHECK_THROWS_AS(parse_hrtf_json(mismatched), ParseError);

  const auto dir = test_util::temp_dir("hrtf_json");
  save_hrtf(dir / "s.json", s);
  CHECK(load_hrtf(dir / "s.json").values == s.values);
}

TEST_CASE("evaluation grids") {
  const EvalGrid g = EvalGrid::default_grid();
  CHECK(g.directions.size() == 360);
  CHECK(g.radius == 1.2);
  CHECK((direction_vector({90.0, 0.0}) - Vec3::UnitY()).norm() < 1e-15);
  CHECK((direction_vector({0.0, 90.0}) - Vec3::UnitZ()).norm() < 1e-15);
  for (const Vec3& p : g.points()) CHECK(p.norm() == doctest::Approx(1.2));

  const EvalGrid ring = parse_eval_grid(R"({"radius": 1.5, "azimuth_step_deg": 10, "elevations_deg": [0, 20]})");
  CHECK(ring.directions.size() == 72);
  CHECK(ring.radius == 1.5);
  const EvalGrid listed = parse_eval_grid(R"({"radius": 2, "directions": [{"az": 10, "el": 5}]})");
  CHECK(listed.directions == std::vector<Direction>{{10.0, 5.0}});
  CHECK(parse_eval_grid("{}").directions.size() == 360);
  CHECK_THROWS_AS(parse_eval_grid(R"({"radius": 1, "radious": 2})"), ConfigError);
  CHECK_THROWS_AS(parse_eval_grid(R"({"directions": [{"az": 400, "el": 0}]})"), ConfigError);
  CHECK_THROWS_AS(parse_eval_grid(R"({"radius": -1})"), ConfigError);
}

}  // TEST_SUITE
