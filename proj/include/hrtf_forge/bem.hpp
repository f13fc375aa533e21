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

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "hrtf_forge/mesh.hpp"

// Exterior Helmholtz boundary elements.
//
// Time convention inside this module is exp(-i omega t): outgoing waves are
// exp(+ikr) and the Euler equation gives dp/dn = i omega rho v_n, with n the
// outward body normal. Transfer functions leaving the module (HrtfSet) use
// the signal-processing convention instead; see hrtf.hpp.
namespace hforge::bem {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct AcousticConfig {
  double sound_speed = 343.0;  // m/s
  double density = 1.1839;     // kg/m^3
  std::vector<double> frequencies;  // Hz, ascending
  int quadrature_order = 7;         // points of the symmetric triangle rule
  int chief_point_count = 16;
  std::uint64_t chief_seed = 0;

  /// Throws ConfigError.
  void check() const;
  double wavenumber(double f) const;
  double angular_frequency(double f) const;
  /// 100 Hz to 16 kHz in 100 Hz steps.
  static std::vector<double> default_frequencies();
};

// --- quadrature --------------------------------------------------------------

struct TriangleRule {
  std::vector<Vec3> barycentric;
  std::vector<double> weights;  // sum to 1 (multiply by the area)
};

/// Symmetric Gauss rule with the given point count (1, 3, 6, 7 or 12;
/// exact to degree 1, 2, 4, 5, 6). Throws InvalidArgument otherwise.
const TriangleRule& triangle_rule(int points);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// --- kernel ------------------------------------------------------------------

/// exp(ikr) / (4 pi r), r = |x - y|. Throws InvalidArgument for r < 1e-12.
Complex green(double k, const Vec3& x, const Vec3& y);
/// Derivative of green() with respect to y along the unit normal n_y.
Complex green_dn(double k, const Vec3& x, const Vec3& y, const Vec3& n_y);

/// Integral of green(k, x, .) over triangle (a, b, c) with x inside it:
/// three sub-triangles about x, polar coordinates, radial part exact.
Complex singular_single_layer(double k, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& x,
                              int angular_points = 24);

/// Regular integrals of green and green_dn over face `f` seen from x,
/// with recursive 4-way splitting while x is closer than two element
/// diameters.
struct ElementIntegrals {
  Complex single_layer;  // int G dS
  Complex double_layer;  // int dG/dn_y dS
};
ElementIntegrals element_integrals(const TriangleMesh& mesh, std::size_t f, double k, const Vec3& x,
                                   const TriangleRule& rule);

// --- system ------------------------------------------------------------------

/// `count` points inside a closed mesh, each at least 20% of the estimated
/// inradius from the surface. Seeded and deterministic. Throws MeshError
/// after 100 failed draws for one point.
std::vector<Vec3> chief_points(const TriangleMesh& mesh, int count, std::uint64_t seed);

struct BemSystem {
  CMatrix matrix;  // (N + chief) x N
  CMatrix rhs;     // (N + chief) x sources
  CMatrix normal_derivative;  // N x sources, i omega rho v_n per face
  int surface_rows = 0;
  std::vector<Vec3> chief;
};

/// Collocation system for prescribed normal velocities (N x sources, m/s).
BemSystem assemble(const TriangleMesh& mesh, double k, const AcousticConfig& cfg, const CMatrix& normal_velocity);
/// One source column per region: v_n = 1 m/s on the region's faces.
BemSystem assemble(const TriangleMesh& mesh, double k, const AcousticConfig& cfg,
                   const std::vector<Region>& sources);

struct SolveResult {
  CMatrix solution;  // N x sources
  std::vector<double> relative_residual;
};

/// Least-squares solve by Householder QR. Throws NumericalError when R is
/// numerically rank deficient or a relative residual exceeds 1e-2; warns
/// above 1e-6. Consumes the matrix.
SolveResult least_squares(CMatrix&& a, const CMatrix& b);
SolveResult solve(BemSystem&& system);

/// Pressure at exterior points from surface pressure and normal derivative
/// (columns = sources). Throws InvalidArgument for points inside the body.
CMatrix evaluate_field(const TriangleMesh& mesh, const CMatrix& surface_pressure, const CMatrix& normal_derivative,
                       double k, const std::vector<Vec3>& points, const TriangleRule& rule);

/// Volume velocity Q = sum of areas of faces with `region` (v_n = 1).
double source_volume_velocity(const TriangleMesh& mesh, Region region);

/// Free-field pressure of a point source of volume velocity q at distance
/// r: -i omega rho q exp(ikr) / (4 pi r).
Complex reference_pressure(double k, double omega, double density, double q, double r);

// --- analytic oracle -----------------------------------------------------------

/// Rigid sphere centred at the origin with a vibrating spherical cap.
struct SphereSource {
  double radius = 0.0875;
  Vec3 direction = Vec3::UnitX();  // cap centre direction
  double cap_area = 0.0;           // m^2; 0 selects a point source
  double velocity = 1.0;           // m/s on the cap (point source: volume velocity, m^3/s)
};

struct SeriesResult {
  std::vector<Complex> pressure;
  double tail_bound = 0.0;  // worst relative tail estimate over points
  int terms = 0;
};

/// Spherical-harmonic series for the radiated pressure at exterior points.
/// Throws NumericalError when terms < ka + 20 or the estimated tail exceeds
/// 1e-8 of a value (floored at 1e-6 of the largest value).
SeriesResult analytic_sphere_response(const SphereSource& source, const std::vector<Vec3>& points, double k,
                                      int terms, const AcousticConfig& medium);

/// Velocity potential of the incompressible (k -> 0) flow from the same
/// source; the pressure tends to i omega rho times this.
std::vector<double> static_sphere_potential(const SphereSource& source, const std::vector<Vec3>& points,
                                            int terms);

/// Spherical Hankel functions of the first kind h_0..h_n(x) and derivatives.
void spherical_hankel(int n, double x, std::vector<Complex>& h, std::vector<Complex>& dh);

/// Icosphere of `level` and `radius` with the faces whose centroids lie
/// within `patch_half_angle_deg` of left_dir / right_dir labeled as ears.
TriangleMesh sphere_fixture(int level, double radius, double patch_half_angle_deg,
                            const Vec3& left_dir = Vec3::UnitY(), const Vec3& right_dir = -Vec3::UnitY());

}  // namespace hforge::bem
