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

#include "hrtf_forge/bem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/QR>

#include "hrtf_forge/bvh.hpp"
#include "hrtf_forge/distance.hpp"
#include "hrtf_forge/error.hpp"
#include "hrtf_forge/log.hpp"
#include "hrtf_forge/parallel.hpp"
#include "hrtf_forge/shapes.hpp"
#include "hrtf_forge/topology.hpp"

namespace hforge::bem {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr Complex kI(0.0, 1.0);

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Recursive element integration. Splits into four while x is within two
// diameters of the (sub)triangle centroid.
void integrate_triangle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& n, double k, const Vec3& x,
                        const TriangleRule& rule, int depth, ElementIntegrals& out) {
  const Vec3 centroid = (a + b + c) / 3.0;
  const double diam = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
  if (depth < 5 && (x - centroid).norm() < 2.0 * diam) {
    const Vec3 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
    integrate_triangle(a, ab, ca, n, k, x, rule, depth + 1, out);
    integrate_triangle(ab, b, bc, n, k, x, rule, depth + 1, out);
    integrate_triangle(ca, bc, c, n, k, x, rule, depth + 1, out);
    integrate_triangle(ab, bc, ca, n, k, x, rule, depth + 1, out);
    return;
  }
  const double area = 0.5 * (b - a).cross(c - a).norm();
  for (std::size_t q = 0; q < rule.weights.size(); ++q) {
    const Vec3& w = rule.barycentric[q];
    const Vec3 y = w[0] * a + w[1] * b + w[2] * c;
    const Vec3 d = y - x;
    const double r = d.norm();
    if (r < 1e-12) throw InvalidArgument("element integral: evaluation point on a quadrature node");
    // G and dG/dn_y share one exponential.
    const Complex g = std::exp(kI * (k * r)) * (rule.weights[q] * area / (kFourPi * r));
    out.single_layer += g;
    out.double_layer += g * (kI * k * r - 1.0) * (d.dot(n) / (r * r));
  }
}

void check_closed_outward(const TriangleMesh& mesh, const char* who) {
  const ValidationReport r = validate(mesh);
  if (!r.is_manifold || !r.is_watertight) throw MeshError(std::string(who) + ": mesh must be a watertight manifold");
  if (signed_volume(mesh) <= 0.0) throw MeshError(std::string(who) + ": mesh must be oriented outward");
}

}  // namespace

void AcousticConfig::check() const {
  if (!(sound_speed > 0.0)) throw ConfigError("acoustic: sound_speed must be > 0");
  if (!(density > 0.0)) throw ConfigError("acoustic: density must be > 0");
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    if (!(frequencies[i] > 0.0) || !std::isfinite(frequencies[i]))
      throw ConfigError("acoustic: frequencies must be positive and finite");
    if (i > 0 && !(frequencies[i] > frequencies[i - 1]))
      throw ConfigError("acoustic: frequencies must be strictly ascending");
  }
  if (chief_point_count < 4) throw ConfigError("acoustic: chief_point_count must be >= 4");
  try {
    triangle_rule(quadrature_order);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("acoustic: ") + e.what());
  }
}

double AcousticConfig::wavenumber(double f) const { return 2.0 * std::numbers::pi * f / sound_speed; }
double AcousticConfig::angular_frequency(double f) const { return 2.0 * std::numbers::pi * f; }

std::vector<double> AcousticConfig::default_frequencies() {
  std::vector<double> f;
  for (int i = 1; i <= 160; ++i) f.push_back(100.0 * i);
  return f;
}

Complex green(double k, const Vec3& x, const Vec3& y) {
  const double r = (x - y).norm();
  if (r < 1e-12) throw InvalidArgument("green: coincident points (use the singular integration path)");
  return std::exp(kI * (k * r)) / (kFourPi * r);
}

Complex green_dn(double k, const Vec3& x, const Vec3& y, const Vec3& n_y) {
  const Vec3 d = y - x;
  const double r = d.norm();
  if (r < 1e-12) throw InvalidArgument("green_dn: coincident points (use the singular integration path)");
  // dG/dr * dr/dn_y with dr/dn_y = (y - x).n_y / r.
  const Complex dg_dr = std::exp(kI * (k * r)) * (kI * k * r - 1.0) / (kFourPi * r * r);
  return dg_dr * (d.dot(n_y) / r);
}

Complex singular_single_layer(double k, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& x,
                              int angular_points) {
  std::vector<double> nodes, weights;
  gauss_legendre(angular_points, nodes, weights);
  // int_0^R exp(ikr) dr / (4 pi), written to stay accurate for small kR.
  auto radial = [k](double r_max) -> Complex {
    if (k == 0.0) return r_max / kFourPi;
    const double s = std::sin(0.5 * k * r_max);
    return Complex(std::sin(k * r_max), 2.0 * s * s) / (k * kFourPi);
  };
  Complex total = 0.0;
  const std::array<Vec3, 3> v{a, b, c};
  for (int e = 0; e < 3; ++e) {
    const Vec3& p = v[e];
    const Vec3& q = v[(e + 1) % 3];
    const Vec3 along = (q - p).normalized();
    const Vec3 foot = p + along * (x - p).dot(along);
    const double h = (foot - x).norm();
    if (h < 1e-14) continue;  // x on this edge: zero-area sub-triangle
    const Vec3 perp = (foot - x) / h;
    const double phi0 = std::atan2((p - x).dot(along), (p - x).dot(perp));
    const double phi1 = std::atan2((q - x).dot(along), (q - x).dot(perp));
    const double half = 0.5 * (phi1 - phi0), mid = 0.5 * (phi1 + phi0);
    Complex sub = 0.0;
    for (int i = 0; i < angular_points; ++i) {
      const double phi = mid + half * nodes[i];
      sub += weights[i] * radial(h / std::cos(phi));
    }
    total += sub * half;
  }
  return total;
}

ElementIntegrals element_integrals(const TriangleMesh& mesh, std::size_t f, double k, const Vec3& x,
                                   const TriangleRule& rule) {
  ElementIntegrals out{0.0, 0.0};
  integrate_triangle(mesh.corner(f, 0), mesh.corner(f, 1), mesh.corner(f, 2), face_normal(mesh, f), k, x, rule, 0,
                     out);
  return out;
}

std::vector<Vec3> chief_points(const TriangleMesh& mesh, int count, std::uint64_t seed) {
  if (count < 0) throw InvalidArgument("chief_points: negative count");
  const Aabb box = bounding_box(mesh);
  const TriangleBVH bvh(mesh);
  std::mt19937_64 rng(seed);
  auto draw = [&] {
    return Vec3(box.lo.x() + uniform01(rng) * (box.hi.x() - box.lo.x()),
                box.lo.y() + uniform01(rng) * (box.hi.y() - box.lo.y()),
                box.lo.z() + uniform01(rng) * (box.hi.z() - box.lo.z()));
  };

  // Inradius estimate: deepest of a batch of interior samples.
  double inradius = 0.0;
  for (int i = 0, inside = 0; i < 2000 && inside < 200; ++i) {
    const Vec3 p = draw();
    if (!is_inside(mesh, p)) continue;
    ++inside;
    inradius = std::max(inradius, bvh.closest(p).distance);
  }
  if (inradius <= 0.0) throw MeshError("chief_points: no interior found (open or inverted mesh?)");

  std::vector<Vec3> points;
  for (int i = 0; i < count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      const Vec3 p = draw();
      if (is_inside(mesh, p) && bvh.closest(p).distance >= 0.2 * inradius) {
        points.push_back(p);
        placed = true;
      }
    }
    if (!placed) throw MeshError("chief_points: no interior point found after 100 draws");
  }
  return points;
}

BemSystem assemble(const TriangleMesh& mesh, double k, const AcousticConfig& cfg, const CMatrix& normal_velocity) {
  cfg.check();
  check_closed_outward(mesh, "assemble");
  const Eigen::Index n = static_cast<Eigen::Index>(mesh.faces.size());
  if (normal_velocity.rows() != n) throw InvalidArgument("assemble: one velocity row per face required");
  const TriangleRule& rule = triangle_rule(cfg.quadrature_order);
  const double omega = k * cfg.sound_speed;

  if (k > 0.0) {
    const double lambda = 2.0 * std::numbers::pi / k;
    const double longest = max_edge_length(mesh);
    if (longest > lambda / 6.0) {
      char fields[128];
      std::snprintf(fields, sizeof fields, "max_edge_m=%.6g lambda_over_6_m=%.6g", longest, lambda / 6.0);
      log::warn("bem", "max edge exceeds lambda/6", fields);
    }
  }

  BemSystem sys;
  sys.surface_rows = static_cast<int>(n);
  sys.chief = chief_points(mesh, cfg.chief_point_count, cfg.chief_seed);
  const Eigen::Index rows = n + static_cast<Eigen::Index>(sys.chief.size());
  sys.normal_derivative = (kI * omega * cfg.density) * normal_velocity;
  sys.matrix.resize(rows, n);
  sys.rhs = CMatrix::Zero(rows, normal_velocity.cols());

  std::vector<Vec3> centroids(n);
  for (Eigen::Index j = 0; j < n; ++j) centroids[j] = face_centroid(mesh, j);

  parallel_for(0, rows, [&](std::ptrdiff_t i) {
    const bool surface = i < n;
    const Vec3 x = surface ? centroids[i] : sys.chief[i - n];
    for (Eigen::Index j = 0; j < n; ++j) {
      Complex single;
      if (surface && j == i) {
        // Flat element: the double layer vanishes on itself.
        single = singular_single_layer(k, mesh.corner(j, 0), mesh.corner(j, 1), mesh.corner(j, 2), x);
        sys.matrix(i, j) = 0.5;
      } else {
        const ElementIntegrals e = element_integrals(mesh, j, k, x, rule);
        single = e.single_layer;
        sys.matrix(i, j) = -e.double_layer;
      }
      for (Eigen::Index s = 0; s < sys.rhs.cols(); ++s) sys.rhs(i, s) -= single * sys.normal_derivative(j, s);
    }
  });
  return sys;
}

BemSystem assemble(const TriangleMesh& mesh, double k, const AcousticConfig& cfg,
                   const std::vector<Region>& sources) {
  if (!mesh.has_labels()) throw InvalidArgument("assemble: mesh has no region labels");
  CMatrix v = CMatrix::Zero(static_cast<Eigen::Index>(mesh.faces.size()), static_cast<Eigen::Index>(sources.size()));
  for (std::size_t s = 0; s < sources.size(); ++s) {
    int hits = 0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f)
      if (mesh.labels[f] == sources[s]) v(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(s)) = 1.0, ++hits;
    if (hits == 0)
      throw InvalidArgument("assemble: no faces labeled " + std::string(region_name(sources[s])));
  }
  return assemble(mesh, k, cfg, v);
}

SolveResult least_squares(CMatrix&& a, const CMatrix& b) {
  if (a.rows() < a.cols()) throw InvalidArgument("least_squares: system is underdetermined");
  if (b.rows() != a.rows()) throw InvalidArgument("least_squares: rhs row count mismatch");
  const Eigen::Index n = a.cols();
  Eigen::HouseholderQR<Eigen::Ref<CMatrix>> qr(a);
  const Eigen::VectorXd diag = qr.matrixQR().diagonal().cwiseAbs();
  if (n > 0 && !(diag.minCoeff() >= 1e-12 * diag.maxCoeff()))
    throw NumericalError("least_squares: matrix is numerically rank deficient");

  SolveResult out;
  out.solution = qr.solve(b);
  const CMatrix qtb = qr.householderQ().adjoint() * b;
  for (Eigen::Index s = 0; s < b.cols(); ++s) {
    const double bn = b.col(s).norm();
    const double rel = bn > 0.0 ? qtb.col(s).tail(a.rows() - n).norm() / bn : 0.0;
    out.relative_residual.push_back(rel);
    if (!out.solution.col(s).allFinite()) throw NumericalError("least_squares: non-finite solution");
    char fields[64];
    std::snprintf(fields, sizeof fields, "relative_residual=%.3e", rel);
    if (rel > 1e-2) throw NumericalError(std::string("least_squares: residual too large, ") + fields);
    if (rel > 1e-6) log::warn("bem", "least-squares residual above 1e-6", fields);
  }
  return out;
}

SolveResult solve(BemSystem&& system) { return least_squares(std::move(system.matrix), system.rhs); }

CMatrix evaluate_field(const TriangleMesh& mesh, const CMatrix& surface_pressure, const CMatrix& normal_derivative,
                       double k, const std::vector<Vec3>& points, const TriangleRule& rule) {
  const Eigen::Index n = static_cast<Eigen::Index>(mesh.faces.size());
  if (surface_pressure.rows() != n || normal_derivative.rows() != n ||
      surface_pressure.cols() != normal_derivative.cols())
    throw InvalidArgument("evaluate_field: surface data shape mismatch");
  for (std::size_t i = 0; i < points.size(); ++i)
    if (is_inside(mesh, points[i]))
      throw InvalidArgument("evaluate_field: point " + std::to_string(i) + " is inside the body");

  CMatrix field = CMatrix::Zero(static_cast<Eigen::Index>(points.size()), surface_pressure.cols());
  parallel_for(0, static_cast<std::ptrdiff_t>(points.size()), [&](std::ptrdiff_t i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const ElementIntegrals e = element_integrals(mesh, j, k, points[i], rule);
      for (Eigen::Index s = 0; s < field.cols(); ++s)
        field(i, s) += e.double_layer * surface_pressure(j, s) - e.single_layer * normal_derivative(j, s);
    }
  });
  return field;
}

double source_volume_velocity(const TriangleMesh& mesh, Region region) {
  double q = 0.0;
  for (std::size_t f = 0; f < mesh.labels.size(); ++f)
    if (mesh.labels[f] == region) q += face_area(mesh, f);
  return q;
}

Complex reference_pressure(double k, double omega, double density, double q, double r) {
  return -kI * omega * density * q * std::exp(kI * (k * r)) / (kFourPi * r);
}

TriangleMesh sphere_fixture(int level, double radius, double patch_half_angle_deg, const Vec3& left_dir,
                            const Vec3& right_dir) {
  TriangleMesh m = shapes::icosphere(level, radius);
  m.labels.assign(m.faces.size(), Region::Skin);
  const double cos_max = std::cos(patch_half_angle_deg * std::numbers::pi / 180.0);
  const Vec3 l = left_dir.normalized(), r = right_dir.normalized();
  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    const Vec3 d = face_centroid(m, f).normalized();
    if (d.dot(l) >= cos_max)
      m.labels[f] = Region::LeftEar;
    else if (d.dot(r) >= cos_max)
      m.labels[f] = Region::RightEar;
  }
  return m;
}

}  // namespace hforge::bem
