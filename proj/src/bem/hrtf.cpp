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

#include "hrtf_forge/hrtf.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "hrtf_forge/error.hpp"
#include "hrtf_forge/geometry.hpp"
#include "hrtf_forge/log.hpp"

namespace hforge {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void store_normalized(HrtfSet& set, std::size_t f, Ear ear, const std::vector<Complex>& pressure, Complex p_ref) {
  for (std::size_t d = 0; d < set.directions.size(); ++d) set.at(d, ear, f) = std::conj(pressure[d] / p_ref);
}

}  // namespace

Vec3 direction_vector(const Direction& d) {
  const double az = d.azimuth_deg * kDeg, el = d.elevation_deg * kDeg;
  return Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
}

EvalGrid EvalGrid::default_grid() {
  EvalGrid g;
  for (double el : {-30.0, -15.0, 0.0, 15.0, 30.0})
    for (int a = 0; a < 72; ++a) g.directions.push_back({5.0 * a, el});
  return g;
}

EvalGrid EvalGrid::ring(double step_deg, double elevation_deg, double radius) {
  if (!(step_deg > 0.0)) throw InvalidArgument("EvalGrid::ring: step must be > 0");
  EvalGrid g;
  g.radius = radius;
  for (int a = 0; a * step_deg < 360.0 - 1e-9; ++a) g.directions.push_back({a * step_deg, elevation_deg});
  return g;
}

void EvalGrid::check() const {
  if (directions.empty()) throw ConfigError("eval grid: no directions");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("eval grid: radius must be > 0");
  for (const Direction& d : directions) {
    if (!(d.azimuth_deg >= 0.0 && d.azimuth_deg < 360.0)) throw ConfigError("eval grid: azimuth outside [0, 360)");
    if (!(d.elevation_deg >= -90.0 && d.elevation_deg <= 90.0))
      throw ConfigError("eval grid: elevation outside [-90, 90]");
  }
}

std::vector<Vec3> EvalGrid::points() const {
  std::vector<Vec3> out;
  out.reserve(directions.size());
  for (const Direction& d : directions) out.push_back(radius * direction_vector(d));
  return out;
}

void HrtfSet::resize_values() { values.assign(directions.size() * 2 * frequencies.size(), Complex(0.0, 0.0)); }

void HrtfSet::check() const {
  if (values.size() != directions.size() * 2 * frequencies.size())
    throw InvalidArgument("HrtfSet: value count does not match directions x 2 x frequencies");
  for (std::size_t i = 1; i < frequencies.size(); ++i)
    if (!(frequencies[i] > frequencies[i - 1])) throw InvalidArgument("HrtfSet: frequencies not ascending");
  for (const Complex& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InvalidArgument("HrtfSet: non-finite value");
  if (taps < 0) throw InvalidArgument("HrtfSet: negative tap count");
  if (taps > 0) {
    if (!(sample_rate > 0.0)) throw InvalidArgument("HrtfSet: impulse responses need a sample rate");
    if (hrir.size() != directions.size() * 2 * static_cast<std::size_t>(taps))
      throw InvalidArgument("HrtfSet: impulse response size mismatch");
  }
}

HrtfSet synthesize_hrtf(const TriangleMesh& mesh, const bem::AcousticConfig& cfg, const EvalGrid& grid) {
  cfg.check();
  grid.check();
  if (cfg.frequencies.empty()) throw InvalidArgument("synthesize_hrtf: no frequencies");
  if (!mesh.has_labels()) throw InvalidArgument("synthesize_hrtf: mesh has no region labels");
  const double q_left = bem::source_volume_velocity(mesh, Region::LeftEar);
  const double q_right = bem::source_volume_velocity(mesh, Region::RightEar);
  if (q_left <= 0.0 || q_right <= 0.0) throw InvalidArgument("synthesize_hrtf: both ears need labeled faces");
  double extent = 0.0;
  for (const Vec3& v : mesh.vertices) extent = std::max(extent, v.norm());
  if (!(grid.radius > extent)) throw InvalidArgument("synthesize_hrtf: grid radius inside the mesh extent");

  HrtfSet set;
  set.directions = grid.directions;
  set.radius = grid.radius;
  const std::vector<Vec3> points = grid.points();
  const bem::TriangleRule& rule = bem::triangle_rule(cfg.quadrature_order);

  std::vector<double> solved;
  std::vector<std::vector<Complex>> rows;  // per solved frequency: D x 2
  for (double f : cfg.frequencies) {
    const auto t0 = std::chrono::steady_clock::now();
    const double k = cfg.wavenumber(f), omega = cfg.angular_frequency(f);
    try {
      bem::BemSystem sys = bem::assemble(mesh, k, cfg, std::vector<Region>{Region::LeftEar, Region::RightEar});
      const bem::SolveResult sol = bem::least_squares(std::move(sys.matrix), sys.rhs);
      const bem::CMatrix field = bem::evaluate_field(mesh, sol.solution, sys.normal_derivative, k, points, rule);
      std::vector<Complex> row(points.size() * 2);
      const Complex ref_l = bem::reference_pressure(k, omega, cfg.density, q_left, grid.radius);
      const Complex ref_r = bem::reference_pressure(k, omega, cfg.density, q_right, grid.radius);
      for (std::size_t d = 0; d < points.size(); ++d) {
        row[2 * d] = std::conj(field(static_cast<Eigen::Index>(d), 0) / ref_l);
        row[2 * d + 1] = std::conj(field(static_cast<Eigen::Index>(d), 1) / ref_r);
      }
      solved.push_back(f);
      rows.push_back(std::move(row));
      char fields[160];
      std::snprintf(fields, sizeof fields, "f_hz=%g residual_left=%.3e residual_right=%.3e seconds=%.2f", f,
                    sol.relative_residual[0], sol.relative_residual[1],
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      log::info("bem", "frequency solved", fields);
    } catch (const NumericalError& e) {
      set.failed_frequencies_hz.push_back(f);
      log::warn("bem", e.what(), "f_hz=" + std::to_string(f));
    }
  }
  if (solved.empty()) throw NumericalError("synthesize_hrtf: every frequency failed");

  set.frequencies = solved;
  set.resize_values();
  for (std::size_t fi = 0; fi < solved.size(); ++fi)
    for (std::size_t d = 0; d < points.size(); ++d) {
      set.at(d, Ear::Left, fi) = rows[fi][2 * d];
      set.at(d, Ear::Right, fi) = rows[fi][2 * d + 1];
    }
  return set;
}

HrtfSet analytic_sphere_hrtf(const SphereOracleConfig& sphere, const bem::AcousticConfig& cfg, const EvalGrid& grid) {
  cfg.check();
  grid.check();
  if (!(sphere.patch_half_angle_deg > 0.0 && sphere.patch_half_angle_deg < 90.0))
    throw InvalidArgument("sphere oracle: patch half-angle must lie in (0, 90) deg");
  if (!(grid.radius > sphere.radius)) throw InvalidArgument("sphere oracle: grid radius inside the sphere");

  HrtfSet set;
  set.directions = grid.directions;
  set.radius = grid.radius;
  set.frequencies = cfg.frequencies;
  set.resize_values();
  const std::vector<Vec3> points = grid.points();
  const double a = sphere.radius;
  const double cap_area = 2.0 * std::numbers::pi * a * a * (1.0 - std::cos(sphere.patch_half_angle_deg * kDeg));

  for (std::size_t fi = 0; fi < cfg.frequencies.size(); ++fi) {
    const double f = cfg.frequencies[fi];
    const double k = cfg.wavenumber(f), omega = cfg.angular_frequency(f);
    const int terms = sphere.terms > 0 ? sphere.terms : static_cast<int>(std::ceil(k * a)) + 30;
    const Complex ref = bem::reference_pressure(k, omega, cfg.density, cap_area, grid.radius);
    for (Ear ear : {Ear::Left, Ear::Right}) {
      bem::SphereSource src;
      src.radius = a;
      src.direction = ear == Ear::Left ? sphere.left : sphere.right;
      src.cap_area = cap_area;
      const bem::SeriesResult r = bem::analytic_sphere_response(src, points, k, terms, cfg);
      store_normalized(set, fi, ear, r.pressure, ref);
    }
  }
  return set;
}

HrtfSet hrtf_to_hrir(const HrtfSet& set, double sample_rate, int taps) {
  set.check();
  if (!(sample_rate > 0.0)) throw InvalidArgument("hrtf_to_hrir: sample rate must be > 0");
  if (taps < 4 || taps % 2 != 0) throw InvalidArgument("hrtf_to_hrir: taps must be even and >= 4");
  const std::size_t bins = set.frequencies.size();
  const double df = sample_rate / taps;
  if (bins == 0 || bins > static_cast<std::size_t>(taps / 2))
    throw InvalidArgument("hrtf_to_hrir: frequency count must lie in [1, taps / 2]");
  for (std::size_t i = 0; i < bins; ++i)
    if (std::abs(set.frequencies[i] - (i + 1) * df) > 1e-6 * df)
      throw InvalidArgument("hrtf_to_hrir: frequencies must be the uniform grid df, 2 df, ... with df = fs / taps");

  HrtfSet out = set;
  out.sample_rate = sample_rate;
  out.taps = taps;
  out.hrir.assign(set.directions.size() * 2 * static_cast<std::size_t>(taps), 0.0);
  const std::size_t n = static_cast<std::size_t>(taps), half = n / 2, shift = n / 4;
  Eigen::FFT<double> fft;
  std::vector<Complex> spectrum(n), time(n);
  for (std::size_t d = 0; d < set.directions.size(); ++d)
    for (Ear ear : {Ear::Left, Ear::Right}) {
      std::fill(spectrum.begin(), spectrum.end(), Complex(0.0, 0.0));
      spectrum[0] = std::abs(set.at(d, ear, 0));
      for (std::size_t b = 1; b <= bins; ++b) {
        const Complex h = set.at(d, ear, b - 1);
        if (b == half) {
          spectrum[b] = h.real();
        } else {
          spectrum[b] = h;
          spectrum[n - b] = std::conj(h);
        }
      }
      fft.inv(time, spectrum);
      double* dst = out.hrir.data() + (d * 2 + static_cast<std::size_t>(ear)) * n;
      for (std::size_t t = 0; t < n; ++t) dst[(t + shift) % n] = time[t].real();
    }
  return out;
}

}  // namespace hforge
