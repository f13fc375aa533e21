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

// Rigid sphere radiating from a vibrating cap (or a point source on the
// surface). Radial velocity v(theta) = sum_n v_n P_n(cos theta) and
// p = sum_n i omega rho v_n h_n(kr) / (k h_n'(ka)) P_n(cos theta).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "hrtf_forge/bem.hpp"
#include "hrtf_forge/error.hpp"

namespace hforge::bem {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}


constexpr Complex kI(0.0, 1.0);

void legendre(int n, double mu, std::vector<double>& p) {
  p.assign(n + 2, 0.0);
  p[0] = 1.0;
  if (n + 1 >= 1) p[1] = mu;
  for (int l = 1; l + 1 < static_cast<int>(p.size()); ++l) p[l + 1] = ((2 * l + 1) * mu * p[l] - l * p[l - 1]) / (l + 1);
}

// Modal surface velocities v_0..v_{terms-1}.
std::vector<double> modal_velocity(const SphereSource& src, int terms) {
  const double a = src.radius;
  std::vector<double> v(terms);
  if (src.cap_area <= 0.0) {
    for (int n = 0; n < terms; ++n) v[n] = (2 * n + 1) * src.velocity / (4.0 * std::numbers::pi * a * a);
    return v;
  }
  if (src.cap_area >= 4.0 * std::numbers::pi * a * a) throw InvalidArgument("sphere source: cap larger than sphere");
  const double mu = 1.0 - src.cap_area / (2.0 * std::numbers::pi * a * a);  // cos of the cap half-angle
  std::vector<double> p;
  legendre(terms, mu, p);
  v[0] = 0.5 * src.velocity * (1.0 - mu);
  for (int n = 1; n < terms; ++n) v[n] = 0.5 * src.velocity * (p[n - 1] - p[n + 1]);
  return v;
}

void check_source(const SphereSource& src, const std::vector<Vec3>& points) {
  if (!(src.radius > 0.0)) throw InvalidArgument("sphere source: radius must be > 0");
  if (src.direction.norm() == 0.0) throw InvalidArgument("sphere source: zero direction");
  for (const Vec3& x : points)
    if (x.norm() <= src.radius) throw InvalidArgument("sphere series: field point not outside the sphere");
}

}  // namespace

void spherical_hankel(int n, double x, std::vector<Complex>& h, std::vector<Complex>& dh) {
  if (!(x > 0.0)) throw InvalidArgument("spherical_hankel: argument must be > 0");
  h.assign(n + 2, 0.0);
  dh.assign(n + 1, 0.0);
  const Complex e = std::exp(kI * x);
  h[0] = -kI * e / x;
  h[1] = -e * (x + kI) / (x * x);
  for (int l = 1; l <= n; ++l) h[l + 1] = (2.0 * l + 1.0) / x * h[l] - h[l - 1];
  dh[0] = -h[1];
  for (int l = 1; l <= n; ++l) dh[l] = h[l - 1] - (l + 1.0) / x * h[l];
  h.resize(n + 1);
}

SeriesResult analytic_sphere_response(const SphereSource& source, const std::vector<Vec3>& points, double k,
                                      int terms, const AcousticConfig& medium) {
  check_source(source, points);
  if (!(k > 0.0)) throw InvalidArgument("sphere series: k must be > 0");
  const double a = source.radius;
  if (terms < 2) throw InvalidArgument("sphere series: need at least 2 terms");

  const std::vector<double> v = modal_velocity(source, terms);
  std::vector<Complex> ha, dha;
  spherical_hankel(terms - 1, k * a, ha, dha);
  const double omega = k * medium.sound_speed;
  std::vector<Complex> transfer(terms), coef(terms);
  for (int n = 0; n < terms; ++n) {
    transfer[n] = kI * omega * medium.density / (k * dha[n]);
    coef[n] = transfer[n] * v[n];
  }

  // Envelope of |v_n| (the cap coefficients oscillate through zero, which
  // would spoil a ratio test on the raw terms).
  auto envelope = [&](int n) {
    return source.cap_area > 0.0 ? std::abs(source.velocity) : std::abs(v[n]);
  };

  const Vec3 dir = source.direction.normalized();
  SeriesResult out;
  out.terms = terms;
  out.pressure.resize(points.size());
  std::vector<double> tails(points.size());
  std::vector<Complex> hr, dhr;
  std::vector<double> pl;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double r = points[i].norm();
    spherical_hankel(terms - 1, k * r, hr, dhr);
    legendre(terms, points[i].dot(dir) / r, pl);
    Complex sum = 0.0;
    for (int n = 0; n < terms; ++n) sum += coef[n] * hr[n] * pl[n];
    out.pressure[i] = sum;

    // Geometric tail from the last two envelope terms (|P_n| <= 1).
    auto term = [&](int n) { return std::abs(transfer[n] * hr[n]) * envelope(n); };
    const double last = term(terms - 1), prev = term(terms - 2);
    const double ratio = prev > 0.0 ? last / prev : 0.0;
    tails[i] = ratio < 1.0 ? last * ratio / (1.0 - ratio) : std::numeric_limits<double>::infinity();
  }
  // Relative to each value, floored at 1e-6 of the largest so nodal points
  // do not dominate.
  double largest = 0.0;
  for (const Complex& p : out.pressure) largest = std::max(largest, std::abs(p));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double scale = std::max(std::abs(out.pressure[i]), 1e-6 * largest);
    out.tail_bound = std::max(out.tail_bound, scale > 0.0 ? tails[i] / scale : tails[i]);
  }
  if (terms < k * a + 20.0)
    throw NumericalError("sphere series: " + std::to_string(terms) + " terms is below ka + 20 = " +
                         std::to_string(k * a + 20.0) + " (tail bound " + sci(out.tail_bound) + ")");
  if (!(out.tail_bound <= 1e-8))
    throw NumericalError("sphere series: truncation tail " + sci(out.tail_bound) +
                         " exceeds 1e-8; increase the number of terms");
  return out;
}

std::vector<double> static_sphere_potential(const SphereSource& source, const std::vector<Vec3>& points,
                                            int terms) {
  check_source(source, points);
  const double a = source.radius;
  const std::vector<double> v = modal_velocity(source, terms);
  const Vec3 dir = source.direction.normalized();
  std::vector<double> out(points.size());
  std::vector<double> pl;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double r = points[i].norm();
    legendre(terms, points[i].dot(dir) / r, pl);
    double sum = 0.0, ratio = a * a / r;  // a^{n+2} / r^{n+1}
    for (int n = 0; n < terms; ++n) {
      sum -= v[n] * ratio / (n + 1.0) * pl[n];
      ratio *= a / r;
    }
    out[i] = sum;
  }
  return out;
}

}  // namespace hforge::bem
