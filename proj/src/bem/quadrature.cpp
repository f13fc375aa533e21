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
#include <string>

#include "hrtf_forge/bem.hpp"
#include "hrtf_forge/error.hpp"

namespace hforge::bem {

namespace {

// Orbit helpers for symmetric rules.
void add_centroid(TriangleRule& r, double w) {
  r.barycentric.emplace_back(1.0 / 3, 1.0 / 3, 1.0 / 3);
  r.weights.push_back(w);
}

void add_orbit3(TriangleRule& r, double a, double b, double w) {  // (a, b, b)
  r.barycentric.emplace_back(a, b, b);
  r.barycentric.emplace_back(b, a, b);
  r.barycentric.emplace_back(b, b, a);
  for (int i = 0; i < 3; ++i) r.weights.push_back(w);
}

void add_orbit6(TriangleRule& r, double a, double b, double c, double w) {
  for (const Vec3& p : {Vec3(a, b, c), Vec3(a, c, b), Vec3(b, a, c), Vec3(b, c, a), Vec3(c, a, b), Vec3(c, b, a)}) {
    r.barycentric.push_back(p);
    r.weights.push_back(w);
  }
}

TriangleRule make_rule(int points) {
  TriangleRule r;
  switch (points) {
    case 1:
      add_centroid(r, 1.0);
      break;
    case 3:
      add_orbit3(r, 2.0 / 3, 1.0 / 6, 1.0 / 3);
      break;
    case 6:
      add_orbit3(r, 0.108103018168070, 0.445948490915965, 0.223381589678011);
      add_orbit3(r, 0.816847572980459, 0.091576213509771, 0.109951743655322);
      break;
    case 7:
      add_centroid(r, 0.225);
      add_orbit3(r, 0.059715871789770, 0.470142064105115, 0.132394152788506);
      add_orbit3(r, 0.797426985353087, 0.101286507323456, 0.125939180544827);
      break;
    case 12:
      add_orbit3(r, 0.501426509658179, 0.249286745170910, 0.116786275726379);
      add_orbit3(r, 0.873821971016996, 0.063089014491502, 0.050844906370207);
      add_orbit6(r, 0.053145049844817, 0.310352451033784, 0.636502499121399, 0.082851075618374);
      break;
    default:
      break;
  }
  return r;
}

}  // namespace

const TriangleRule& triangle_rule(int points) {
  static const TriangleRule r1 = make_rule(1), r3 = make_rule(3), r6 = make_rule(6), r7 = make_rule(7),
                            r12 = make_rule(12);
  switch (points) {
    case 1: return r1;
    case 3: return r3;
    case 6: return r6;
    case 7: return r7;
    case 12: return r12;
  }
  throw InvalidArgument("triangle_rule: unsupported point count " + std::to_string(points) +
                        " (use 1, 3, 6, 7 or 12)");
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw InvalidArgument("gauss_legendre: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // P_n(x) and P_n'(x) by the three-term recurrence.
  auto legendre = [n](double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, p, dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace hforge::bem
