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

#include <Eigen/SVD>

#include "hrtf_forge/bvh.hpp"
#include "hrtf_forge/error.hpp"
#include "hrtf_forge/log.hpp"
#include "hrtf_forge/parallel.hpp"
#include "hrtf_forge/prep.hpp"

namespace hforge {

RigidTransform kabsch(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
  if (from.size() != to.size() || from.empty()) throw InvalidArgument("kabsch: point sets must match and be non-empty");
  const double n = static_cast<double>(from.size());
  Vec3 mu_from = Vec3::Zero(), mu_to = Vec3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    mu_from += from[i];
    mu_to += to[i];
  }
  mu_from /= n;
  mu_to /= n;
  Mat3 cov = Mat3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) cov += (from[i] - mu_from) * (to[i] - mu_to).transpose();

  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 u = svd.matrixU(), v = svd.matrixV();
  Mat3 fix = Mat3::Identity();
  fix(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  RigidTransform t;
  t.rotation = v * fix * u.transpose();
  t.translation = mu_to - t.rotation * mu_from;
  return t;
}

IcpResult icp_align(const TriangleMesh& source, const TriangleMesh& target, int max_iters, double convergence_eps) {
  if (source.vertices.empty() || target.empty()) throw InvalidArgument("icp_align: meshes must be non-empty");
  const TriangleBVH bvh(target);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(source.vertices.size());
  std::vector<Vec3> matches(n);
  std::vector<double> sq(n);

  auto match = [&](const RigidTransform& t) {
    parallel_for(0, n, [&](std::ptrdiff_t i) {
      const ClosestHit hit = bvh.closest(t.apply(source.vertices[i]));
      matches[i] = hit.point;
      sq[i] = hit.distance * hit.distance;
    });
    double sum = 0.0;
    for (double s : sq) sum += s;
    return std::sqrt(sum / static_cast<double>(n));
  };

  IcpResult best;
  RigidTransform current;
  double prev = match(current);
  best.rms = prev;
  if (prev == 0.0) {
    best.converged = true;
    return best;
  }
  int worse = 0;
  for (int it = 1; it <= max_iters; ++it) {
    current = kabsch(source.vertices, matches);
    const double next = match(current);
    best.iterations = it;
    if (next < best.rms) {
      best.rms = next;
      best.transform = current;
    }
    if (next > prev) {
      if (++worse >= 3) {
        best.stalled = true;
        log::warn("icp", "rms did not improve for 3 iterations; returning best transform",
                  "rms=" + std::to_string(best.rms));
        break;
      }
    } else {
      worse = 0;
      if (prev - next < convergence_eps) {
        best.converged = true;
        break;
      }
    }
    prev = next;
  }
  return best;
}

}  // namespace hforge
