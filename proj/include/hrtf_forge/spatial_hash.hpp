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

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "hrtf_forge/mesh.hpp"

namespace hforge {

/// Uniform grid of point ids. visit_near() reports every id inserted within
/// one cell size of the query (and possibly a few more), in a fixed order.
class SpatialHash {
 public:
  explicit SpatialHash(double cell) : inv_cell_(1.0 / cell) {}

  void insert(const Vec3& p, int id) { cells_[key(cell_of(p))].push_back(id); }

  template <typename Fn>
  void visit_near(const Vec3& p, Fn&& fn) const {
    const Eigen::Vector3i c = cell_of(p);
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = cells_.find(key(c + Eigen::Vector3i(dx, dy, dz)));
          if (it == cells_.end()) continue;
          for (int id : it->second) fn(id);
        }
  }

 private:
  Eigen::Vector3i cell_of(const Vec3& p) const {
    return Eigen::Vector3i(static_cast<int>(std::floor(p.x() * inv_cell_)),
                           static_cast<int>(std::floor(p.y() * inv_cell_)),
                           static_cast<int>(std::floor(p.z() * inv_cell_)));
  }
  static std::uint64_t key(const Eigen::Vector3i& c) {
    const auto u = [](int v) { return static_cast<std::uint64_t>(static_cast<std::uint32_t>(v) & 0x1FFFFFu); };
    return (u(c.x()) << 42) | (u(c.y()) << 21) | u(c.z());
  }

  double inv_cell_;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace hforge
