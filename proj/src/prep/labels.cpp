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

#include "hrtf_forge/error.hpp"
#include "hrtf_forge/prep.hpp"

namespace hforge {

TriangleMesh label_regions(const TriangleMesh& mesh, const EarMarkers& markers) {
  if (!(markers.radius > 0.0)) throw InvalidArgument("label_regions: marker radius must be positive");
  if (markers.left == markers.right) throw InvalidArgument("label_regions: left and right markers coincide");
  if (!markers.left.allFinite() || !markers.right.allFinite())
    throw InvalidArgument("label_regions: marker coordinates must be finite");

  TriangleMesh out = mesh;
  out.labels.assign(mesh.faces.size(), Region::Skin);
  std::size_t left = 0, right = 0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Vec3 c = face_centroid(mesh, f);
    const double dl = (c - markers.left).norm();
    const double dr = (c - markers.right).norm();
    const bool in_l = dl <= markers.radius, in_r = dr <= markers.radius;
    if (in_l && (!in_r || dl <= dr)) {
      out.labels[f] = Region::LeftEar;
      ++left;
    } else if (in_r) {
      out.labels[f] = Region::RightEar;
      ++right;
    }
  }
  if (left == 0) throw MeshError("label_regions: no face centroid within radius of the left marker");
  if (right == 0) throw MeshError("label_regions: no face centroid within radius of the right marker");
  return out;
}

}  // namespace hforge
