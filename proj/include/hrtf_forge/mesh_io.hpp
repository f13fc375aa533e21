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

#include <filesystem>
#include <string>

#include "hrtf_forge/mesh.hpp"

namespace hforge {

/// STL files carry no unit; scans are conventionally exported in millimeters.
inline constexpr double kDefaultStlUnitScale = 0.001;

/// Reads binary or ASCII STL. Facet corners with identical coordinates are
/// welded; coordinates are multiplied by unit_scale. Facets that collapse
/// after welding are dropped. Throws ParseError (with byte offset) on
/// malformed input and MeshError when no facet survives.
TriangleMesh load_stl(const std::filesystem::path& path, double unit_scale = kDefaultStlUnitScale);
TriangleMesh parse_stl(const std::string& bytes, double unit_scale = kDefaultStlUnitScale);

/// Writes binary STL with coordinates divided by unit_scale.
void save_stl(const TriangleMesh& mesh, const std::filesystem::path& path,
              double unit_scale = kDefaultStlUnitScale);
std::string format_stl(const TriangleMesh& mesh, double unit_scale = kDefaultStlUnitScale);

/// Wavefront OBJ in meters. Polygons are fan-triangulated; `g skin`,
/// `g left_ear` and `g right_ear` set face labels. Throws ParseError with a
/// line number on malformed records.
TriangleMesh load_obj(const std::filesystem::path& path);
TriangleMesh parse_obj(const std::string& text);

/// Writes vertices then faces; a `g` line is emitted whenever the label
/// changes, so face order is preserved.
void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path);
std::string format_obj(const TriangleMesh& mesh);

/// Dispatches on extension (.stl / .obj, case-insensitive).
TriangleMesh load_mesh(const std::filesystem::path& path, double stl_unit_scale = kDefaultStlUnitScale);
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path,
               double stl_unit_scale = kDefaultStlUnitScale);

/// Whole file as bytes. Throws Error when unreadable.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

/// Shortest decimal text that round-trips the value.
std::string format_double(double v);

}  // namespace hforge
