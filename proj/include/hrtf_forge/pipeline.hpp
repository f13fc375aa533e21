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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hrtf_forge/hrtf.hpp"
#include "hrtf_forge/mesh_io.hpp"
#include "hrtf_forge/metrics.hpp"
#include "hrtf_forge/nn/train.hpp"
#include "hrtf_forge/prep.hpp"

// Configuration documents, dataset manifests and the subcommands of the
// hrtf-forge command-line tool.
namespace hforge::pipeline {

struct IoSection {
  double unit_scale = kDefaultStlUnitScale;  // STL units to meters
  std::string reference_mesh;                // optional ICP target for prep
};

struct PrepSection {
  CutPlane cut_plane;
  EarMarkers ear_markers;
  GradingParams grading;
  bool grade = true;
  double weld_tol = kDefaultWeldTolerance;
  double area_eps = kDefaultAreaEpsilon;
  int icp_max_iters = 100;
  double icp_eps = 1e-12;
};

struct ModelSection {
  int feature_dim = 32;
  std::vector<int> hidden{32, 32};
  int levels = 2;
  double max_normal_angle_deg = 60.0;
  nn::TrainConfig train;  // seed comes from the top-level seed
};

struct BemSection {
  bem::AcousticConfig acoustic;  // chief_seed comes from the top-level seed
  EvalGrid grid = EvalGrid::default_grid();
  SphereOracleConfig sphere;
  int sphere_level = 3;          // fixture used by `solve --sphere-fixture`
  double hrir_sample_rate = 0.0;  // 0: no impulse responses
  int hrir_taps = 0;
  DataEncoding encoding = DataEncoding::Base64;
};

struct MetricsSection {
  metrics::CompareConfig compare;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  IoSection io;
  std::optional<PrepSection> prep;
  std::optional<ModelSection> model;
  std::optional<BemSection> bem;
  std::optional<MetricsSection> metrics;
};

/// Strict parse: unknown keys and wrong types throw ConfigError naming the
/// key path (e.g. "prep.ear_markers.radius").
PipelineConfig parse_config(std::string_view json_text);
PipelineConfig load_config(const std::filesystem::path& path);

enum class Split { Train, Val, Test };

struct ManifestEntry {
  std::string id;
  std::filesystem::path low_res_mesh;
  std::optional<std::filesystem::path> high_res_mesh;
  std::optional<std::filesystem::path> measured_hrtf;
  Split split = Split::Train;
};

struct DatasetManifest {
  std::vector<ManifestEntry> subjects;
};

/// {"subjects": [{"id", "low_res_mesh_path", "high_res_mesh_path"?,
/// "measured_hrtf_path"?, "split": "train"|"val"|"test"}]}. Relative paths
/// resolve against base_dir. Ids must be unique and files must exist
/// (ConfigError otherwise).
DatasetManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir);
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // validation or convergence failure
inline constexpr int kExitUsage = 2;    // usage, config or parse error

/// Runs the tool. args[0] is the program name. Human-readable results go
/// to `out`; log lines go to standard error.
int run_cli(const std::vector<std::string>& args, std::ostream& out);

}  // namespace hforge::pipeline
