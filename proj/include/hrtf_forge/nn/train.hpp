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
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hrtf_forge/bvh.hpp"
#include "hrtf_forge/nn/subdiv_net.hpp"

namespace hforge::nn {

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_adam = 1e-8;
  int epochs = 100;
  int batch_size = 1;
  std::uint64_t seed = 0;
  double soft_hausdorff_temperature = 1e-4;  // m^2
  double chamfer_weight = 1.0;
  double hausdorff_weight = 0.1;

  /// Throws ConfigError on out-of-range values. allow_zero_lr admits a
  /// frozen reference run (used by train()).
  void check(bool allow_zero_lr = false) const;
};

struct LossResult {
  double value = 0.0;
  std::vector<Vec3> gradient;  // per predicted vertex
};

/// Frozen closest face on the truth surface for every predicted vertex,
/// normal-gated with unconstrained fallback.
std::vector<int> assign_faces(const TriangleMesh& pred, const TriangleBVH& truth, double max_normal_angle_deg);

/// cw * mean(d^2) + hw * T * log(mean(exp(d^2 / T))), with d the distance of
/// each predicted vertex to its frozen truth face.
LossResult loss(const TriangleMesh& pred, const TriangleMesh& truth, const std::vector<int>& faces,
                const TrainConfig& cfg);
/// Same with each vertex's unconstrained closest face.
LossResult loss(const TriangleMesh& pred, const TriangleBVH& truth, const TrainConfig& cfg);

struct TrainingPair {
  TriangleMesh coarse;
  std::shared_ptr<const TriangleBVH> truth;
  double max_normal_angle_deg = 60.0;
};

TrainingPair make_pair(TriangleMesh coarse, const TriangleMesh& truth, double max_normal_angle_deg = 60.0);

struct PairEvaluation {
  double loss = 0.0;
  SubdivNetParams gradient;
};

/// Loss and parameter gradients of one pair (forward, face assignment,
/// loss, backward).
PairEvaluation evaluate_pair(const SubdivNetParams& params, const TrainingPair& pair, const TrainConfig& cfg);

struct AdamState {
  std::vector<double> m, v;
  std::int64_t step = 0;
  static AdamState for_params(const SubdivNetParams& params);
};

/// Bias-corrected Adam on the flattened parameter vector.
void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               const TrainConfig& cfg);
void adam_step(SubdivNetParams& params, const SubdivNetParams& grads, AdamState& state, const TrainConfig& cfg);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double wall_seconds = 0.0;
};

struct TrainResult {
  SubdivNetParams params;
  std::vector<EpochRecord> history;
};

using EpochCallback = std::function<void(const EpochRecord&, const SubdivNetParams&)>;

/// Seeded shuffle per epoch, per-batch mean gradients, one Adam step per
/// batch. The reported epoch loss is the mean over pairs of the loss before
/// each pair's update. Throws NumericalError naming epoch and pair on
/// non-finite loss.
TrainResult train(const std::vector<TrainingPair>& pairs, const SubdivNetParams& init, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

/// CSV with header epoch,mean_loss,wall_seconds.
std::string format_training_log(const std::vector<EpochRecord>& history);

/// Binary model container:
///   "NSUBDIV1" | u32 feature_dim | u32 levels | u32 mlp_count (3)
///   per MLP: u32 layer_count+1, then that many u32 dims
///   f64 parameters: init_net, vertex_net, edge_net; per layer W row-major, b
/// All integers and floats little-endian.
std::string serialize_model(const SubdivNetParams& params);
SubdivNetParams parse_model(const std::string& bytes);
void save_model(const std::filesystem::path& path, const SubdivNetParams& params);
SubdivNetParams load_model(const std::filesystem::path& path);

}  // namespace hforge::nn
