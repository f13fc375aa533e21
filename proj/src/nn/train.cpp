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

#include "hrtf_forge/nn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include "hrtf_forge/correspondence.hpp"
#include "hrtf_forge/error.hpp"
#include "hrtf_forge/geometry.hpp"
#include "hrtf_forge/log.hpp"
#include "hrtf_forge/parallel.hpp"

namespace hforge::nn {

void TrainConfig::check(bool allow_zero_lr) const {
  if (!(learning_rate > 0.0) && !(allow_zero_lr && learning_rate == 0.0))
    throw ConfigError("train: learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("train: beta1 must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("train: beta2 must be in [0, 1)");
  if (!(eps_adam > 0.0)) throw ConfigError("train: eps_adam must be > 0");
  if (epochs < 0) throw ConfigError("train: epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (!(soft_hausdorff_temperature > 0.0)) throw ConfigError("train: temperature must be > 0");
  if (!(chamfer_weight >= 0.0) || !(hausdorff_weight >= 0.0))
    throw ConfigError("train: loss weights must be >= 0");
}

std::vector<int> assign_faces(const TriangleMesh& pred, const TriangleBVH& truth, double max_normal_angle_deg) {
  const std::vector<Projection> proj = project_vertices(pred, truth, max_normal_angle_deg);
  std::vector<int> faces(proj.size());
  for (std::size_t i = 0; i < proj.size(); ++i) faces[i] = proj[i].point.face;
  return faces;
}

LossResult loss(const TriangleMesh& pred, const TriangleMesh& truth, const std::vector<int>& faces,
                const TrainConfig& cfg) {
  const std::size_t n = pred.vertices.size();
  if (faces.size() != n) throw InvalidArgument("loss: one frozen face per predicted vertex required");
  LossResult out;
  out.gradient.assign(n, Vec3::Zero());
  if (n == 0) return out;

  std::vector<Vec3> diff(n);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int f = faces[i];
    if (f < 0 || static_cast<std::size_t>(f) >= truth.faces.size()) throw InvalidArgument("loss: bad face index");
    const auto tp = closest_point_on_triangle(pred.vertices[i], truth.corner(f, 0), truth.corner(f, 1),
                                              truth.corner(f, 2));
    diff[i] = pred.vertices[i] - tp.closest;
    d2[i] = diff[i].squaredNorm();
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  const double t = cfg.soft_hausdorff_temperature;
  double sum_d2 = 0.0;
  for (double v : d2) sum_d2 += v;
  // Stable log-mean-exp.
  const double q_max = *std::max_element(d2.begin(), d2.end()) / t;
  std::vector<double> w(n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) z += (w[i] = std::exp(d2[i] / t - q_max));
  const double lme = q_max + std::log(z * inv_n);

  out.value = cfg.chamfer_weight * sum_d2 * inv_n + cfg.hausdorff_weight * t * lme;
  for (std::size_t i = 0; i < n; ++i)
    out.gradient[i] = (2.0 * (cfg.chamfer_weight * inv_n + cfg.hausdorff_weight * w[i] / z)) * diff[i];
  return out;
}

LossResult loss(const TriangleMesh& pred, const TriangleBVH& truth, const TrainConfig& cfg) {
  std::vector<int> faces(pred.vertices.size());
  parallel_for(0, static_cast<std::ptrdiff_t>(faces.size()),
               [&](std::ptrdiff_t i) { faces[i] = truth.closest(pred.vertices[i]).face; });
  return loss(pred, truth.mesh(), faces, cfg);
}

TrainingPair make_pair(TriangleMesh coarse, const TriangleMesh& truth, double max_normal_angle_deg) {
  TrainingPair p;
  p.coarse = std::move(coarse);
  p.truth = std::make_shared<const TriangleBVH>(std::make_shared<const TriangleMesh>(truth));
  p.max_normal_angle_deg = max_normal_angle_deg;
  return p;
}

PairEvaluation evaluate_pair(const SubdivNetParams& params, const TrainingPair& pair, const TrainConfig& cfg) {
  if (!pair.truth) throw InvalidArgument("evaluate_pair: missing truth BVH");
  const ForwardResult fwd = forward(params, pair.coarse, params.levels);
  for (const Vec3& v : fwd.mesh.vertices)
    if (!v.allFinite()) return {std::numeric_limits<double>::quiet_NaN(), params.zeros_like()};
  const std::vector<int> faces = assign_faces(fwd.mesh, *pair.truth, pair.max_normal_angle_deg);
  const LossResult l = loss(fwd.mesh, pair.truth->mesh(), faces, cfg);
  PairEvaluation out;
  out.loss = l.value;
  out.gradient = backward(params, fwd, l.gradient);
  return out;
}

AdamState AdamState::for_params(const SubdivNetParams& params) {
  AdamState s;
  s.m.assign(params.parameter_count(), 0.0);
  s.v.assign(params.parameter_count(), 0.0);
  return s;
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               const TrainConfig& cfg) {
  const std::size_t n = params.size();
  if (grads.size() != n || state.m.size() != n || state.v.size() != n)
    throw InvalidArgument("adam_step: shape mismatch");
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < n; ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.eps_adam);
  }
}

void adam_step(SubdivNetParams& params, const SubdivNetParams& grads, AdamState& state, const TrainConfig& cfg) {
  std::vector<double> p = params.flatten();
  adam_step(p, grads.flatten(), state, cfg);
  params.unflatten(p);
}

TrainResult train(const std::vector<TrainingPair>& pairs, const SubdivNetParams& init, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.check(/*allow_zero_lr=*/true);
  init.check();
  if (pairs.empty()) throw InvalidArgument("train: at least one pair required");

  TrainResult result;
  result.params = init;
  AdamState state = AdamState::for_params(init);
  std::mt19937_64 rng(cfg.seed);
  const std::size_t n = pairs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto start = std::chrono::steady_clock::now();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);
    std::vector<double> losses(n, 0.0);

    for (std::size_t first = 0; first < n; first += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t count = std::min<std::size_t>(cfg.batch_size, n - first);
      std::vector<PairEvaluation> evals(count);
      parallel_for(0, static_cast<std::ptrdiff_t>(count), [&](std::ptrdiff_t k) {
        evals[k] = evaluate_pair(result.params, pairs[order[first + k]], cfg);
      });
      std::vector<double> grad(result.params.parameter_count(), 0.0);
      for (std::size_t k = 0; k < count; ++k) {
        const std::size_t pair = order[first + k];
        if (!std::isfinite(evals[k].loss))
          throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch) + " pair " +
                               std::to_string(pair));
        losses[pair] = evals[k].loss;
        const std::vector<double> g = evals[k].gradient.flatten();
        for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g[i];
      }
      for (double& g : grad) g /= static_cast<double>(count);
      std::vector<double> p = result.params.flatten();
      adam_step(p, grad, state, cfg);
      result.params.unflatten(p);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    for (double l : losses) rec.mean_loss += l;
    rec.mean_loss /= static_cast<double>(n);
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.history.push_back(rec);
    char fields[96];
    std::snprintf(fields, sizeof fields, "epoch=%d mean_loss=%.9g", epoch, rec.mean_loss);
    log::write(log::Level::Debug, "train", "epoch", fields);
    if (on_epoch) on_epoch(rec, result.params);
  }
  return result;
}

std::string format_training_log(const std::vector<EpochRecord>& history) {
  std::string out = "epoch,mean_loss,wall_seconds\n";
  char line[96];
  for (const EpochRecord& r : history) {
    std::snprintf(line, sizeof line, "%d,%.17g,%.6f\n", r.epoch, r.mean_loss, r.wall_seconds);
    out += line;
  }
  return out;
}

}  // namespace hforge::nn
