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
#include <random>
#include <vector>

#include <Eigen/Core>

namespace hforge::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Fully connected network: ReLU on hidden layers, identity on the output.
/// Samples are rows: Y = act(X W^T + b^T).
class Mlp {
 public:
  Mlp() = default;
  /// dims = {in, hidden..., out}; all parameters zero.
  explicit Mlp(std::vector<int> dims);

  const std::vector<int>& dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  int layer_count() const { return static_cast<int>(weights_.size()); }
  std::size_t parameter_count() const;

  Matrix& weight(int layer) { return weights_[layer]; }  // out x in
  const Matrix& weight(int layer) const { return weights_[layer]; }
  Vector& bias(int layer) { return biases_[layer]; }
  const Vector& bias(int layer) const { return biases_[layer]; }

  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  void init_glorot(std::mt19937_64& rng);
  void set_zero();

  /// Activations of every layer, kept for backward().
  struct Cache {
    std::vector<Matrix> activations;  // [0] = input, back() = output
  };
  Matrix forward(const Matrix& x, Cache* cache = nullptr) const;

  /// Accumulates parameter gradients into `grad` (same shape) and returns
  /// dL/dX.
  Matrix backward(const Cache& cache, const Matrix& d_out, Mlp& grad) const;

  /// Parameters in layer order, each layer as W row-major then b.
  void flatten_into(std::vector<double>& out) const;
  /// Reads parameter_count() values starting at `pos`; advances `pos`.
  void unflatten_from(const std::vector<double>& in, std::size_t& pos);

  bool all_finite() const;

 private:
  std::vector<int> dims_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
};

/// Uniform double in [0, 1) from the top 53 bits (stable across standard
/// libraries, unlike std::uniform_real_distribution).
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace hforge::nn
