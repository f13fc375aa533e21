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

#include "hrtf_forge/nn/mlp.hpp"

#include <cmath>

#include "hrtf_forge/error.hpp"

namespace hforge::nn {

Mlp::Mlp(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw InvalidArgument("Mlp: need at least input and output dimensions");
  for (int d : dims_)
    if (d <= 0) throw InvalidArgument("Mlp: layer dimensions must be positive");
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    weights_.push_back(Matrix::Zero(dims_[l + 1], dims_[l]));
    biases_.push_back(Vector::Zero(dims_[l + 1]));
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
  return n;
}

void Mlp::init_glorot(std::mt19937_64& rng) {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Matrix& w = weights_[l];
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = limit * (2.0 * uniform01(rng) - 1.0);
    biases_[l].setZero();
  }
}

void Mlp::set_zero() {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    weights_[l].setZero();
    biases_[l].setZero();
  }
}

Matrix Mlp::forward(const Matrix& x, Cache* cache) const {
  if (x.cols() != input_dim()) throw InvalidArgument("Mlp::forward: input has wrong width");
  Matrix a = x;
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(a);
  }
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Matrix z = a * weights_[l].transpose();
    z.rowwise() += biases_[l].transpose();
    if (l + 1 < weights_.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
    if (cache) cache->activations.push_back(a);
  }
  return a;
}

Matrix Mlp::backward(const Cache& cache, const Matrix& d_out, Mlp& grad) const {
  Matrix delta = d_out;
  for (int l = layer_count() - 1; l >= 0; --l) {
    if (l + 1 < layer_count()) {
      // ReLU derivative from the stored post-activation (0 where z <= 0).
      const Matrix& post = cache.activations[l + 1];
      delta = (post.array() > 0.0).select(delta.array(), 0.0).matrix();
    }
    const Matrix& input = cache.activations[l];
    grad.weights_[l].noalias() += delta.transpose() * input;
    grad.biases_[l] += delta.colwise().sum().transpose();
    delta = delta * weights_[l];
  }
  return delta;
}

void Mlp::flatten_into(std::vector<double>& out) const {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const Matrix& w = weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) out.push_back(w(r, c));
    for (Eigen::Index r = 0; r < biases_[l].size(); ++r) out.push_back(biases_[l][r]);
  }
}

void Mlp::unflatten_from(const std::vector<double>& in, std::size_t& pos) {
  if (pos + parameter_count() > in.size()) throw InvalidArgument("Mlp: parameter vector too short");
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Matrix& w = weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = in[pos++];
    for (Eigen::Index r = 0; r < biases_[l].size(); ++r) biases_[l][r] = in[pos++];
  }
}

bool Mlp::all_finite() const {
  for (std::size_t l = 0; l < weights_.size(); ++l)
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
  return true;
}

}  // namespace hforge::nn
