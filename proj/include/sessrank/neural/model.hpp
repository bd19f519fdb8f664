/*
 * Copyright 2026 The sessrank Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string_view>
#include <vector>

#include "sessrank/error.hpp"
#include "sessrank/neural/tensor.hpp"

namespace sessrank::neural {

struct HyperParams {
  std::size_t embedding_size = 64;
  std::size_t hidden_size = 64;
  std::size_t batch_size = 64;
  std::size_t epochs = 10;
  double learning_rate = 0.001;
  std::array<std::size_t, 2> mlp_layer_sizes{64, 32};
  std::size_t max_history_len = 50;
  std::uint64_t seed = 1;

  std::size_t min_count = 1;  // vocabulary cut-off
  double init_stddev = 0.01;
  double grad_clip_norm = 5.0;  // <= 0 disables clipping
  // Adam touches only the embedding rows present in the batch gradient.
  bool lazy_embedding_updates = false;

  bool operator==(const HyperParams&) const = default;
};

// Sizes that fix every tensor of the model. Metadata is enabled when
// n_properties > 0, context when n_devices + n_platforms > 0.
struct ModelShape {
  std::size_t vocab_size = 0;
  std::size_t embedding_size = 0;
  std::size_t hidden_size = 0;
  std::size_t n_properties = 0;
  std::size_t meta_size = 0;
  std::size_t n_devices = 0;
  std::size_t n_platforms = 0;
  std::size_t mlp1 = 0;
  std::size_t mlp2 = 0;

  bool has_metadata() const { return n_properties > 0; }
  bool has_context() const { return n_devices + n_platforms > 0; }
  std::size_t input_size() const {
    return embedding_size + (has_metadata() ? meta_size : 0);
  }
  std::size_t context_size() const { return n_devices + n_platforms; }
  std::size_t head_size() const {
    return hidden_size + (has_context() ? mlp2 : 0);
  }

  bool operator==(const ModelShape&) const = default;
};

struct ModelParameters {
  ModelShape shape;
  Tensor embedding;   // V x E
  Tensor meta_proj;   // E_meta x P
  Tensor w_z, u_z, b_z;
  Tensor w_r, u_r, b_r;
  Tensor w_h, u_h, b_h;
  Tensor mlp_w1, mlp_b1;  // m1 x (devices + platforms)
  Tensor mlp_w2, mlp_b2;  // m2 x m1
  Tensor w_out;           // 1 x head
  Tensor b_out;           // 1 x 1

  ModelParameters() = default;

  explicit ModelParameters(const ModelShape& s, bool with_embedding = true)
      : shape(s) {
    const auto in = s.input_size();
    const auto h = s.hidden_size;
    if (with_embedding) embedding = Tensor(s.vocab_size, s.embedding_size);
    if (s.has_metadata()) meta_proj = Tensor(s.meta_size, s.n_properties);
    w_z = Tensor(h, in), u_z = Tensor(h, h), b_z = Tensor(h, 1);
    w_r = Tensor(h, in), u_r = Tensor(h, h), b_r = Tensor(h, 1);
    w_h = Tensor(h, in), u_h = Tensor(h, h), b_h = Tensor(h, 1);
    if (s.has_context()) {
      mlp_w1 = Tensor(s.mlp1, s.context_size()), mlp_b1 = Tensor(s.mlp1, 1);
      mlp_w2 = Tensor(s.mlp2, s.mlp1), mlp_b2 = Tensor(s.mlp2, 1);
    }
    w_out = Tensor(1, s.head_size());
    b_out = Tensor(1, 1);
  }

  // Visits every tensor in the fixed checkpoint order, disabled ones
  // included (they are empty).
  template <typename Self, typename F>
  static void visit(Self& self, F&& f) {
    f("embedding", self.embedding);
    f("meta_proj", self.meta_proj);
    f("w_z", self.w_z), f("u_z", self.u_z), f("b_z", self.b_z);
    f("w_r", self.w_r), f("u_r", self.u_r), f("b_r", self.b_r);
    f("w_h", self.w_h), f("u_h", self.u_h), f("b_h", self.b_h);
    f("mlp_w1", self.mlp_w1), f("mlp_b1", self.mlp_b1);
    f("mlp_w2", self.mlp_w2), f("mlp_b2", self.mlp_b2);
    f("w_out", self.w_out), f("b_out", self.b_out);
  }
  template <typename F>
  void for_each(F&& f) {
    visit(*this, f);
  }
  template <typename F>
  void for_each(F&& f) const {
    visit(*this, f);
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for_each([&](std::string_view, const Tensor& t) { n += t.size(); });
    return n;
  }

  bool all_finite() const {
    bool ok = true;
    for_each([&](std::string_view, const Tensor& t) {
      for (double v : t.data) ok = ok && std::isfinite(v);
    });
    return ok;
  }

  bool operator==(const ModelParameters&) const = default;
};

// i.i.d. Gaussian(0, stddev) over every tensor, biases included.
inline ModelParameters init_parameters(const ModelShape& shape, double stddev,
                                       std::uint64_t seed) {
  ModelParameters p(shape);
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, stddev);
  p.for_each([&](std::string_view, Tensor& t) {
    for (double& v : t.data) v = normal(engine);
  });
  return p;
}

// Gradient of the loss. Embedding rows are kept sparse; every other tensor is
// dense and shaped like its parameter (dense.embedding stays empty).
struct Gradients {
  std::map<int, std::vector<double>> embedding_rows;
  ModelParameters dense;

  Gradients() = default;
  explicit Gradients(const ModelShape& shape) : dense(shape, false) {}

  std::span<double> embedding_row(int token) {
    auto& row = embedding_rows[token];
    if (row.empty()) row.assign(dense.shape.embedding_size, 0.0);
    return row;
  }

  double squared_norm() const {
    double sum = 0.0;
    for (const auto& [token, row] : embedding_rows) {
      for (double v : row) sum += v * v;
    }
    dense.for_each([&](std::string_view, const Tensor& t) {
      for (double v : t.data) sum += v * v;
    });
    return sum;
  }

  void scale(double factor) {
    for (auto& [token, row] : embedding_rows) {
      for (double& v : row) v *= factor;
    }
    dense.for_each([&](std::string_view, Tensor& t) {
      for (double& v : t.data) v *= factor;
    });
  }

  bool all_finite() const {
    bool ok = dense.all_finite();
    for (const auto& [token, row] : embedding_rows) {
      for (double v : row) ok = ok && std::isfinite(v);
    }
    return ok;
  }
};

}  // namespace sessrank::neural
