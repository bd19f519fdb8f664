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

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sessrank/error.hpp"
#include "sessrank/neural/model.hpp"

namespace sessrank::neural {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam update of one parameter block; `step` is the 1-based
// update count.
inline void adam_update(std::span<double> params, std::span<const double> grads,
                        std::span<double> m, std::span<double> v,
                        std::int64_t step, double lr, const AdamConfig& cfg = {}) {
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    if (!std::isfinite(g)) throw divergence_error("diverged");
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

struct AdamState {
  ModelParameters m;
  ModelParameters v;
  std::int64_t step = 0;

  AdamState() = default;
  explicit AdamState(const ModelShape& shape) : m(shape), v(shape) {}
};

// One optimizer step over every tensor. With lazy_embedding only embedding
// rows present in the gradient are updated; otherwise untouched rows get a
// zero gradient like any dense parameter.
inline void adam_step(ModelParameters& params, const Gradients& grads,
                      AdamState& state, double lr, bool lazy_embedding = false,
                      const AdamConfig& cfg = {}) {
  if (!grads.all_finite()) throw divergence_error("diverged");
  ++state.step;
  const auto E = params.shape.embedding_size;

  if (lazy_embedding) {
    for (const auto& [token, row] : grads.embedding_rows) {
      const auto r = static_cast<std::size_t>(token);
      adam_update(params.embedding.row(r), row, state.m.embedding.row(r),
                  state.v.embedding.row(r), state.step, lr, cfg);
    }
  } else {
    const std::vector<double> zero(E, 0.0);
    for (std::size_t r = 0; r < params.embedding.rows; ++r) {
      const auto it = grads.embedding_rows.find(static_cast<int>(r));
      const std::span<const double> g =
          it == grads.embedding_rows.end() ? std::span<const double>(zero)
                                           : std::span<const double>(it->second);
      adam_update(params.embedding.row(r), g, state.m.embedding.row(r),
                  state.v.embedding.row(r), state.step, lr, cfg);
    }
  }

  // Walk params, moments and gradients in lockstep, skipping the embedding.
  std::vector<Tensor*> p_list, m_list, v_list;
  std::vector<const Tensor*> g_list;
  params.for_each([&](std::string_view, Tensor& t) { p_list.push_back(&t); });
  state.m.for_each([&](std::string_view, Tensor& t) { m_list.push_back(&t); });
  state.v.for_each([&](std::string_view, Tensor& t) { v_list.push_back(&t); });
  grads.dense.for_each(
      [&](std::string_view, const Tensor& t) { g_list.push_back(&t); });
  for (std::size_t i = 1; i < p_list.size(); ++i) {
    adam_update(p_list[i]->data, g_list[i]->data, m_list[i]->data,
                v_list[i]->data, state.step, lr, cfg);
  }
}

}  // namespace sessrank::neural
