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

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sessrank/error.hpp"
#include "sessrank/neural/features.hpp"
#include "sessrank/neural/model.hpp"
#include "sessrank/neural/tensor.hpp"

// Many-to-one GRU scorer. The history of a clickout is run once; each
// candidate is one extra GRU step from the final history state, followed by
// an optional context MLP and a logistic output unit:
//
//   z  = sigmoid(W_z x + U_z h + b_z)
//   r  = sigmoid(W_r x + U_r h + b_r)
//   h~ = tanh(W_h x + U_h (r * h) + b_h)
//   h' = (1 - z) * h + z * h~
//   y  = sigmoid(w_out . [h_T ; mlp(device, platform)] + b_out)
//
// The step input x is the token embedding, concatenated with a linear
// projection of the item's property multi-hot when metadata is enabled.

namespace sessrank::neural {

inline constexpr double kProbabilityClamp = 1e-12;

struct StepCache {
  int token = Vocabulary::kUnk;
  std::vector<int> properties;
  std::vector<double> x, z, r, rh, hh, h;
};

// U_z h + b_z and U_r h + b_r for one state h, shared by every step that
// starts from h.
struct RecurrentTerms {
  std::vector<double> z, r;
};

struct ContextCache {
  ContextIndex index;
  std::vector<double> a1_pre, a1, a2_pre, a2;
};

namespace detail {

inline void check_token(const ModelShape& shape, int token) {
  if (token < 0 || static_cast<std::size_t>(token) >= shape.vocab_size) {
    throw usage_error("token " + std::to_string(token) +
                      " out of vocabulary range");
  }
}

inline void check_properties(const ModelShape& shape,
                             const std::vector<int>& props) {
  for (int p : props) {
    if (p < 0 || static_cast<std::size_t>(p) >= shape.n_properties) {
      throw usage_error("property index out of range");
    }
  }
}

}  // namespace detail

inline RecurrentTerms recurrent_terms(const ModelParameters& p,
                                      std::span<const double> h) {
  RecurrentTerms t{p.b_z.data, p.b_r.data};
  gemv_add(p.u_z, h, t.z);
  gemv_add(p.u_r, h, t.r);
  return t;
}

inline void step_forward(const ModelParameters& p, int token,
                         const std::vector<int>& properties,
                         std::span<const double> h_prev,
                         const RecurrentTerms& terms, StepCache& c) {
  const auto& s = p.shape;
  detail::check_token(s, token);
  const std::size_t E = s.embedding_size;
  const std::size_t H = s.hidden_size;

  c.token = token;
  c.properties.clear();
  c.x.assign(s.input_size(), 0.0);
  const auto emb = p.embedding.row(static_cast<std::size_t>(token));
  std::copy(emb.begin(), emb.end(), c.x.begin());
  if (s.has_metadata()) {
    detail::check_properties(s, properties);
    c.properties = properties;
    for (int prop : properties) {
      for (std::size_t k = 0; k < s.meta_size; ++k) {
        c.x[E + k] += p.meta_proj(k, static_cast<std::size_t>(prop));
      }
    }
  }

  c.z = terms.z;
  c.r = terms.r;
  gemv_add(p.w_z, c.x, c.z);
  gemv_add(p.w_r, c.x, c.r);
  c.rh.resize(H);
  for (std::size_t i = 0; i < H; ++i) {
    c.z[i] = sigmoid(c.z[i]);
    c.r[i] = sigmoid(c.r[i]);
    c.rh[i] = c.r[i] * h_prev[i];
  }
  c.hh = p.b_h.data;
  gemv_add(p.w_h, c.x, c.hh);
  gemv_add(p.u_h, c.rh, c.hh);
  c.h.resize(H);
  for (std::size_t i = 0; i < H; ++i) {
    c.hh[i] = std::tanh(c.hh[i]);
    c.h[i] = (1.0 - c.z[i]) * h_prev[i] + c.z[i] * c.hh[i];
  }
}

// Gate pre-activation gradients summed over all steps that share one h_prev;
// their U_z / U_r contributions are applied once by finish_shared().
struct SharedGateGrads {
  std::vector<double> z, r;
  explicit SharedGateGrads(std::size_t hidden) : z(hidden, 0.0), r(hidden, 0.0) {}
};

// Backpropagates dh (gradient w.r.t. the step output) through one step.
// Adds to dh_prev everything except the shared U_z / U_r paths.
inline void step_backward(const ModelParameters& p, const StepCache& c,
                          std::span<const double> h_prev,
                          std::span<const double> dh, Gradients& g,
                          std::span<double> dh_prev, SharedGateGrads& shared) {
  const auto& s = p.shape;
  const std::size_t H = s.hidden_size;
  const std::size_t E = s.embedding_size;

  std::vector<double> dz_pre(H), dhh_pre(H), dr_pre(H), d_rh(H, 0.0);
  for (std::size_t i = 0; i < H; ++i) {
    const double dz = dh[i] * (c.hh[i] - h_prev[i]);
    dz_pre[i] = dz * c.z[i] * (1.0 - c.z[i]);
    dhh_pre[i] = dh[i] * c.z[i] * (1.0 - c.hh[i] * c.hh[i]);
    dh_prev[i] += dh[i] * (1.0 - c.z[i]);
  }
  gemv_t_add(p.u_h, dhh_pre, d_rh);
  for (std::size_t i = 0; i < H; ++i) {
    dr_pre[i] = d_rh[i] * h_prev[i] * c.r[i] * (1.0 - c.r[i]);
    dh_prev[i] += d_rh[i] * c.r[i];
    shared.z[i] += dz_pre[i];
    shared.r[i] += dr_pre[i];
  }

  outer_add(dz_pre, c.x, g.dense.w_z);
  outer_add(dr_pre, c.x, g.dense.w_r);
  outer_add(dhh_pre, c.x, g.dense.w_h);
  outer_add(dhh_pre, c.rh, g.dense.u_h);
  axpy(1.0, dz_pre, g.dense.b_z.data);
  axpy(1.0, dr_pre, g.dense.b_r.data);
  axpy(1.0, dhh_pre, g.dense.b_h.data);

  std::vector<double> dx(s.input_size(), 0.0);
  gemv_t_add(p.w_z, dz_pre, dx);
  gemv_t_add(p.w_r, dr_pre, dx);
  gemv_t_add(p.w_h, dhh_pre, dx);
  auto row = g.embedding_row(c.token);
  axpy(1.0, std::span<const double>(dx.data(), E), row);
  if (s.has_metadata()) {
    for (int prop : c.properties) {
      for (std::size_t k = 0; k < s.meta_size; ++k) {
        g.dense.meta_proj(k, static_cast<std::size_t>(prop)) += dx[E + k];
      }
    }
  }
}

inline void finish_shared(const ModelParameters& p, std::span<const double> h_prev,
                          const SharedGateGrads& shared, Gradients& g,
                          std::span<double> dh_prev) {
  outer_add(shared.z, h_prev, g.dense.u_z);
  outer_add(shared.r, h_prev, g.dense.u_r);
  gemv_t_add(p.u_z, shared.z, dh_prev);
  gemv_t_add(p.u_r, shared.r, dh_prev);
}

inline ContextCache context_forward(const ModelParameters& p, ContextIndex idx) {
  const auto& s = p.shape;
  ContextCache c;
  c.index = idx;
  if (!s.has_context()) return c;
  c.a1_pre = p.mlp_b1.data;
  for (std::size_t i = 0; i < s.mlp1; ++i) {
    if (idx.device >= 0) {
      c.a1_pre[i] += p.mlp_w1(i, static_cast<std::size_t>(idx.device));
    }
    if (idx.platform >= 0) {
      c.a1_pre[i] +=
          p.mlp_w1(i, s.n_devices + static_cast<std::size_t>(idx.platform));
    }
  }
  c.a1.resize(s.mlp1);
  for (std::size_t i = 0; i < s.mlp1; ++i) c.a1[i] = std::max(0.0, c.a1_pre[i]);
  c.a2_pre = p.mlp_b2.data;
  gemv_add(p.mlp_w2, c.a1, c.a2_pre);
  c.a2.resize(s.mlp2);
  for (std::size_t i = 0; i < s.mlp2; ++i) c.a2[i] = std::max(0.0, c.a2_pre[i]);
  return c;
}

inline void context_backward(const ModelParameters& p, const ContextCache& c,
                             std::span<const double> da2, Gradients& g) {
  const auto& s = p.shape;
  if (!s.has_context()) return;
  std::vector<double> da2_pre(s.mlp2), da1(s.mlp1, 0.0);
  for (std::size_t i = 0; i < s.mlp2; ++i) {
    da2_pre[i] = c.a2_pre[i] > 0.0 ? da2[i] : 0.0;
  }
  outer_add(da2_pre, c.a1, g.dense.mlp_w2);
  axpy(1.0, da2_pre, g.dense.mlp_b2.data);
  gemv_t_add(p.mlp_w2, da2_pre, da1);
  for (std::size_t i = 0; i < s.mlp1; ++i) {
    const double d = c.a1_pre[i] > 0.0 ? da1[i] : 0.0;
    g.dense.mlp_b1.data[i] += d;
    if (c.index.device >= 0) {
      g.dense.mlp_w1(i, static_cast<std::size_t>(c.index.device)) += d;
    }
    if (c.index.platform >= 0) {
      g.dense.mlp_w1(i, s.n_devices + static_cast<std::size_t>(c.index.platform)) +=
          d;
    }
  }
}

inline double head_logit(const ModelParameters& p, std::span<const double> h,
                         const ContextCache& ctx) {
  const std::size_t H = p.shape.hidden_size;
  double logit = p.b_out.data[0];
  for (std::size_t i = 0; i < H; ++i) logit += p.w_out.data[i] * h[i];
  for (std::size_t j = 0; j < ctx.a2.size(); ++j) {
    logit += p.w_out.data[H + j] * ctx.a2[j];
  }
  return logit;
}

// Forward state of one history, reusable across its candidates.
struct HistoryPass {
  std::vector<StepCache> steps;
  std::vector<double> initial;  // h_0 = 0
  RecurrentTerms final_terms;   // recurrent terms of the final state

  std::span<const double> state_before(std::size_t t) const {
    return t == 0 ? std::span<const double>(initial) : steps[t - 1].h;
  }
  std::span<const double> final_state() const { return state_before(steps.size()); }
};

inline HistoryPass run_history(const ModelParameters& p,
                               const EncodedHistory& history) {
  HistoryPass pass;
  pass.initial.assign(p.shape.hidden_size, 0.0);
  pass.steps.resize(history.tokens.size());
  for (std::size_t t = 0; t < history.tokens.size(); ++t) {
    const auto h_prev = pass.state_before(t);
    step_forward(p, history.tokens[t], history.properties[t], h_prev,
                 recurrent_terms(p, h_prev), pass.steps[t]);
  }
  pass.final_terms = recurrent_terms(p, pass.final_state());
  return pass;
}

// Backpropagates dh_final (gradient w.r.t. the last history state) to the
// start of the history.
inline void backprop_history(const ModelParameters& p, const HistoryPass& pass,
                             std::vector<double> dh, Gradients& g) {
  const std::size_t H = p.shape.hidden_size;
  for (std::size_t t = pass.steps.size(); t-- > 0;) {
    const auto h_prev = pass.state_before(t);
    std::vector<double> dh_prev(H, 0.0);
    SharedGateGrads shared(H);
    step_backward(p, pass.steps[t], h_prev, dh, g, dh_prev, shared);
    finish_shared(p, h_prev, shared, g, dh_prev);
    dh = std::move(dh_prev);
  }
}

struct ForwardResult {
  double probability = 0.5;
  double logit = 0.0;
  HistoryPass history;
  StepCache candidate;
  ContextCache context;
};

inline ForwardResult forward(const ModelParameters& p,
                             const TrainingExample& example) {
  ForwardResult r;
  r.history = run_history(p, *example.history);
  step_forward(p, example.candidate, example.candidate_properties,
               r.history.final_state(), r.history.final_terms, r.candidate);
  r.context = context_forward(p, example.context);
  r.logit = head_logit(p, r.candidate.h, r.context);
  r.probability = sigmoid(r.logit);
  return r;
}

inline double binary_cross_entropy(double probability, double label) {
  const double q =
      std::clamp(probability, kProbabilityClamp, 1.0 - kProbabilityClamp);
  return -(label * std::log(q) + (1.0 - label) * std::log(1.0 - q));
}

struct LossAndGradients {
  double loss = 0.0;  // mean over the batch
  Gradients gradients;
};

// Mean binary cross-entropy over the batch and its exact gradient. Examples
// sharing a history (same EncodedHistory object and context) are grouped so
// the history is run and backpropagated once per group.
inline LossAndGradients loss_and_gradients(
    const ModelParameters& p, std::span<const TrainingExample> batch) {
  if (batch.empty()) throw usage_error("empty batch");
  const auto& s = p.shape;
  const std::size_t H = s.hidden_size;
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  LossAndGradients out{0.0, Gradients(s)};
  Gradients& g = out.gradients;

  // Groups in first-appearance order.
  std::vector<std::vector<std::size_t>> groups;
  {
    std::unordered_map<const EncodedHistory*, std::vector<std::size_t>> by_history;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      bool placed = false;
      auto& candidates = by_history[batch[i].history.get()];
      for (std::size_t gi : candidates) {
        if (batch[groups[gi].front()].context == batch[i].context) {
          groups[gi].push_back(i);
          placed = true;
          break;
        }
      }
      if (!placed) {
        candidates.push_back(groups.size());
        groups.push_back({i});
      }
    }
  }

  StepCache cand;
  for (const auto& group : groups) {
    const TrainingExample& first = batch[group.front()];
    const HistoryPass pass = run_history(p, *first.history);
    const ContextCache ctx = context_forward(p, first.context);
    const auto h_last = pass.final_state();

    std::vector<double> dh_last(H, 0.0);
    std::vector<double> da2(s.has_context() ? s.mlp2 : 0, 0.0);
    SharedGateGrads shared(H);

    for (std::size_t i : group) {
      const TrainingExample& ex = batch[i];
      step_forward(p, ex.candidate, ex.candidate_properties, h_last,
                   pass.final_terms, cand);
      const double logit = head_logit(p, cand.h, ctx);
      const double prob = sigmoid(logit);
      out.loss += binary_cross_entropy(prob, ex.label) * inv_n;

      const bool clamped =
          prob < kProbabilityClamp || prob > 1.0 - kProbabilityClamp;
      const double dlogit = clamped ? 0.0 : (prob - ex.label) * inv_n;
      if (dlogit == 0.0) continue;

      g.dense.b_out.data[0] += dlogit;
      std::vector<double> dh(H);
      for (std::size_t k = 0; k < H; ++k) {
        g.dense.w_out.data[k] += dlogit * cand.h[k];
        dh[k] = dlogit * p.w_out.data[k];
      }
      for (std::size_t j = 0; j < da2.size(); ++j) {
        g.dense.w_out.data[H + j] += dlogit * ctx.a2[j];
        da2[j] += dlogit * p.w_out.data[H + j];
      }
      step_backward(p, cand, h_last, dh, g, dh_last, shared);
    }
    finish_shared(p, h_last, shared, g, dh_last);
    context_backward(p, ctx, da2, g);
    backprop_history(p, pass, std::move(dh_last), g);
  }
  return out;
}

}  // namespace sessrank::neural
