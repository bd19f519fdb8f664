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

// Reference implementations used only by the tests. They are written
// directly from the definitions, without sharing code with the library.

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sessrank.hpp"

namespace sessrank::oracle {

using PairWeights = std::map<std::pair<std::string, std::string>, double>;

inline std::vector<std::string> items_of(const Session& s) {
  std::vector<std::string> out;
  for (const auto& e : s.events) {
    switch (e.action) {
      case ActionType::kClickoutItem:
      case ActionType::kInteractionItemRating:
      case ActionType::kInteractionItemDeals:
      case ActionType::kInteractionItemImage:
      case ActionType::kInteractionItemInfo:
      case ActionType::kSearchForItem:
        out.push_back(e.reference);
        break;
      default:
        break;
    }
  }
  return out;
}

inline std::set<std::string> universe(const std::vector<Session>& corpus) {
  std::set<std::string> all;
  for (const auto& s : corpus) {
    for (const auto& i : items_of(s)) all.insert(i);
  }
  return all;
}

// Count of sessions containing both a and b, for every ordered a != b.
inline PairWeights association_rules(const std::vector<Session>& corpus) {
  PairWeights w;
  const auto all = universe(corpus);
  for (const auto& a : all) {
    for (const auto& b : all) {
      if (a == b) continue;
      double n = 0;
      for (const auto& s : corpus) {
        const auto items = items_of(s);
        bool has_a = false, has_b = false;
        for (const auto& i : items) {
          has_a = has_a || i == a;
          has_b = has_b || i == b;
        }
        if (has_a && has_b) n += 1;
      }
      if (n > 0) w[{a, b}] = n;
    }
  }
  return w;
}

inline PairWeights markov(const std::vector<Session>& corpus) {
  PairWeights w;
  for (const auto& s : corpus) {
    const auto items = items_of(s);
    for (std::size_t i = 0; i + 1 < items.size(); ++i) w[{items[i], items[i + 1]}] += 1;
  }
  return w;
}

inline PairWeights sequential_rules(const std::vector<Session>& corpus) {
  PairWeights w;
  const auto all = universe(corpus);
  for (const auto& a : all) {
    for (const auto& b : all) {
      double total = 0;
      for (const auto& s : corpus) {
        const auto items = items_of(s);
        for (std::size_t i = 0; i < items.size(); ++i) {
          for (std::size_t j = i + 1; j < items.size(); ++j) {
            if (items[i] == a && items[j] == b) total += 1.0 / double(j - i);
          }
        }
      }
      if (total > 0) w[{a, b}] = total;
    }
  }
  return w;
}

// Sessions (by index) containing each item.
inline std::map<std::string, std::vector<std::uint32_t>> incidence(
    const std::vector<Session>& corpus) {
  std::map<std::string, std::vector<std::uint32_t>> out;
  for (const auto& item : universe(corpus)) {
    for (std::size_t j = 0; j < corpus.size(); ++j) {
      const auto items = items_of(corpus[j]);
      for (const auto& i : items) {
        if (i == item) {
          out[item].push_back(static_cast<std::uint32_t>(j));
          break;
        }
      }
    }
  }
  return out;
}

// Cosine of the dense 0/1 session vectors.
inline double dense_cosine(const std::vector<Session>& corpus, const std::string& a,
                           const std::string& b) {
  std::vector<double> va(corpus.size(), 0.0), vb(corpus.size(), 0.0);
  for (std::size_t j = 0; j < corpus.size(); ++j) {
    for (const auto& i : items_of(corpus[j])) {
      if (i == a) va[j] = 1.0;
      if (i == b) vb[j] = 1.0;
    }
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t j = 0; j < corpus.size(); ++j) {
    dot += va[j] * vb[j];
    na += va[j] * va[j];
    nb += vb[j] * vb[j];
  }
  return na == 0 || nb == 0 ? 0.0 : dot / (std::sqrt(na) * std::sqrt(nb));
}

inline PairWeights as_map(const CooccurrenceModel& m) {
  PairWeights w;
  for (const auto& [a, b, v] : m.sorted_pairs()) w[{a, b}] = v;
  return w;
}

// --- Scalar GRU scorer ------------------------------------------------------

struct ScalarInput {
  std::vector<int> tokens;                  // history then candidate
  std::vector<std::vector<int>> properties; // parallel to tokens
  int device = -1;
  int platform = -1;
};

inline double scalar_sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Click probability computed element by element from the recurrence.
inline double scalar_probability(const neural::ModelParameters& p,
                                 const ScalarInput& in) {
  const auto& s = p.shape;
  const std::size_t E = s.embedding_size, H = s.hidden_size;
  const std::size_t M = s.has_metadata() ? s.meta_size : 0;
  std::vector<double> h(H, 0.0);
  for (std::size_t t = 0; t < in.tokens.size(); ++t) {
    std::vector<double> x(E + M, 0.0);
    for (std::size_t k = 0; k < E; ++k) {
      x[k] = p.embedding.data[static_cast<std::size_t>(in.tokens[t]) * E + k];
    }
    for (std::size_t k = 0; k < M; ++k) {
      for (int prop : in.properties[t]) {
        x[E + k] += p.meta_proj.data[k * s.n_properties + static_cast<std::size_t>(prop)];
      }
    }
    std::vector<double> z(H), r(H), cand(H), next(H);
    for (std::size_t i = 0; i < H; ++i) {
      double az = p.b_z.data[i], ar = p.b_r.data[i];
      for (std::size_t j = 0; j < x.size(); ++j) {
        az += p.w_z.data[i * x.size() + j] * x[j];
        ar += p.w_r.data[i * x.size() + j] * x[j];
      }
      for (std::size_t j = 0; j < H; ++j) {
        az += p.u_z.data[i * H + j] * h[j];
        ar += p.u_r.data[i * H + j] * h[j];
      }
      z[i] = scalar_sigmoid(az);
      r[i] = scalar_sigmoid(ar);
    }
    for (std::size_t i = 0; i < H; ++i) {
      double a = p.b_h.data[i];
      for (std::size_t j = 0; j < x.size(); ++j) a += p.w_h.data[i * x.size() + j] * x[j];
      for (std::size_t j = 0; j < H; ++j) a += p.u_h.data[i * H + j] * (r[j] * h[j]);
      cand[i] = std::tanh(a);
    }
    for (std::size_t i = 0; i < H; ++i) next[i] = (1 - z[i]) * h[i] + z[i] * cand[i];
    h = next;
  }
  double logit = p.b_out.data[0];
  for (std::size_t i = 0; i < H; ++i) logit += p.w_out.data[i] * h[i];
  if (s.has_context()) {
    const std::size_t C = s.n_devices + s.n_platforms;
    std::vector<double> one_hot(C, 0.0);
    if (in.device >= 0) one_hot[static_cast<std::size_t>(in.device)] = 1.0;
    if (in.platform >= 0) one_hot[s.n_devices + static_cast<std::size_t>(in.platform)] = 1.0;
    std::vector<double> a1(s.mlp1), a2(s.mlp2);
    for (std::size_t i = 0; i < s.mlp1; ++i) {
      double a = p.mlp_b1.data[i];
      for (std::size_t j = 0; j < C; ++j) a += p.mlp_w1.data[i * C + j] * one_hot[j];
      a1[i] = a > 0 ? a : 0;
    }
    for (std::size_t i = 0; i < s.mlp2; ++i) {
      double a = p.mlp_b2.data[i];
      for (std::size_t j = 0; j < s.mlp1; ++j) a += p.mlp_w2.data[i * s.mlp1 + j] * a1[j];
      a2[i] = a > 0 ? a : 0;
    }
    for (std::size_t i = 0; i < s.mlp2; ++i) logit += p.w_out.data[H + i] * a2[i];
  }
  return scalar_sigmoid(logit);
}

inline ScalarInput scalar_input(const neural::TrainingExample& ex) {
  ScalarInput in;
  in.tokens = ex.history->tokens;
  in.properties = ex.history->properties;
  in.tokens.push_back(ex.candidate);
  in.properties.push_back(ex.candidate_properties);
  in.device = ex.context.device;
  in.platform = ex.context.platform;
  return in;
}

inline double scalar_loss(const neural::ModelParameters& p,
                          const std::vector<neural::TrainingExample>& batch) {
  double total = 0;
  for (const auto& ex : batch) {
    double q = scalar_probability(p, scalar_input(ex));
    q = std::min(std::max(q, 1e-12), 1 - 1e-12);
    total += -(ex.label * std::log(q) + (1 - ex.label) * std::log(1 - q));
  }
  return total / static_cast<double>(batch.size());
}

}  // namespace sessrank::oracle
