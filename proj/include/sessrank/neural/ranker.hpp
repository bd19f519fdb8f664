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

#include <string>
#include <vector>

#include "sessrank/ingest.hpp"
#include "sessrank/neural/features.hpp"
#include "sessrank/neural/gru.hpp"
#include "sessrank/neural/model.hpp"
#include "sessrank/neural/vocabulary.hpp"
#include "sessrank/ranked_list.hpp"

namespace sessrank::neural {

// A trained scorer together with everything needed to encode its inputs.
struct NeuralRanker {
  ModelParameters params;
  Vocabulary vocab;
  ContextEncoder context;                    // empty: context disabled
  std::vector<std::string> property_labels;  // empty: metadata disabled
  std::size_t max_history_len = 50;

  FeatureEncoder encoder(const ItemMetadata* metadata) const {
    FeatureEncoder enc(vocab, max_history_len);
    if (params.shape.has_metadata()) enc.set_metadata(metadata, property_labels);
    if (params.shape.has_context()) enc.set_context(&context);
    return enc;
  }

  bool operator==(const NeuralRanker&) const = default;
};

inline ModelShape make_shape(const HyperParams& hp, const Vocabulary& vocab,
                             const ItemMetadata* metadata,
                             const ContextEncoder* context) {
  ModelShape s;
  s.vocab_size = vocab.size();
  s.embedding_size = hp.embedding_size;
  s.hidden_size = hp.hidden_size;
  if (metadata != nullptr && metadata->vocabulary_size() > 0) {
    s.n_properties = metadata->vocabulary_size();
    s.meta_size = std::max<std::size_t>(1, hp.embedding_size / 2);
  }
  if (context != nullptr && !context->empty()) {
    s.n_devices = context->devices().size();
    s.n_platforms = context->platforms().size();
    s.mlp1 = hp.mlp_layer_sizes[0];
    s.mlp2 = hp.mlp_layer_sizes[1];
  }
  return s;
}

// Click probability of every impression; one history pass per instance.
inline std::vector<double> candidate_probabilities(const NeuralRanker& ranker,
                                                   const FeatureEncoder& enc,
                                                   const ClickoutInstance& inst) {
  const auto& p = ranker.params;
  const auto history = enc.encode_history(inst);
  const HistoryPass pass = run_history(p, *history);
  const ContextCache ctx = context_forward(p, enc.encode_context(inst));
  std::vector<double> probs;
  probs.reserve(inst.impressions().size());
  StepCache step;
  for (const auto& item : inst.impressions()) {
    step_forward(p, ranker.vocab.candidate_index(item), enc.item_properties(item),
                 pass.final_state(), pass.final_terms, step);
    probs.push_back(sigmoid(head_logit(p, step.h, ctx)));
  }
  return probs;
}

// Impressions sorted by predicted click probability, ties in impression order.
inline RankedList score_neural(const NeuralRanker& ranker,
                               const ClickoutInstance& instance,
                               const ItemMetadata* metadata = nullptr) {
  const auto enc = ranker.encoder(metadata);
  return rank_by_scores(instance.impressions(),
                        candidate_probabilities(ranker, enc, instance));
}

}  // namespace sessrank::neural
