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
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sessrank/error.hpp"
#include "sessrank/ingest.hpp"
#include "sessrank/neural/adam.hpp"
#include "sessrank/neural/features.hpp"
#include "sessrank/neural/gru.hpp"
#include "sessrank/neural/model.hpp"
#include "sessrank/neural/ranker.hpp"
#include "sessrank/rng.hpp"

namespace sessrank::neural {

struct TrainingInputs {
  const ItemMetadata* metadata = nullptr;   // enables metadata fusion
  const ContextEncoder* context = nullptr;  // enables the context MLP
  std::function<void(std::size_t epoch, double loss)> on_epoch;
};

struct TrainResult {
  NeuralRanker model;
  std::vector<double> epoch_losses;
  std::size_t batches = 0;  // total mini-batches processed
  std::size_t skipped_instances = 0;
};

inline void clip_global_norm(Gradients& g, double max_norm) {
  if (max_norm <= 0.0) return;
  const double norm = std::sqrt(g.squared_norm());
  if (norm > max_norm) g.scale(max_norm / norm);
}

// Mini-batch Adam on binary cross-entropy. Each epoch shuffles the order of
// the clickouts (keeping each clickout's candidates adjacent, so their shared
// history is computed once per batch) and cuts the resulting example stream
// into batches of batch_size. Deterministic for a given seed.
inline TrainResult train(const std::vector<ClickoutInstance>& instances,
                         const HyperParams& hp, const Vocabulary& vocab,
                         const TrainingInputs& inputs = {}) {
  if (hp.batch_size == 0 || hp.embedding_size == 0 || hp.hidden_size == 0) {
    throw usage_error("batch, embedding and hidden sizes must be positive");
  }
  TrainResult result;
  NeuralRanker& model = result.model;
  model.vocab = vocab;
  model.max_history_len = hp.max_history_len;
  const ModelShape shape = make_shape(hp, vocab, inputs.metadata, inputs.context);
  if (shape.has_context()) model.context = *inputs.context;
  if (shape.has_metadata()) model.property_labels = inputs.metadata->labels();
  model.params = init_parameters(shape, hp.init_stddev, hp.seed);

  const FeatureEncoder encoder = model.encoder(inputs.metadata);
  const ExampleSet set = make_examples(instances, encoder);
  result.skipped_instances = set.skipped;
  if (set.examples.empty()) throw data_error("empty training set");

  AdamState adam(shape);
  Rng rng(hp.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(set.instance_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<TrainingExample> stream;
  stream.reserve(set.examples.size());

  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    rng.shuffle(order);
    stream.clear();
    for (std::size_t i : order) {
      for (std::size_t k = set.offsets[i]; k < set.offsets[i + 1]; ++k) {
        stream.push_back(set.examples[k]);
      }
    }
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < stream.size(); begin += hp.batch_size) {
      const std::size_t end = std::min(stream.size(), begin + hp.batch_size);
      const std::span<const TrainingExample> batch(stream.data() + begin,
                                                   end - begin);
      auto lg = loss_and_gradients(model.params, batch);
      if (!std::isfinite(lg.loss)) {
        throw divergence_error("training diverged: non-finite loss in epoch " +
                               std::to_string(epoch + 1));
      }
      epoch_loss += lg.loss * static_cast<double>(batch.size());
      clip_global_norm(lg.gradients, hp.grad_clip_norm);
      adam_step(model.params, lg.gradients, adam, hp.learning_rate,
                hp.lazy_embedding_updates);
      ++result.batches;
    }
    epoch_loss /= static_cast<double>(stream.size());
    result.epoch_losses.push_back(epoch_loss);
    if (inputs.on_epoch) inputs.on_epoch(epoch + 1, epoch_loss);
  }
  return result;
}

}  // namespace sessrank::neural
