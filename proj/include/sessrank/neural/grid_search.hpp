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
#include <array>
#include <functional>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "sessrank/error.hpp"
#include "sessrank/eval.hpp"
#include "sessrank/neural/ranker.hpp"
#include "sessrank/neural/train.hpp"
#include "sessrank/rng.hpp"

namespace sessrank::neural {

// Candidate values per tuned hyper-parameter. Defaults are the full search
// space (4 x 2 x 5 x 4 x 5 x 3 = 2400 configurations); fields outside the
// grid come from `base`.
struct HyperGrid {
  std::vector<std::size_t> embedding_sizes{64, 128, 256, 512};
  std::vector<std::size_t> hidden_sizes{64, 128};
  std::vector<std::size_t> batch_sizes{32, 64, 128, 256, 512};
  std::vector<std::size_t> epochs{5, 10, 15, 20};
  std::vector<double> learning_rates{0.0001, 0.0005, 0.001, 0.005, 0.01};
  std::vector<std::array<std::size_t, 2>> mlp_layer_sizes{
      {256, 128}, {128, 64}, {64, 32}};
  HyperParams base;
  std::size_t budget = 0;  // 0: exhaustive, else a seeded random subset

  std::size_t size() const {
    return embedding_sizes.size() * hidden_sizes.size() * batch_sizes.size() *
           epochs.size() * learning_rates.size() * mlp_layer_sizes.size();
  }

  // Cartesian product, embedding size outermost and MLP sizes innermost.
  std::vector<HyperParams> configurations() const {
    std::vector<HyperParams> all;
    all.reserve(size());
    for (auto e : embedding_sizes)
      for (auto h : hidden_sizes)
        for (auto b : batch_sizes)
          for (auto ep : epochs)
            for (auto lr : learning_rates)
              for (const auto& mlp : mlp_layer_sizes) {
                HyperParams hp = base;
                hp.embedding_size = e;
                hp.hidden_size = h;
                hp.batch_size = b;
                hp.epochs = ep;
                hp.learning_rate = lr;
                hp.mlp_layer_sizes = mlp;
                all.push_back(hp);
              }
    if (budget == 0 || budget >= all.size()) return all;
    std::vector<std::size_t> idx(all.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(base.seed);
    rng.shuffle(idx);
    idx.resize(budget);
    std::sort(idx.begin(), idx.end());
    std::vector<HyperParams> picked;
    for (auto i : idx) picked.push_back(all[i]);
    return picked;
  }
};

struct GridEntry {
  HyperParams params;
  double mrr = 0.0;
  bool diverged = false;
};

struct GridResult {
  std::vector<GridEntry> table;
  std::size_t best = 0;

  const HyperParams& best_params() const { return table[best].params; }
};

// Trains one model per configuration and scores it by validation MRR of the
// neural ranking alone. Best = highest MRR; ties go to the smaller embedding,
// then the smaller hidden size, then the earlier configuration. A diverging
// configuration is kept in the table with MRR 0.
inline GridResult grid_search(const std::vector<ClickoutInstance>& train_set,
                              const std::vector<ClickoutInstance>& validation,
                              const HyperGrid& grid, const Vocabulary& vocab,
                              const TrainingInputs& inputs = {},
                              const std::function<void(const GridEntry&)>& on_config = {}) {
  const auto configs = grid.configurations();
  if (configs.empty()) throw usage_error("empty hyper-parameter grid");
  GridResult result;
  for (const auto& hp : configs) {
    GridEntry entry{hp, 0.0, false};
    try {
      const auto trained = train(train_set, hp, vocab, inputs);
      const auto enc = trained.model.encoder(inputs.metadata);
      const auto report = evaluate("rnn", validation, [&](const ClickoutInstance& i) {
        return rank_by_scores(i.impressions(),
                              candidate_probabilities(trained.model, enc, i));
      });
      entry.mrr = report.mrr;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kDivergence) throw;
      entry.diverged = true;
    }
    result.table.push_back(entry);
    if (on_config) on_config(entry);
  }
  for (std::size_t i = 1; i < result.table.size(); ++i) {
    const auto& a = result.table[i];
    const auto& b = result.table[result.best];
    const bool better =
        a.mrr > b.mrr ||
        (a.mrr == b.mrr &&
         (a.params.embedding_size < b.params.embedding_size ||
          (a.params.embedding_size == b.params.embedding_size &&
           a.params.hidden_size < b.params.hidden_size)));
    if (better) result.best = i;
  }
  return result;
}

inline std::string describe(const HyperParams& hp) {
  std::ostringstream out;
  out << "embedding_size=" << hp.embedding_size
      << " hidden_size=" << hp.hidden_size << " batch_size=" << hp.batch_size
      << " epochs=" << hp.epochs << " learning_rate=" << hp.learning_rate
      << " mlp_layer_sizes=" << hp.mlp_layer_sizes[0] << 'x'
      << hp.mlp_layer_sizes[1];
  return out.str();
}

inline std::string grid_report(const GridResult& result) {
  std::ostringstream out;
  out << "n_configs = " << result.table.size() << '\n';
  for (std::size_t i = 0; i < result.table.size(); ++i) {
    const auto& e = result.table[i];
    out << "config." << i << " = " << describe(e.params)
        << " mrr=" << std::setprecision(12) << e.mrr
        << (e.diverged ? " diverged" : "") << '\n';
  }
  out << "best = " << result.best << '\n'
      << "best_config = " << describe(result.best_params()) << '\n'
      << "best_mrr = " << std::setprecision(12) << result.table[result.best].mrr
      << '\n';
  return out.str();
}

}  // namespace sessrank::neural
