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

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sessrank/baselines.hpp"
#include "sessrank/eval.hpp"
#include "sessrank/ingest.hpp"
#include "sessrank/neural/ranker.hpp"
#include "sessrank/ranked_list.hpp"
#include "sessrank/rules.hpp"
#include "sessrank/session.hpp"

namespace sessrank {

// First-stage ranking method. Implementations are immutable after
// construction and safe to call from several threads.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::string name() const = 0;
  virtual RankedList rank(const ClickoutInstance& instance) const = 0;
};

// The order the impressions were displayed in.
class IdentityScorer final : public Scorer {
 public:
  std::string name() const override { return "identity"; }
  RankedList rank(const ClickoutInstance& instance) const override {
    return identity_order(instance.impressions());
  }
};

class BaselineScorer final : public Scorer {
 public:
  explicit BaselineScorer(BaselineModel model) : model_(std::move(model)) {}

  std::string name() const override {
    if (const auto* m = std::get_if<CooccurrenceModel>(&model_)) {
      return std::string(kind_name(m->kind()));
    }
    return "iknn";
  }
  RankedList rank(const ClickoutInstance& instance) const override {
    return score_baseline(model_, instance);
  }

 private:
  BaselineModel model_;
};

class NeuralScorer final : public Scorer {
 public:
  NeuralScorer(std::shared_ptr<const neural::NeuralRanker> ranker,
               std::shared_ptr<const ItemMetadata> metadata = nullptr)
      : ranker_(std::move(ranker)),
        metadata_(std::move(metadata)),
        encoder_(ranker_->encoder(metadata_.get())) {}

  std::string name() const override { return "rnn"; }
  RankedList rank(const ClickoutInstance& instance) const override {
    return rank_by_scores(
        instance.impressions(),
        neural::candidate_probabilities(*ranker_, encoder_, instance));
  }

 private:
  std::shared_ptr<const neural::NeuralRanker> ranker_;
  std::shared_ptr<const ItemMetadata> metadata_;
  neural::FeatureEncoder encoder_;
};

// Stage one: the scorer's order. Stage two (apply_rules): interacted
// impressions moved to the head by recency.
inline RankedList combined_rank(const ClickoutInstance& instance,
                                const Scorer& scorer, bool apply_rules) {
  RankedList ranked = scorer.rank(instance);
  if (apply_rules) ranked = rule_rerank(ranked, build_interaction_set(instance));
  return ranked;
}

inline EvalReport evaluate(const Scorer& scorer, bool apply_rules,
                           const std::vector<ClickoutInstance>& instances,
                           std::size_t threads = 1,
                           std::vector<RankedList>* rankings = nullptr) {
  const std::string method =
      apply_rules ? (scorer.name() == "identity" ? std::string("rules")
                                                 : scorer.name() + "+rules")
                  : scorer.name();
  return evaluate(
      method, instances,
      [&](const ClickoutInstance& inst) {
        return combined_rank(inst, scorer, apply_rules);
      },
      threads, rankings);
}

}  // namespace sessrank
