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

#include <algorithm>
#include <sstream>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace sessrank::neural {
namespace {

struct Data {
  std::vector<ClickoutInstance> train;
  std::vector<ClickoutInstance> valid;
  Vocabulary vocab;
};

Data tiny_data() {
  SynthConfig cfg;
  cfg.n_sessions = 300;
  cfg.n_items = 60;
  cfg.interact_then_click_prob = 0.9;
  cfg.seed = 8;
  const auto corpus = generate(cfg);
  const auto split = split_train_validation(corpus.sessions, 0.25, 8);
  return {extract_clickouts(split.train, false), extract_clickouts(split.validation, true),
          build_vocabulary(split.train, 1)};
}

HyperGrid single(std::size_t e, double lr) {
  HyperGrid g;
  g.embedding_sizes = {e};
  g.hidden_sizes = {4};
  g.batch_sizes = {64};
  g.epochs = {2};
  g.learning_rates = {lr};
  g.mlp_layer_sizes = {{4, 2}};
  return g;
}

TEST(HyperGridTest, DefaultGridSize) {
  const HyperGrid g;
  EXPECT_EQ(g.size(), 2400u);
  EXPECT_EQ(g.configurations().size(), 2400u);
}

TEST(HyperGridTest, EnumerationOrderAndBudget) {
  HyperGrid g = single(4, 0.01);
  g.embedding_sizes = {4, 8};
  g.learning_rates = {0.01, 0.02, 0.03};
  const auto all = g.configurations();
  ASSERT_EQ(all.size(), 6u);
  EXPECT_EQ(all[0].embedding_size, 4u);
  EXPECT_EQ(all[1].learning_rate, 0.02);
  EXPECT_EQ(all[3].embedding_size, 8u);

  g.budget = 4;
  const auto picked = g.configurations();
  ASSERT_EQ(picked.size(), 4u);
  for (const auto& hp : picked) {
    EXPECT_NE(std::find(all.begin(), all.end(), hp), all.end());
  }
  EXPECT_EQ(picked, g.configurations());
}

TEST(GridSearchTest, SingleConfigurationIsBest) {
  const auto d = tiny_data();
  const auto r = grid_search(d.train, d.valid, single(4, 0.01), d.vocab);
  ASSERT_EQ(r.table.size(), 1u);
  EXPECT_EQ(r.best, 0u);
  EXPECT_EQ(r.best_params().embedding_size, 4u);
}

TEST(GridSearchTest, PicksTrainedOverFrozenModel) {
  const auto d = tiny_data();
  auto g = single(4, 0.0);
  g.learning_rates = {0.0, 0.02};
  const auto r = grid_search(d.train, d.valid, g, d.vocab);
  ASSERT_EQ(r.table.size(), 2u);
  EXPECT_GT(r.table[1].mrr, r.table[0].mrr);
  EXPECT_EQ(r.best, 1u);
}

TEST(GridSearchTest, TiesGoToSmallerEmbedding) {
  const auto d = tiny_data();
  auto g = single(8, 0.0);
  g.embedding_sizes = {8, 4};
  g.base.init_stddev = 0.0;  // every configuration scores the display order
  const auto r = grid_search(d.train, d.valid, g, d.vocab);
  ASSERT_EQ(r.table.size(), 2u);
  EXPECT_EQ(r.table[0].mrr, r.table[1].mrr);
  EXPECT_EQ(r.best_params().embedding_size, 4u);
}

TEST(GridSearchTest, DivergedConfigurationIsKept) {
  const auto d = tiny_data();
  auto g = single(4, 1e300);
  g.learning_rates = {1e300, 0.01};
  g.base.grad_clip_norm = 0;
  const auto r = grid_search(d.train, d.valid, g, d.vocab);
  ASSERT_EQ(r.table.size(), 2u);
  EXPECT_TRUE(r.table[0].diverged);
  EXPECT_EQ(r.best, 1u);
  EXPECT_NE(grid_report(r).find("diverged"), std::string::npos);
}

TEST(GridSearchTest, ReportListsEveryConfiguration) {
  const auto d = tiny_data();
  auto g = single(4, 0.01);
  g.hidden_sizes = {2, 4};
  g.epochs = {1};
  std::size_t seen = 0;
  const auto r = grid_search(d.train, d.valid, g, d.vocab, {},
                             [&](const GridEntry&) { ++seen; });
  EXPECT_EQ(seen, 2u);
  const auto text = grid_report(r);
  EXPECT_NE(text.find("n_configs = 2"), std::string::npos);
  EXPECT_NE(text.find("config.0 = "), std::string::npos);
  EXPECT_NE(text.find("config.1 = "), std::string::npos);
  EXPECT_NE(text.find("best_mrr = "), std::string::npos);
}

}  // namespace
}  // namespace sessrank::neural
