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

#include <sstream>

#include <gtest/gtest.h>

#include "sessrank.hpp"

namespace sessrank {
namespace {

KeyValues parse(const std::string& text) {
  std::istringstream in(text);
  return KeyValues::parse(in);
}

void expect_usage_error(const std::function<void()>& f) {
  try {
    f();
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUsage);
  }
}

TEST(KeyValuesTest, ParsesValuesCommentsAndLists) {
  const auto kv = parse("# comment\n\n a = 3 \nb=0.5\nflag = yes\nlist = 1, 2,3\na = 4\n");
  EXPECT_EQ(kv.get<int>("a", 0), 4);
  EXPECT_EQ(kv.get<double>("b", 0.0), 0.5);
  EXPECT_TRUE(kv.get<bool>("flag", false));
  EXPECT_EQ(kv.get<int>("missing", 7), 7);
  EXPECT_EQ(kv.get_list<int>("list", {}), (std::vector<int>{1, 2, 3}));
}

TEST(KeyValuesTest, RejectsMalformedInput) {
  expect_usage_error([] { parse("no equals sign\n"); });
  expect_usage_error([] { parse(" = 3\n"); });
  expect_usage_error([] { parse("a = x\n").get<int>("a", 0); });
  expect_usage_error([] { parse("a = 1.5\n").get<int>("a", 0); });
  expect_usage_error([] { parse("a = maybe\n").get<bool>("a", false); });
  expect_usage_error([] { parse("typo = 1\n").require_known({"a"}); });
}

TEST(HyperConfigTest, ReadsEveryField) {
  const auto hp = neural::hyper_params_from(parse(
      "embedding_size = 16\nhidden_size = 8\nbatch_size = 32\nepochs = 3\n"
      "learning_rate = 0.01\nmlp_layer_sizes = 128x64\nmax_history_len = 20\n"
      "seed = 9\nmin_count = 2\ninit_stddev = 0.1\ngrad_clip_norm = 0\n"
      "lazy_embedding_updates = true\n"));
  EXPECT_EQ(hp.embedding_size, 16u);
  EXPECT_EQ(hp.hidden_size, 8u);
  EXPECT_EQ(hp.batch_size, 32u);
  EXPECT_EQ(hp.epochs, 3u);
  EXPECT_EQ(hp.learning_rate, 0.01);
  EXPECT_EQ(hp.mlp_layer_sizes, (std::array<std::size_t, 2>{128, 64}));
  EXPECT_EQ(hp.max_history_len, 20u);
  EXPECT_EQ(hp.seed, 9u);
  EXPECT_EQ(hp.min_count, 2u);
  EXPECT_EQ(hp.init_stddev, 0.1);
  EXPECT_EQ(hp.grad_clip_norm, 0.0);
  EXPECT_TRUE(hp.lazy_embedding_updates);
}

TEST(HyperConfigTest, DefaultsAndErrors) {
  EXPECT_EQ(neural::hyper_params_from(parse("")), neural::HyperParams{});
  expect_usage_error([] { neural::hyper_params_from(parse("hidden = 3\n")); });
  expect_usage_error([] { neural::hyper_params_from(parse("embedding_size = 0\n")); });
  expect_usage_error([] { neural::hyper_params_from(parse("mlp_layer_sizes = 64\n")); });
}

TEST(HyperConfigTest, GridFromLists) {
  const auto g = neural::hyper_grid_from(parse(
      "embedding_size = 8, 16\nhidden_size = 4\nbatch_size = 32,64\nepochs = 2\n"
      "learning_rate = 0.01, 0.001\nmlp_layer_sizes = 8x4\nseed = 3\nbudget = 5\n"));
  EXPECT_EQ(g.size(), 8u);
  EXPECT_EQ(g.budget, 5u);
  EXPECT_EQ(g.base.seed, 3u);
  EXPECT_EQ(g.configurations().size(), 5u);
  expect_usage_error([] { neural::hyper_grid_from(parse("depth = 3\n")); });
}

}  // namespace
}  // namespace sessrank
