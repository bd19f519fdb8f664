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
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sessrank/config.hpp"
#include "sessrank/error.hpp"
#include "sessrank/neural/grid_search.hpp"
#include "sessrank/neural/model.hpp"

namespace sessrank::neural {

// "256x128" -> {256, 128}
inline std::array<std::size_t, 2> parse_mlp_sizes(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) {
    throw usage_error("mlp_layer_sizes: expected AxB, got '" + text + "'");
  }
  return {KeyValues::convert<std::size_t>("mlp_layer_sizes", text.substr(0, x)),
          KeyValues::convert<std::size_t>("mlp_layer_sizes", text.substr(x + 1))};
}

inline const std::set<std::string>& hyper_param_keys() {
  static const std::set<std::string> keys{
      "embedding_size", "hidden_size",   "batch_size",     "epochs",
      "learning_rate",  "mlp_layer_sizes", "max_history_len", "seed",
      "min_count",      "init_stddev",   "grad_clip_norm", "lazy_embedding_updates"};
  return keys;
}

inline HyperParams hyper_params_from(const KeyValues& kv) {
  kv.require_known(hyper_param_keys());
  HyperParams hp;
  hp.embedding_size = kv.get("embedding_size", hp.embedding_size);
  hp.hidden_size = kv.get("hidden_size", hp.hidden_size);
  hp.batch_size = kv.get("batch_size", hp.batch_size);
  hp.epochs = kv.get("epochs", hp.epochs);
  hp.learning_rate = kv.get("learning_rate", hp.learning_rate);
  if (kv.has("mlp_layer_sizes")) {
    hp.mlp_layer_sizes = parse_mlp_sizes(kv.raw("mlp_layer_sizes"));
  }
  hp.max_history_len = kv.get("max_history_len", hp.max_history_len);
  hp.seed = kv.get("seed", hp.seed);
  hp.min_count = kv.get("min_count", hp.min_count);
  hp.init_stddev = kv.get("init_stddev", hp.init_stddev);
  hp.grad_clip_norm = kv.get("grad_clip_norm", hp.grad_clip_norm);
  hp.lazy_embedding_updates =
      kv.get("lazy_embedding_updates", hp.lazy_embedding_updates);
  if (hp.embedding_size == 0 || hp.hidden_size == 0 || hp.batch_size == 0 ||
      hp.max_history_len == 0) {
    throw usage_error("sizes must be positive");
  }
  return hp;
}

// Grid keys take comma-separated lists; any other hyper-parameter key sets
// the fixed part of every configuration. `budget` limits the number of
// configurations tried.
inline HyperGrid hyper_grid_from(const KeyValues& kv) {
  auto known = hyper_param_keys();
  known.insert("budget");
  kv.require_known(known);

  HyperGrid grid;
  std::map<std::string, std::string> rest;
  for (const auto& key : {"max_history_len", "seed", "min_count", "init_stddev",
                          "grad_clip_norm", "lazy_embedding_updates"}) {
    if (kv.has(key)) rest[key] = kv.raw(key);
  }
  {
    std::string text;
    for (const auto& [k, v] : rest) text += k + " = " + v + "\n";
    std::istringstream in(text);
    grid.base = hyper_params_from(KeyValues::parse(in));
  }
  grid.embedding_sizes = kv.get_list("embedding_size", grid.embedding_sizes);
  grid.hidden_sizes = kv.get_list("hidden_size", grid.hidden_sizes);
  grid.batch_sizes = kv.get_list("batch_size", grid.batch_sizes);
  grid.epochs = kv.get_list("epochs", grid.epochs);
  grid.learning_rates = kv.get_list("learning_rate", grid.learning_rates);
  if (kv.has("mlp_layer_sizes")) {
    grid.mlp_layer_sizes.clear();
    for (const auto& s : kv.get_list<std::string>("mlp_layer_sizes", {})) {
      grid.mlp_layer_sizes.push_back(parse_mlp_sizes(s));
    }
  }
  grid.budget = kv.get<std::size_t>("budget", 0);
  if (grid.size() == 0) throw usage_error("empty hyper-parameter grid");
  return grid;
}

}  // namespace sessrank::neural
