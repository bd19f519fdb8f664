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
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sessrank/error.hpp"
#include "sessrank/ranked_list.hpp"
#include "sessrank/session.hpp"

namespace sessrank {

// Impressions the user interacted with before the clickout, mapped to the
// step of their most recent item interaction.
using InteractionSet = std::map<std::string, std::int64_t>;

inline InteractionSet build_interaction_set(const ClickoutInstance& instance) {
  const std::unordered_set<std::string> shown(instance.impressions().begin(),
                                              instance.impressions().end());
  InteractionSet iset;
  for (const auto& e : instance.history) {
    if (!is_item_interaction(e.action) || !shown.contains(e.reference)) continue;
    auto [it, inserted] = iset.try_emplace(e.reference, e.step);
    if (!inserted) it->second = std::max(it->second, e.step);
  }
  return iset;
}

// Moves interacted items to the head, most recent interaction first; the
// rest keep their relative order from `base`. Equal steps fall back to base
// order.
inline RankedList rule_rerank(const RankedList& base, const InteractionSet& iset) {
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < base.items.size(); ++i) position[base.items[i]] = i;

  std::vector<std::size_t> head;
  head.reserve(iset.size());
  for (const auto& [item, step] : iset) {
    const auto it = position.find(item);
    if (it == position.end()) throw data_error("unknown impression " + item);
    head.push_back(it->second);
  }
  std::sort(head.begin(), head.end(), [&](std::size_t a, std::size_t b) {
    const auto sa = iset.at(base.items[a]);
    const auto sb = iset.at(base.items[b]);
    return sa != sb ? sa > sb : a < b;
  });

  RankedList out;
  out.items.reserve(base.size());
  out.scores.reserve(base.size());
  std::vector<bool> taken(base.size(), false);
  for (std::size_t i : head) {
    out.items.push_back(base.items[i]);
    out.scores.push_back(base.scores[i]);
    taken[i] = true;
  }
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (taken[i]) continue;
    out.items.push_back(base.items[i]);
    out.scores.push_back(base.scores[i]);
  }
  return out;
}

}  // namespace sessrank
