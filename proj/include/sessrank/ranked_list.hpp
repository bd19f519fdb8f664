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
#include <numeric>
#include <string>
#include <vector>

namespace sessrank {

// Impressions in presentation order. The item order is authoritative; scores
// are informational and need not be monotone after rule re-ranking.
struct RankedList {
  std::vector<std::string> items;
  std::vector<double> scores;

  std::size_t size() const { return items.size(); }
  bool operator==(const RankedList&) const = default;
};

// Sorts candidates by score, descending; equal scores keep input order.
inline RankedList rank_by_scores(const std::vector<std::string>& candidates,
                                 const std::vector<double>& scores) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  RankedList out;
  out.items.reserve(order.size());
  out.scores.reserve(order.size());
  for (std::size_t i : order) {
    out.items.push_back(candidates[i]);
    out.scores.push_back(scores[i]);
  }
  return out;
}

inline RankedList identity_order(const std::vector<std::string>& candidates) {
  return RankedList{candidates, std::vector<double>(candidates.size(), 0.0)};
}

}  // namespace sessrank
