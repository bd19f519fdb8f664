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
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sessrank/session.hpp"

namespace sessrank::neural {

// Index of (action label, reference) tokens. Index 0 is padding, 1 stands for
// any pair not in the table; known pairs start at 2.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kFirstToken = 2;

  using Pair = std::pair<std::string, std::string>;

  Vocabulary() = default;

  // Known pairs in index order (index = position + kFirstToken).
  explicit Vocabulary(std::vector<Pair> pairs) : pairs_(std::move(pairs)) {
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      index_.emplace(key(pairs_[i].first, pairs_[i].second),
                     static_cast<int>(i) + kFirstToken);
    }
  }

  std::size_t size() const { return pairs_.size() + kFirstToken; }
  const std::vector<Pair>& pairs() const { return pairs_; }

  int index(const std::string& label, const std::string& reference) const {
    const auto it = index_.find(key(label, reference));
    return it == index_.end() ? kUnk : it->second;
  }
  int index(const SessionEvent& e) const { return index(e.label(), e.reference); }

  // Token of the candidate appended after the history: a clickout on it.
  int candidate_index(const std::string& item) const {
    return index(std::string(action_label(ActionType::kClickoutItem)), item);
  }

  bool operator==(const Vocabulary& o) const { return pairs_ == o.pairs_; }

 private:
  static std::string key(const std::string& label, const std::string& ref) {
    std::string k;
    k.reserve(label.size() + ref.size() + 1);
    k += label;
    k.push_back('\x1f');
    k += ref;
    return k;
  }

  std::vector<Pair> pairs_;
  std::unordered_map<std::string, int> index_;
};

// Counts every (action, reference) pair of the corpus; pairs seen fewer than
// min_count times are left out and map to UNK. Order: frequency descending,
// then lexicographic.
inline Vocabulary build_vocabulary(const std::vector<Session>& train,
                                   std::size_t min_count) {
  std::map<Vocabulary::Pair, std::size_t> counts;
  for (const auto& s : train) {
    for (const auto& e : s.events) ++counts[{e.label(), e.reference}];
  }
  std::vector<std::pair<Vocabulary::Pair, std::size_t>> sorted(counts.begin(),
                                                               counts.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<Vocabulary::Pair> pairs;
  for (auto& [pair, n] : sorted) {
    if (n >= min_count) pairs.push_back(pair);
  }
  return Vocabulary(std::move(pairs));
}

}  // namespace sessrank::neural
