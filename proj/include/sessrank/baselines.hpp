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
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "sessrank/csv.hpp"
#include "sessrank/error.hpp"
#include "sessrank/io.hpp"
#include "sessrank/ranked_list.hpp"
#include "sessrank/session.hpp"

namespace sessrank {

// References of the item-interaction events, in session order.
inline std::vector<std::string> item_sequence(
    const std::vector<SessionEvent>& events) {
  std::vector<std::string> items;
  for (const auto& e : events) {
    if (is_item_interaction(e.action) && !e.reference.empty()) {
      items.push_back(e.reference);
    }
  }
  return items;
}

enum class CooccurrenceKind {
  kAssociationRules,  // undirected, once per session
  kMarkovChain,       // directed, consecutive items only
  kSequentialRules,   // directed, weighted by 1 / distance
};

// Which history items a co-occurrence model conditions on when scoring.
enum class HistoryAggregation {
  kLastItem,  // the most recent item interaction
  kAllItems,  // sum over the distinct items of the history
};

inline std::string_view kind_name(CooccurrenceKind kind) {
  switch (kind) {
    case CooccurrenceKind::kAssociationRules: return "ar";
    case CooccurrenceKind::kMarkovChain: return "mc";
    case CooccurrenceKind::kSequentialRules: return "sr";
  }
  return "ar";
}

class CooccurrenceModel {
 public:
  using Adjacency =
      std::unordered_map<std::string, std::unordered_map<std::string, double>>;

  explicit CooccurrenceModel(
      CooccurrenceKind kind,
      HistoryAggregation aggregation = HistoryAggregation::kLastItem)
      : kind_(kind), aggregation_(aggregation) {}

  CooccurrenceKind kind() const { return kind_; }
  HistoryAggregation aggregation() const { return aggregation_; }
  void set_aggregation(HistoryAggregation a) { aggregation_ = a; }

  double weight(const std::string& from, const std::string& to) const {
    const auto it = pairs_.find(from);
    if (it == pairs_.end()) return 0.0;
    const auto jt = it->second.find(to);
    return jt == it->second.end() ? 0.0 : jt->second;
  }

  // Number of training sessions that interacted with the item.
  std::size_t item_count(const std::string& item) const {
    const auto it = item_counts_.find(item);
    return it == item_counts_.end() ? 0 : it->second;
  }

  void add(const std::string& from, const std::string& to, double w) {
    pairs_[from][to] += w;
  }
  void count_item(const std::string& item, std::size_t n = 1) {
    item_counts_[item] += n;
  }

  // All (from, to, weight) triples in lexicographic order.
  std::vector<std::tuple<std::string, std::string, double>> sorted_pairs() const {
    std::vector<std::tuple<std::string, std::string, double>> out;
    for (const auto& [from, row] : pairs_) {
      for (const auto& [to, w] : row) out.emplace_back(from, to, w);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::map<std::string, std::size_t> sorted_item_counts() const {
    return {item_counts_.begin(), item_counts_.end()};
  }

  bool operator==(const CooccurrenceModel& o) const {
    return kind_ == o.kind_ && aggregation_ == o.aggregation_ &&
           sorted_pairs() == o.sorted_pairs() &&
           sorted_item_counts() == o.sorted_item_counts();
  }

 private:
  CooccurrenceKind kind_;
  HistoryAggregation aggregation_;
  Adjacency pairs_;
  std::unordered_map<std::string, std::size_t> item_counts_;
};

namespace detail {

inline void count_session_items(CooccurrenceModel& model,
                                const std::vector<std::string>& items) {
  const std::set<std::string> distinct(items.begin(), items.end());
  for (const auto& item : distinct) model.count_item(item);
}

}  // namespace detail

inline CooccurrenceModel fit_association_rules(
    const std::vector<Session>& train) {
  CooccurrenceModel model(CooccurrenceKind::kAssociationRules);
  for (const auto& s : train) {
    const auto items = item_sequence(s.events);
    detail::count_session_items(model, items);
    const std::set<std::string> distinct(items.begin(), items.end());
    for (auto a = distinct.begin(); a != distinct.end(); ++a) {
      for (auto b = std::next(a); b != distinct.end(); ++b) {
        model.add(*a, *b, 1.0);
        model.add(*b, *a, 1.0);
      }
    }
  }
  return model;
}

inline CooccurrenceModel fit_markov(const std::vector<Session>& train) {
  CooccurrenceModel model(CooccurrenceKind::kMarkovChain);
  for (const auto& s : train) {
    const auto items = item_sequence(s.events);
    detail::count_session_items(model, items);
    for (std::size_t i = 1; i < items.size(); ++i) {
      model.add(items[i - 1], items[i], 1.0);
    }
  }
  return model;
}

inline CooccurrenceModel fit_sequential_rules(const std::vector<Session>& train) {
  CooccurrenceModel model(CooccurrenceKind::kSequentialRules);
  for (const auto& s : train) {
    const auto items = item_sequence(s.events);
    detail::count_session_items(model, items);
    for (std::size_t i = 0; i < items.size(); ++i) {
      for (std::size_t j = i + 1; j < items.size(); ++j) {
        model.add(items[i], items[j], 1.0 / static_cast<double>(j - i));
      }
    }
  }
  return model;
}

// Binary item-by-session incidence. Each item keeps the sorted list of the
// training sessions it occurs in; its norm is the square root of that count.
class IknnIndex {
 public:
  IknnIndex() = default;
  explicit IknnIndex(std::size_t n_sessions) : n_sessions_(n_sessions) {}

  std::size_t n_sessions() const { return n_sessions_; }
  std::size_t n_items() const { return vectors_.size(); }

  const std::vector<std::uint32_t>* sessions_of(const std::string& item) const {
    const auto it = vectors_.find(item);
    return it == vectors_.end() ? nullptr : &it->second;
  }

  double norm(const std::string& item) const {
    const auto* v = sessions_of(item);
    return v == nullptr ? 0.0 : std::sqrt(static_cast<double>(v->size()));
  }

  double cosine(const std::string& a, const std::string& b) const {
    const auto* va = sessions_of(a);
    const auto* vb = sessions_of(b);
    if (va == nullptr || vb == nullptr) return 0.0;
    std::size_t common = 0;
    auto i = va->begin();
    auto j = vb->begin();
    while (i != va->end() && j != vb->end()) {
      if (*i < *j) {
        ++i;
      } else if (*j < *i) {
        ++j;
      } else {
        ++common;
        ++i;
        ++j;
      }
    }
    return static_cast<double>(common) /
           std::sqrt(static_cast<double>(va->size()) *
                     static_cast<double>(vb->size()));
  }

  void mark(const std::string& item, std::uint32_t session) {
    auto& v = vectors_[item];
    if (v.empty() || v.back() != session) v.push_back(session);
  }

  std::map<std::string, std::vector<std::uint32_t>> sorted_vectors() const {
    return {vectors_.begin(), vectors_.end()};
  }

  bool operator==(const IknnIndex& o) const {
    return n_sessions_ == o.n_sessions_ && sorted_vectors() == o.sorted_vectors();
  }

 private:
  std::size_t n_sessions_ = 0;
  std::unordered_map<std::string, std::vector<std::uint32_t>> vectors_;
};

inline IknnIndex fit_iknn(const std::vector<Session>& train) {
  IknnIndex index(train.size());
  for (std::size_t j = 0; j < train.size(); ++j) {
    for (const auto& item : item_sequence(train[j].events)) {
      index.mark(item, static_cast<std::uint32_t>(j));
    }
  }
  return index;
}

inline std::vector<std::string> distinct_in_order(
    const std::vector<std::string>& items) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& i : items) {
    if (seen.insert(i).second) out.push_back(i);
  }
  return out;
}

inline RankedList score_baseline(const CooccurrenceModel& model,
                                 const ClickoutInstance& instance) {
  const auto& candidates = instance.impressions();
  std::vector<double> scores(candidates.size(), 0.0);
  const auto items = item_sequence(instance.history);
  if (!items.empty()) {
    std::vector<std::string> anchors;
    if (model.aggregation() == HistoryAggregation::kLastItem) {
      anchors.push_back(items.back());
    } else {
      anchors = distinct_in_order(items);
    }
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      for (const auto& a : anchors) scores[c] += model.weight(a, candidates[c]);
    }
  }
  return rank_by_scores(candidates, scores);
}

// Sums cosine similarities between each candidate and the distinct items of
// the history. A candidate seen in the history gets a self-similarity of 1.
inline RankedList score_baseline(const IknnIndex& index,
                                 const ClickoutInstance& instance) {
  const auto& candidates = instance.impressions();
  std::vector<double> scores(candidates.size(), 0.0);
  const auto anchors = distinct_in_order(item_sequence(instance.history));
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    for (const auto& a : anchors) scores[c] += index.cosine(a, candidates[c]);
  }
  return rank_by_scores(candidates, scores);
}

// --- Plain-text model files -------------------------------------------------

inline constexpr std::string_view kCooccurrenceMagic = "sessrank-cooccurrence";
inline constexpr std::string_view kIknnMagic = "sessrank-iknn";
inline constexpr int kBaselineFormatVersion = 1;

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw data_error("bad number '" + s + "' in model file");
  }
  return v;
}

inline std::size_t parse_count(const std::string& s) {
  const auto v = csv::parse_int(s);
  if (!v || *v < 0) throw data_error("bad count '" + s + "' in model file");
  return static_cast<std::size_t>(*v);
}

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string expect_line(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw data_error("truncated model file");
  return line;
}

inline std::size_t expect_count(std::istream& in, std::string_view key) {
  const auto fields = split_tabs(expect_line(in));
  if (fields.size() != 2 || fields[0] != key) {
    throw data_error("expected '" + std::string(key) + "' in model file");
  }
  return parse_count(fields[1]);
}

}  // namespace detail

inline void save_model(const CooccurrenceModel& model, std::ostream& out) {
  out << kCooccurrenceMagic << '\t' << kBaselineFormatVersion << '\n';
  out << "kind\t" << kind_name(model.kind()) << '\n';
  out << "aggregation\t"
      << (model.aggregation() == HistoryAggregation::kLastItem ? "last" : "all")
      << '\n';
  const auto counts = model.sorted_item_counts();
  out << "items\t" << counts.size() << '\n';
  for (const auto& [item, n] : counts) out << item << '\t' << n << '\n';
  const auto pairs = model.sorted_pairs();
  out << "pairs\t" << pairs.size() << '\n';
  for (const auto& [a, b, w] : pairs) {
    out << a << '\t' << b << '\t' << detail::format_double(w) << '\n';
  }
}

inline void save_model(const IknnIndex& index, std::ostream& out) {
  out << kIknnMagic << '\t' << kBaselineFormatVersion << '\n';
  out << "sessions\t" << index.n_sessions() << '\n';
  const auto vectors = index.sorted_vectors();
  out << "items\t" << vectors.size() << '\n';
  for (const auto& [item, sessions] : vectors) {
    out << item;
    for (auto s : sessions) out << '\t' << s;
    out << '\n';
  }
}

using BaselineModel = std::variant<CooccurrenceModel, IknnIndex>;

inline BaselineModel load_baseline(std::istream& in) {
  const auto header = detail::split_tabs(detail::expect_line(in));
  if (header.size() != 2 || header[1] != std::to_string(kBaselineFormatVersion)) {
    throw data_error("unsupported model file header");
  }
  if (header[0] == kCooccurrenceMagic) {
    const auto kind_f = detail::split_tabs(detail::expect_line(in));
    const auto agg_f = detail::split_tabs(detail::expect_line(in));
    if (kind_f.size() != 2 || agg_f.size() != 2) {
      throw data_error("malformed model header");
    }
    CooccurrenceKind kind;
    if (kind_f[1] == "ar") {
      kind = CooccurrenceKind::kAssociationRules;
    } else if (kind_f[1] == "mc") {
      kind = CooccurrenceKind::kMarkovChain;
    } else if (kind_f[1] == "sr") {
      kind = CooccurrenceKind::kSequentialRules;
    } else {
      throw data_error("unknown model kind " + kind_f[1]);
    }
    CooccurrenceModel model(kind, agg_f[1] == "all" ? HistoryAggregation::kAllItems
                                                    : HistoryAggregation::kLastItem);
    const auto n_items = detail::expect_count(in, "items");
    for (std::size_t i = 0; i < n_items; ++i) {
      const auto f = detail::split_tabs(detail::expect_line(in));
      if (f.size() != 2) throw data_error("malformed item row");
      model.count_item(f[0], detail::parse_count(f[1]));
    }
    const auto n_pairs = detail::expect_count(in, "pairs");
    for (std::size_t i = 0; i < n_pairs; ++i) {
      const auto f = detail::split_tabs(detail::expect_line(in));
      if (f.size() != 3) throw data_error("malformed pair row");
      model.add(f[0], f[1], detail::parse_double(f[2]));
    }
    return model;
  }
  if (header[0] == kIknnMagic) {
    IknnIndex index(detail::expect_count(in, "sessions"));
    const auto n_items = detail::expect_count(in, "items");
    for (std::size_t i = 0; i < n_items; ++i) {
      const auto f = detail::split_tabs(detail::expect_line(in));
      if (f.size() < 2) throw data_error("malformed incidence row");
      for (std::size_t k = 1; k < f.size(); ++k) {
        index.mark(f[0], static_cast<std::uint32_t>(detail::parse_count(f[k])));
      }
    }
    return index;
  }
  throw data_error("not a baseline model file");
}

inline BaselineModel load_baseline(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot read " + path.string());
  return load_baseline(in);
}

inline RankedList score_baseline(const BaselineModel& model,
                                 const ClickoutInstance& instance) {
  return std::visit([&](const auto& m) { return score_baseline(m, instance); },
                    model);
}

}  // namespace sessrank
