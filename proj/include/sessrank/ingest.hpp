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
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sessrank/csv.hpp"
#include "sessrank/error.hpp"
#include "sessrank/io.hpp"
#include "sessrank/rng.hpp"
#include "sessrank/session.hpp"

namespace sessrank {

inline constexpr std::string_view kSessionHeader =
    "user_id,session_id,timestamp,step,action_type,reference,platform,city,"
    "device,current_filters,impressions,prices";

inline constexpr std::string_view kMetadataHeader = "item_id,properties";

// Maximum impression list length shown at a clickout.
inline constexpr std::size_t kMaxImpressions = 25;

// One CSV record of the session log, fields as read.
struct RawRow {
  std::string user_id;
  std::string session_id;
  std::string timestamp;
  std::string step;
  std::string action_type;
  std::string reference;
  std::string platform;
  std::string city;
  std::string device;
  std::string current_filters;
  std::string impressions;
  std::string prices;
};

struct Reject {
  std::size_t line = 0;  // 1-based line number in the file
  std::string reason;
};

struct ParseResult {
  std::vector<Session> sessions;
  std::vector<Reject> rejects;
};

namespace detail {

inline RawRow to_raw_row(std::vector<std::string>&& f) {
  if (f.size() != 12) {
    throw data_error("expected 12 fields, got " + std::to_string(f.size()));
  }
  return RawRow{std::move(f[0]), std::move(f[1]), std::move(f[2]),
                std::move(f[3]), std::move(f[4]), std::move(f[5]),
                std::move(f[6]), std::move(f[7]), std::move(f[8]),
                std::move(f[9]), std::move(f[10]), std::move(f[11])};
}

inline SessionEvent to_event(const RawRow& row) {
  SessionEvent e;
  const auto ts = csv::parse_int(row.timestamp);
  if (!ts) throw data_error("unparseable timestamp '" + row.timestamp + "'");
  const auto step = csv::parse_int(row.step);
  if (!step || *step < 1) throw data_error("unparseable step '" + row.step + "'");
  e.timestamp = *ts;
  e.step = *step;
  e.action = parse_action(row.action_type);
  if (e.action == ActionType::kOther) e.other_action = row.action_type;
  e.reference = row.reference;
  e.city = row.city;
  e.current_filters = csv::split_list(row.current_filters);
  e.impressions = csv::split_list(row.impressions);
  for (const auto& p : csv::split_list(row.prices)) {
    const auto price = csv::parse_int(p);
    if (!price || *price < 0) throw data_error("unparseable price '" + p + "'");
    e.prices.push_back(*price);
  }
  if (e.action == ActionType::kClickoutItem) {
    if (e.impressions.empty()) throw data_error("clickout without impressions");
    if (e.impressions.size() > kMaxImpressions) {
      throw data_error("more than 25 impressions");
    }
    if (e.prices.size() != e.impressions.size()) {
      throw data_error("impressions/prices length mismatch");
    }
  } else if (!e.impressions.empty() || !e.prices.empty()) {
    throw data_error("impressions on a non-clickout action");
  }
  return e;
}

// Orders events by step; when steps are not 1..n or timestamps go backwards,
// re-indexes the events in timestamp order.
inline void normalize_steps(std::vector<SessionEvent>& events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const auto& a, const auto& b) { return a.step < b.step; });
  bool ok = true;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].step != static_cast<std::int64_t>(i + 1) ||
        (i > 0 && events[i].timestamp < events[i - 1].timestamp)) {
      ok = false;
      break;
    }
  }
  if (ok) return;
  std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    return a.timestamp < b.timestamp;
  });
  for (std::size_t i = 0; i < events.size(); ++i) {
    events[i].step = static_cast<std::int64_t>(i + 1);
  }
}

}  // namespace detail

// Reads a challenge-format session log. Malformed rows are skipped and
// reported; sessions keep their first-appearance order.
inline ParseResult parse_sessions(std::istream& in) {
  ParseResult result;
  std::string line;
  if (!std::getline(in, line)) throw data_error("missing header line");

  std::unordered_map<std::string, std::size_t> index;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    try {
      auto fields = csv::split_line(line);
      if (!fields) throw data_error("unterminated quoted field");
      const RawRow row = detail::to_raw_row(std::move(*fields));
      SessionEvent event = detail::to_event(row);
      auto [it, inserted] =
          index.try_emplace(row.session_id, result.sessions.size());
      if (inserted) {
        result.sessions.push_back(
            Session{row.session_id, row.user_id, row.device, row.platform, {}});
      }
      result.sessions[it->second].events.push_back(std::move(event));
    } catch (const Error& e) {
      result.rejects.push_back(Reject{line_no, e.what()});
    }
  }
  for (auto& s : result.sessions) detail::normalize_steps(s.events);
  return result;
}

inline ParseResult parse_sessions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot read " + path.string());
  return parse_sessions(in);
}

inline void write_sessions(const std::vector<Session>& sessions,
                           std::ostream& out) {
  out << kSessionHeader << '\n';
  for (const auto& s : sessions) {
    for (const auto& e : s.events) {
      out << csv::quote(s.user_id) << ',' << csv::quote(s.session_id) << ','
          << e.timestamp << ',' << e.step << ',' << csv::quote(e.label()) << ','
          << csv::quote(e.reference) << ',' << csv::quote(s.platform) << ','
          << csv::quote(e.city) << ',' << csv::quote(s.device) << ','
          << csv::quote(csv::join(e.current_filters)) << ','
          << csv::quote(csv::join(e.impressions)) << ','
          << csv::join(e.prices) << '\n';
    }
  }
}

inline void write_sessions(const std::vector<Session>& sessions,
                           const std::filesystem::path& path) {
  write_atomically(path, [&](std::ostream& out) { write_sessions(sessions, out); });
}

inline void write_rejects(const std::vector<Reject>& rejects,
                          std::ostream& out) {
  for (const auto& r : rejects) out << r.line << ": " << r.reason << '\n';
}

// Accommodation properties, as indices into a label vocabulary built in
// first-seen order.
class ItemMetadata {
 public:
  std::size_t vocabulary_size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t item_count() const { return items_.size(); }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Sorted property indices of an item; nullptr when the item is unknown.
  const std::vector<int>* properties(const std::string& item) const {
    const auto it = items_.find(item);
    return it == items_.end() ? nullptr : &it->second;
  }

  std::vector<std::string> property_labels(const std::string& item) const {
    std::vector<std::string> out;
    if (const auto* props = properties(item)) {
      for (int p : *props) out.push_back(labels_[static_cast<std::size_t>(p)]);
    }
    return out;
  }

  int label_index(const std::string& label) const {
    const auto it = label_index_.find(label);
    return it == label_index_.end() ? -1 : it->second;
  }

  int intern(const std::string& label) {
    auto [it, inserted] =
        label_index_.try_emplace(label, static_cast<int>(labels_.size()));
    if (inserted) labels_.push_back(label);
    return it->second;
  }

  // Replaces any previous entry for the item.
  void set(const std::string& item, const std::vector<std::string>& labels) {
    std::vector<int> props;
    for (const auto& l : labels) props.push_back(intern(l));
    std::sort(props.begin(), props.end());
    props.erase(std::unique(props.begin(), props.end()), props.end());
    items_[item] = std::move(props);
  }

  void warn(std::string message) { warnings_.push_back(std::move(message)); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> label_index_;
  std::unordered_map<std::string, std::vector<int>> items_;
  std::vector<std::string> warnings_;
};

inline ItemMetadata parse_metadata(std::istream& in) {
  ItemMetadata meta;
  std::string line;
  if (!std::getline(in, line)) throw data_error("missing metadata header");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = csv::split_line(line);
    if (!fields || fields->size() != 2) {
      meta.warn("line " + std::to_string(line_no) + ": malformed row skipped");
      continue;
    }
    const std::string& item = (*fields)[0];
    if (meta.properties(item) != nullptr) {
      meta.warn("line " + std::to_string(line_no) + ": duplicate item_id " +
                item + ", last row wins");
    }
    meta.set(item, csv::split_list((*fields)[1]));
  }
  return meta;
}

inline ItemMetadata parse_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot read " + path.string());
  return parse_metadata(in);
}

// Writes the listed items, in the given order.
inline void write_metadata(const ItemMetadata& meta,
                           const std::vector<std::string>& items,
                           std::ostream& out) {
  out << kMetadataHeader << '\n';
  for (const auto& item : items) {
    out << csv::quote(item) << ','
        << csv::quote(csv::join(meta.property_labels(item))) << '\n';
  }
}

struct Split {
  std::vector<Session> train;
  std::vector<Session> validation;
};

// Whole-session random split. Both halves keep the corpus order.
inline Split split_train_validation(const std::vector<Session>& corpus,
                                    double holdout_fraction,
                                    std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw usage_error("holdout_fraction must lie in (0, 1)");
  }
  if (corpus.empty()) throw data_error("empty corpus");
  const std::size_t n = corpus.size();
  auto n_valid = static_cast<std::size_t>(
      std::llround(holdout_fraction * static_cast<double>(n)));
  if (n >= 2) n_valid = std::clamp<std::size_t>(n_valid, 1, n - 1);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<bool> held(n, false);
  for (std::size_t i = 0; i < n_valid; ++i) held[order[i]] = true;

  Split split;
  for (std::size_t i = 0; i < n; ++i) {
    (held[i] ? split.validation : split.train).push_back(corpus[i]);
  }
  return split;
}

}  // namespace sessrank
