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
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sessrank/error.hpp"

namespace sessrank {

// Action vocabulary of the challenge logs. Labels not in this list parse to
// kOther and keep their raw spelling in SessionEvent::other_action.
enum class ActionType {
  kClickoutItem,
  kInteractionItemRating,
  kInteractionItemDeals,
  kInteractionItemImage,
  kInteractionItemInfo,
  kSearchForItem,
  kSearchForDestination,
  kSearchForPoi,
  kChangeOfSortOrder,
  kFilterSelection,
  kOther,
};

namespace detail {

struct ActionSpelling {
  ActionType type;
  std::string_view label;
};

// First entry per type is the canonical spelling used when writing.
inline constexpr std::array<ActionSpelling, 11> kActionSpellings{{
    {ActionType::kClickoutItem, "clickout item"},
    {ActionType::kInteractionItemRating, "interaction item rating"},
    {ActionType::kInteractionItemRating, "interaction item ratings"},
    {ActionType::kInteractionItemDeals, "interaction item deals"},
    {ActionType::kInteractionItemImage, "interaction item image"},
    {ActionType::kInteractionItemInfo, "interaction item info"},
    {ActionType::kSearchForItem, "search for item"},
    {ActionType::kSearchForDestination, "search for destination"},
    {ActionType::kSearchForPoi, "search for poi"},
    {ActionType::kChangeOfSortOrder, "change of sort order"},
    {ActionType::kFilterSelection, "filter selection"},
}};

}  // namespace detail

inline ActionType parse_action(std::string_view label) {
  for (const auto& s : detail::kActionSpellings) {
    if (s.label == label) return s.type;
  }
  return ActionType::kOther;
}

inline std::string_view action_label(ActionType type) {
  for (const auto& s : detail::kActionSpellings) {
    if (s.type == type) return s.label;
  }
  return "other";
}

// True for the actions that reference an accommodation: the four
// "interaction item" kinds, item search and clickout.
inline bool is_item_interaction(ActionType type) {
  switch (type) {
    case ActionType::kClickoutItem:
    case ActionType::kInteractionItemRating:
    case ActionType::kInteractionItemDeals:
    case ActionType::kInteractionItemImage:
    case ActionType::kInteractionItemInfo:
    case ActionType::kSearchForItem:
      return true;
    default:
      return false;
  }
}

struct SessionEvent {
  std::int64_t step = 1;
  std::int64_t timestamp = 0;
  ActionType action = ActionType::kOther;
  std::string other_action;  // raw label, only set when action == kOther
  std::string reference;
  std::string city;
  std::vector<std::string> current_filters;
  // Non-empty exactly for clickouts; prices parallel impressions.
  std::vector<std::string> impressions;
  std::vector<std::int64_t> prices;

  // Label as it appears in the log.
  std::string label() const {
    return action == ActionType::kOther ? other_action
                                        : std::string(action_label(action));
  }

  bool operator==(const SessionEvent&) const = default;
};

struct Session {
  std::string session_id;
  std::string user_id;
  std::string device;
  std::string platform;
  std::vector<SessionEvent> events;

  bool operator==(const Session&) const = default;
};

// A clickout cut out of its session: everything before it, the clickout
// itself and (unless masked) the clicked accommodation.
struct ClickoutInstance {
  std::string session_id;
  std::string user_id;
  std::string device;
  std::string platform;
  std::vector<SessionEvent> history;
  SessionEvent clickout;
  std::optional<std::string> truth;

  const std::vector<std::string>& impressions() const {
    return clickout.impressions;
  }
};

struct CorpusStats {
  std::size_t n_sessions = 0;
  std::size_t n_users = 0;
  std::size_t n_actions = 0;
  double mean_actions_per_session = 0.0;
  double std_actions_per_session = 0.0;
  std::size_t max_actions_per_session = 0;
  double clickout_last_ratio = 0.0;
  double mean_session_duration_seconds = 0.0;
  double filter_usage_ratio = 0.0;
};

// Descriptive statistics over a corpus. All accumulations are integer so the
// result does not depend on session order.
inline CorpusStats compute_stats(const std::vector<Session>& corpus) {
  if (corpus.empty()) throw data_error("empty corpus");

  CorpusStats stats;
  std::set<std::string> users;
  __int128 sum_len = 0;
  __int128 sum_len_sq = 0;
  __int128 sum_duration = 0;
  std::size_t clickout_last = 0;
  std::size_t filtering = 0;

  for (const auto& s : corpus) {
    users.insert(s.user_id);
    const auto len = static_cast<std::int64_t>(s.events.size());
    sum_len += len;
    sum_len_sq += static_cast<__int128>(len) * len;
    stats.max_actions_per_session =
        std::max(stats.max_actions_per_session, s.events.size());
    if (s.events.empty()) continue;
    sum_duration += s.events.back().timestamp - s.events.front().timestamp;
    if (s.events.back().action == ActionType::kClickoutItem) ++clickout_last;
    const bool filtered = std::any_of(
        s.events.begin(), s.events.end(), [](const SessionEvent& e) {
          return e.action == ActionType::kFilterSelection ||
                 e.action == ActionType::kChangeOfSortOrder;
        });
    if (filtered) ++filtering;
  }

  const auto n = static_cast<__int128>(corpus.size());
  const double nd = static_cast<double>(corpus.size());
  stats.n_sessions = corpus.size();
  stats.n_users = users.size();
  stats.n_actions = static_cast<std::size_t>(sum_len);
  stats.mean_actions_per_session = static_cast<double>(sum_len) / nd;
  // Population variance, exact numerator: (n*sum(x^2) - sum(x)^2) / n^2.
  const __int128 var_num = n * sum_len_sq - sum_len * sum_len;
  stats.std_actions_per_session =
      std::sqrt(static_cast<double>(var_num)) / nd;
  stats.clickout_last_ratio = static_cast<double>(clickout_last) / nd;
  stats.mean_session_duration_seconds = static_cast<double>(sum_duration) / nd;
  stats.filter_usage_ratio = static_cast<double>(filtering) / nd;
  return stats;
}

// One instance per clickout event (or only the last one of each session).
// An empty reference means the clickout was masked: truth stays unset.
inline std::vector<ClickoutInstance> extract_clickouts(
    const std::vector<Session>& corpus, bool mask_last_only) {
  std::vector<ClickoutInstance> out;
  for (const auto& s : corpus) {
    std::vector<std::size_t> clicks;
    for (std::size_t i = 0; i < s.events.size(); ++i) {
      if (s.events[i].action == ActionType::kClickoutItem) clicks.push_back(i);
    }
    if (mask_last_only && clicks.size() > 1) {
      clicks.erase(clicks.begin(), clicks.end() - 1);
    }
    for (std::size_t i : clicks) {
      const auto& e = s.events[i];
      ClickoutInstance inst;
      inst.session_id = s.session_id;
      inst.user_id = s.user_id;
      inst.device = s.device;
      inst.platform = s.platform;
      inst.history.assign(s.events.begin(),
                          s.events.begin() + static_cast<std::ptrdiff_t>(i));
      inst.clickout = e;
      if (!e.reference.empty()) inst.truth = e.reference;
      out.push_back(std::move(inst));
    }
  }
  return out;
}

}  // namespace sessrank
