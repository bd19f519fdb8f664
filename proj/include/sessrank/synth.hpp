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
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

#include "sessrank/error.hpp"
#include "sessrank/ingest.hpp"
#include "sessrank/rng.hpp"
#include "sessrank/session.hpp"

namespace sessrank {

struct SynthConfig {
  std::size_t n_sessions = 1000;
  std::size_t n_items = 500;
  double mean_session_len = 6.0;  // events per session, clickout included
  // Probability that the clicked item was interacted with earlier on.
  double interact_then_click_prob = 0.5;
  std::uint64_t seed = 1;
  // Probability of an earlier interaction with the clicked item's fixed
  // partner item (never displayed alongside it).
  double cooccurrence_prob = 0.5;
  // Probability, in sessions with the planted interaction, of an earlier
  // interaction with another displayed item.
  double distractor_prob = 0.0;
  std::size_t n_properties = 20;
  std::size_t impressions = kMaxImpressions;
  std::int64_t start_timestamp = 1541030400;  // 2018-11-01T00:00:00Z
};

struct SynthCorpus {
  std::vector<Session> sessions;
  ItemMetadata metadata;
  std::vector<std::string> items;  // popularity order, most popular first
};

namespace detail {

inline const std::vector<std::string>& synth_devices() {
  static const std::vector<std::string> v{"desktop", "mobile"};
  return v;
}
inline const std::vector<std::string>& synth_platforms() {
  static const std::vector<std::string> v{"US", "DE", "BR", "JP", "FR"};
  return v;
}

inline void validate(const SynthConfig& c) {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (c.n_sessions == 0) throw usage_error("n_sessions must be positive");
  if (c.impressions == 0 || c.impressions > kMaxImpressions) {
    throw usage_error("impressions must lie in [1, 25]");
  }
  // The clicked item's partner is kept off the list.
  if (c.n_items < c.impressions + 1) {
    throw usage_error("n_items must exceed the impression list length");
  }
  if (!(c.mean_session_len >= 1.0)) {
    throw usage_error("mean_session_len must be at least 1");
  }
  if (!prob(c.interact_then_click_prob) || !prob(c.cooccurrence_prob) ||
      !prob(c.distractor_prob)) {
    throw usage_error("probabilities must lie in [0, 1]");
  }
}

}  // namespace detail

// Sessions each ending in a clickout on a Zipf(1)-popular item shown at a
// uniformly random position of a list of otherwise uniformly drawn items.
// Planted structure: with interact_then_click_prob the clicked item was
// interacted with before; with cooccurrence_prob its partner item was.
// Filler events are non-item actions or interactions with items that are
// not on the displayed list. Desktop sessions run longer than mobile ones.
inline SynthCorpus generate(const SynthConfig& config) {
  detail::validate(config);
  Rng rng(config.seed);
  SynthCorpus corpus;
  const std::size_t n = config.n_items;

  for (std::size_t i = 0; i < n; ++i) corpus.items.push_back(std::to_string(100000 + i));

  std::vector<double> cumulative(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += 1.0 / static_cast<double>(i + 1);
    cumulative[i] = total;
  }
  auto popular_item = [&] {
    const double u = rng.uniform() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - cumulative.begin(), static_cast<std::ptrdiff_t>(n - 1)));
  };

  // Partners follow a random cycle over all items, so partner(i) != i.
  std::vector<std::size_t> cycle(n);
  for (std::size_t i = 0; i < n; ++i) cycle[i] = i;
  rng.shuffle(cycle);
  std::vector<std::size_t> partner(n);
  for (std::size_t k = 0; k < n; ++k) partner[cycle[k]] = cycle[(k + 1) % n];

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> labels;
    const std::size_t count = 1 + rng.below(5);
    for (std::size_t k = 0; k < count && config.n_properties > 0; ++k) {
      labels.push_back("property " + std::to_string(rng.below(config.n_properties)));
    }
    corpus.metadata.set(corpus.items[i], labels);
  }

  static const std::vector<std::string> destinations{
      "Amsterdam, Netherlands", "Lisbon, Portugal", "Rio de Janeiro, Brazil",
      "Tokyo, Japan", "Chicago, USA"};
  static const std::vector<std::string> filters{
      "Free WiFi", "Swimming Pool", "4 Star", "Breakfast Included", "Parking"};
  static const std::vector<std::string> sorts{
      "price only", "distance only", "rating only", "interaction sort button"};

  std::int64_t clock = config.start_timestamp;
  for (std::size_t j = 0; j < config.n_sessions; ++j) {
    Session s;
    s.session_id = "s" + std::to_string(j);
    s.user_id = "u" + std::to_string(rng.below(config.n_sessions));
    const std::size_t device = rng.below(2);
    s.device = detail::synth_devices()[device];
    s.platform = detail::synth_platforms()[rng.below(5)];
    const std::string city = destinations[rng.below(destinations.size())];

    const std::size_t target = popular_item();
    std::vector<std::size_t> shown{target};
    std::unordered_set<std::size_t> used{target, partner[target]};
    while (shown.size() < config.impressions) {
      const std::size_t candidate = rng.below(n);
      if (used.insert(candidate).second) shown.push_back(candidate);
    }
    const std::size_t slot = rng.below(shown.size());
    std::swap(shown[0], shown[slot]);

    const double factor = device == 0 ? 1.25 : 0.75;
    // Planted events count towards the session length.
    const double planted = config.interact_then_click_prob *
                               (1.0 + config.distractor_prob) +
                           config.cooccurrence_prob;
    const auto mean_pre = static_cast<std::size_t>(std::llround(
        std::max(0.0, (config.mean_session_len - 1.0) * factor - planted)));
    const std::size_t n_filler = rng.below(2 * mean_pre + 1);

    // Pre-clickout events as (action, item index or npos for non-item).
    struct Planned {
      ActionType action;
      std::size_t item;
      std::string text;
    };
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    static constexpr ActionType kItemActions[] = {
        ActionType::kInteractionItemImage, ActionType::kInteractionItemInfo,
        ActionType::kInteractionItemRating, ActionType::kInteractionItemDeals,
        ActionType::kSearchForItem};
    auto item_action = [&] { return kItemActions[rng.below(5)]; };

    std::vector<Planned> pre;
    for (std::size_t k = 0; k < n_filler; ++k) {
      const double u = rng.uniform();
      if (u < 0.3 && used.size() < n) {
        std::size_t other;
        do {
          other = rng.below(n);
        } while (used.contains(other));
        pre.push_back({item_action(), other, {}});
      } else if (u < 0.55) {
        pre.push_back({ActionType::kSearchForDestination, kNone, city});
      } else if (u < 0.7) {
        pre.push_back({ActionType::kFilterSelection, kNone,
                       filters[rng.below(filters.size())]});
      } else if (u < 0.8) {
        pre.push_back({ActionType::kChangeOfSortOrder, kNone,
                       sorts[rng.below(sorts.size())]});
      } else {
        pre.push_back({ActionType::kSearchForPoi, kNone,
                       "poi " + std::to_string(rng.below(50))});
      }
    }
    auto insert_at = [&](std::size_t pos, Planned ev) {
      pre.insert(pre.begin() + static_cast<std::ptrdiff_t>(pos), std::move(ev));
    };
    if (rng.uniform() < config.cooccurrence_prob) {
      insert_at(rng.below(pre.size() + 1), {item_action(), partner[target], {}});
    }
    if (rng.uniform() < config.interact_then_click_prob) {
      std::size_t lower = 0;
      if (shown.size() > 1 && rng.uniform() < config.distractor_prob) {
        std::size_t other;
        do {
          other = shown[rng.below(shown.size())];
        } while (other == target);
        const std::size_t pos = rng.below(pre.size() + 1);
        insert_at(pos, {item_action(), other, {}});
        lower = pos + 1;
      }
      const std::size_t pos = lower + rng.below(pre.size() + 1 - lower);
      insert_at(pos, {item_action(), target, {}});
    }

    clock += static_cast<std::int64_t>(60 + rng.below(600));
    std::vector<std::string> active_filters;
    std::int64_t step = 1;
    for (const auto& p : pre) {
      SessionEvent e;
      e.step = step++;
      e.timestamp = clock;
      clock += static_cast<std::int64_t>(1 + rng.below(60));
      e.action = p.action;
      e.reference = p.item == kNone ? p.text : corpus.items[p.item];
      e.city = city;
      if (p.action == ActionType::kFilterSelection) active_filters = {p.text};
      e.current_filters = active_filters;
      s.events.push_back(std::move(e));
    }
    SessionEvent click;
    click.step = step;
    click.timestamp = clock;
    clock += static_cast<std::int64_t>(1 + rng.below(60));
    click.action = ActionType::kClickoutItem;
    click.reference = corpus.items[target];
    click.city = city;
    click.current_filters = active_filters;
    for (std::size_t item : shown) {
      click.impressions.push_back(corpus.items[item]);
      click.prices.push_back(static_cast<std::int64_t>(30 + rng.below(271)));
    }
    s.events.push_back(std::move(click));
    corpus.sessions.push_back(std::move(s));
  }
  return corpus;
}

// Writes <dir>/sessions.csv and <dir>/metadata.csv.
inline void write_corpus(const SynthCorpus& corpus,
                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_sessions(corpus.sessions, dir / "sessions.csv");
  write_atomically(dir / "metadata.csv", [&](std::ostream& out) {
    write_metadata(corpus.metadata, corpus.items, out);
  });
}

}  // namespace sessrank
