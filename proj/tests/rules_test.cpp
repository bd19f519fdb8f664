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
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace sessrank {
namespace {

using testing::click;
using testing::event;
using testing::instance;

RankedList list_of(std::vector<std::string> items) { return identity_order(items); }

TEST(InteractionSetTest, KeepsLatestStepOfShownItems) {
  const auto inst = instance({event(1, ActionType::kInteractionItemImage, "A"),
                              event(2, ActionType::kSearchForDestination, "Rome"),
                              event(3, ActionType::kInteractionItemInfo, "B"),
                              event(4, ActionType::kInteractionItemImage, "Z"),
                              event(5, ActionType::kInteractionItemRating, "D")},
                             {"A", "B", "C", "D"}, "B");
  const auto iset = build_interaction_set(inst);
  EXPECT_EQ(iset, (InteractionSet{{"A", 1}, {"B", 3}, {"D", 5}}));
}

TEST(InteractionSetTest, RepeatedInteractionUsesMostRecent) {
  const auto inst = instance({event(1, ActionType::kInteractionItemImage, "B"),
                              event(2, ActionType::kInteractionItemDeals, "B"),
                              event(3, ActionType::kSearchForPoi, "x"),
                              event(4, ActionType::kInteractionItemImage, "B")},
                             {"A", "B"}, "B");
  EXPECT_EQ(build_interaction_set(inst), (InteractionSet{{"B", 4}}));
}

TEST(InteractionSetTest, EmptyHistoryAndNonItemActions) {
  EXPECT_TRUE(build_interaction_set(instance({}, {"A"}, "A")).empty());
  EXPECT_TRUE(build_interaction_set(
                  instance({event(1, ActionType::kSearchForDestination, "A")}, {"A"}, "A"))
                  .empty());
}

TEST(InteractionSetTest, IgnoresEventsAfterTheClickout) {
  const std::vector<Session> corpus{testing::session(
      "s", {click(1, "A", {"A", "B"}), event(2, ActionType::kInteractionItemImage, "B")})};
  const auto inst = extract_clickouts(corpus, false);
  ASSERT_EQ(inst.size(), 1u);
  EXPECT_TRUE(build_interaction_set(inst[0]).empty());
}

TEST(RuleRerankTest, MostRecentFirst) {
  const auto r = rule_rerank(list_of({"A", "B", "C", "D"}), {{"B", 3}, {"D", 5}});
  EXPECT_EQ(r.items, (std::vector<std::string>{"D", "B", "A", "C"}));
}

TEST(RuleRerankTest, EmptySetLeavesOrder) {
  const auto base = list_of({"C", "A", "B"});
  EXPECT_EQ(rule_rerank(base, {}).items, base.items);
}

TEST(RuleRerankTest, EqualStepsKeepBaseOrder) {
  const auto r = rule_rerank(list_of({"A", "B", "C"}), {{"C", 2}, {"B", 2}});
  EXPECT_EQ(r.items, (std::vector<std::string>{"B", "C", "A"}));
}

TEST(RuleRerankTest, UnknownItemIsDataError) {
  try {
    rule_rerank(list_of({"A"}), {{"Q", 1}});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
  }
}

TEST(RuleRerankTest, AgreesWithSortingOnRandomInstances) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 500; ++trial) {
    const auto inst = testing::random_instance(gen);
    auto base_items = inst.impressions();
    std::shuffle(base_items.begin(), base_items.end(), gen);
    const auto base = list_of(base_items);
    const auto iset = build_interaction_set(inst);
    const auto out = rule_rerank(base, iset);

    std::vector<std::pair<std::int64_t, std::string>> by_recency;
    for (const auto& [item, step] : iset) by_recency.emplace_back(step, item);
    std::sort(by_recency.begin(), by_recency.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::string> expected;
    for (const auto& [step, item] : by_recency) expected.push_back(item);
    for (const auto& item : base_items) {
      if (!iset.contains(item)) expected.push_back(item);
    }
    EXPECT_EQ(out.items, expected);
    EXPECT_EQ(rule_rerank(out, iset).items, out.items);
  }
}

}  // namespace
}  // namespace sessrank
