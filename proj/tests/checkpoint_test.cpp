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

#include <cstring>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "neural_util.hpp"
#include "test_util.hpp"

namespace sessrank::neural {
namespace {

NeuralRanker sample_ranker(bool metadata, bool context) {
  const auto c = testing::make_tiny_case(21, metadata, context);
  NeuralRanker r;
  r.params = c.params;
  std::vector<Vocabulary::Pair> pairs;
  for (std::size_t i = 2; i < c.params.shape.vocab_size; ++i) {
    pairs.emplace_back("interaction item image", "item " + std::to_string(i));
  }
  r.vocab = Vocabulary(pairs);
  std::vector<std::string> devices, platforms;
  for (std::size_t i = 0; i < c.params.shape.n_devices; ++i) devices.push_back("d" + std::to_string(i));
  for (std::size_t i = 0; i < c.params.shape.n_platforms; ++i) platforms.push_back("p" + std::to_string(i));
  r.context = ContextEncoder(devices, platforms);
  for (std::size_t i = 0; i < c.params.shape.n_properties; ++i) {
    r.property_labels.push_back("prop " + std::to_string(i));
  }
  r.max_history_len = 17;
  return r;
}

std::string bytes_of(const NeuralRanker& r) {
  std::ostringstream out(std::ios::binary);
  save_checkpoint(r, out);
  return out.str();
}

NeuralRanker from_bytes(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return load_checkpoint(in);
}

void expect_data_error(const std::string& bytes) {
  try {
    from_bytes(bytes);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
  }
}

TEST(CheckpointTest, RoundTripIsBitExact) {
  for (bool metadata : {false, true}) {
    for (bool context : {false, true}) {
      const auto r = sample_ranker(metadata, context);
      const auto bytes = bytes_of(r);
      const auto back = from_bytes(bytes);
      EXPECT_TRUE(back == r);
      EXPECT_EQ(bytes_of(back), bytes);
    }
  }
}

TEST(CheckpointTest, HeaderLayout) {
  const auto r = sample_ranker(true, false);
  const auto bytes = bytes_of(r);
  EXPECT_EQ(bytes.substr(0, 8), "SRNNCKPT");
  std::uint32_t version = 0, flags = 0;
  std::memcpy(&version, bytes.data() + 8, 4);
  std::memcpy(&flags, bytes.data() + 12, 4);
  EXPECT_EQ(version, 1u);
  EXPECT_EQ(flags, 1u);
  std::uint64_t vocab = 0;
  std::memcpy(&vocab, bytes.data() + 16, 8);
  EXPECT_EQ(vocab, r.params.shape.vocab_size);
}

TEST(CheckpointTest, RejectsCorruptInput) {
  const auto bytes = bytes_of(sample_ranker(true, true));
  expect_data_error("");
  expect_data_error("NOTACKPT" + bytes.substr(8));
  expect_data_error(bytes.substr(0, bytes.size() / 2));
  auto wrong_version = bytes;
  wrong_version[8] = 9;
  expect_data_error(wrong_version);
  auto wrong_flags = bytes;
  wrong_flags[12] = 0;
  expect_data_error(wrong_flags);
}

TEST(CheckpointTest, FileRoundTripLeavesNoTemporary) {
  const auto dir = std::filesystem::temp_directory_path() / "sessrank_ckpt_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "model.bin";
  const auto r = sample_ranker(false, true);
  save_checkpoint(r, path);
  EXPECT_TRUE(load_checkpoint(path) == r);
  EXPECT_FALSE(std::filesystem::exists(dir / "model.bin.tmp"));
  std::filesystem::remove_all(dir);
}

TEST(CheckpointTest, LoadedModelScoresIdentically) {
  const auto r = sample_ranker(false, false);
  const auto back = from_bytes(bytes_of(r));
  const auto inst = testing::instance(
      {testing::event(1, ActionType::kInteractionItemImage, "item 3")},
      {"item 2", "item 3", "item 4", "other"}, "item 3");
  const auto a = score_neural(r, inst);
  const auto b = score_neural(back, inst);
  EXPECT_EQ(a.items, b.items);
  EXPECT_EQ(a.scores, b.scores);
}

}  // namespace
}  // namespace sessrank::neural
