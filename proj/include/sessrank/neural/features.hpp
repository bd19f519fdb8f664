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
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "sessrank/ingest.hpp"
#include "sessrank/neural/vocabulary.hpp"
#include "sessrank/session.hpp"

namespace sessrank::neural {

// Categorical device and platform values seen in training, one-hot encoded
// downstream. Unseen values encode to -1 (all-zero slot).
class ContextEncoder {
 public:
  ContextEncoder() = default;
  ContextEncoder(std::vector<std::string> devices,
                 std::vector<std::string> platforms)
      : devices_(std::move(devices)), platforms_(std::move(platforms)) {}

  static ContextEncoder fit(const std::vector<Session>& train) {
    std::vector<std::string> devices;
    std::vector<std::string> platforms;
    for (const auto& s : train) {
      devices.push_back(s.device);
      platforms.push_back(s.platform);
    }
    for (auto* v : {&devices, &platforms}) {
      std::sort(v->begin(), v->end());
      v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    return ContextEncoder(std::move(devices), std::move(platforms));
  }

  const std::vector<std::string>& devices() const { return devices_; }
  const std::vector<std::string>& platforms() const { return platforms_; }
  bool empty() const { return devices_.empty() && platforms_.empty(); }

  int device_index(const std::string& d) const { return find(devices_, d); }
  int platform_index(const std::string& p) const { return find(platforms_, p); }

  bool operator==(const ContextEncoder&) const = default;

 private:
  static int find(const std::vector<std::string>& v, const std::string& x) {
    const auto it = std::lower_bound(v.begin(), v.end(), x);
    return it != v.end() && *it == x ? static_cast<int>(it - v.begin()) : -1;
  }

  std::vector<std::string> devices_;
  std::vector<std::string> platforms_;
};

// History of one clickout as model inputs; shared by all of its candidates.
struct EncodedHistory {
  std::vector<int> tokens;
  std::vector<std::vector<int>> properties;  // parallel to tokens
};

struct ContextIndex {
  int device = -1;
  int platform = -1;
  bool operator==(const ContextIndex&) const = default;
};

struct TrainingExample {
  std::shared_ptr<const EncodedHistory> history;
  int candidate = Vocabulary::kUnk;
  std::vector<int> candidate_properties;
  ContextIndex context;
  double label = 0.0;
};

// Turns instances into model inputs: vocabulary lookup, history truncation,
// property indices in the model's label space, context indices.
class FeatureEncoder {
 public:
  FeatureEncoder(const Vocabulary& vocab, std::size_t max_history_len)
      : vocab_(&vocab), max_history_len_(max_history_len) {}

  // `model_labels` is the property vocabulary the model was trained with;
  // labels of `metadata` missing from it are dropped.
  void set_metadata(const ItemMetadata* metadata,
                    const std::vector<std::string>& model_labels) {
    metadata_ = metadata;
    remap_.clear();
    if (metadata == nullptr) return;
    std::unordered_map<std::string, int> model_index;
    for (std::size_t i = 0; i < model_labels.size(); ++i) {
      model_index.emplace(model_labels[i], static_cast<int>(i));
    }
    for (const auto& label : metadata->labels()) {
      const auto it = model_index.find(label);
      remap_.push_back(it == model_index.end() ? -1 : it->second);
    }
  }

  void set_context(const ContextEncoder* context) { context_ = context; }

  const Vocabulary& vocabulary() const { return *vocab_; }

  std::vector<int> item_properties(const std::string& item) const {
    std::vector<int> out;
    if (metadata_ == nullptr) return out;
    if (const auto* props = metadata_->properties(item)) {
      for (int p : *props) {
        const int m = remap_[static_cast<std::size_t>(p)];
        if (m >= 0) out.push_back(m);
      }
      std::sort(out.begin(), out.end());
    }
    return out;
  }

  std::shared_ptr<const EncodedHistory> encode_history(
      const ClickoutInstance& instance) const {
    auto h = std::make_shared<EncodedHistory>();
    const auto& events = instance.history;
    const std::size_t start =
        events.size() > max_history_len_ ? events.size() - max_history_len_ : 0;
    for (std::size_t i = start; i < events.size(); ++i) {
      const auto& e = events[i];
      h->tokens.push_back(vocab_->index(e));
      h->properties.push_back(is_item_interaction(e.action)
                                  ? item_properties(e.reference)
                                  : std::vector<int>{});
    }
    return h;
  }

  ContextIndex encode_context(const ClickoutInstance& instance) const {
    if (context_ == nullptr) return {};
    return {context_->device_index(instance.device),
            context_->platform_index(instance.platform)};
  }

  TrainingExample encode(const ClickoutInstance& instance,
                         std::shared_ptr<const EncodedHistory> history,
                         const std::string& candidate, double label) const {
    return TrainingExample{std::move(history), vocab_->candidate_index(candidate),
                           item_properties(candidate), encode_context(instance),
                           label};
  }

 private:
  const Vocabulary* vocab_;
  std::size_t max_history_len_;
  const ItemMetadata* metadata_ = nullptr;
  std::vector<int> remap_;
  const ContextEncoder* context_ = nullptr;
};

struct ExampleSet {
  std::vector<TrainingExample> examples;
  // examples[offsets[i] .. offsets[i+1]) belong to the i-th kept instance.
  std::vector<std::size_t> offsets{0};
  std::size_t skipped = 0;  // instances without a usable truth

  std::size_t instance_count() const { return offsets.size() - 1; }
};

// One positive (the clicked item) and one negative per other impression for
// each instance. Instances without truth are skipped and counted.
inline ExampleSet make_examples(const std::vector<ClickoutInstance>& instances,
                                const FeatureEncoder& encoder) {
  ExampleSet set;
  for (const auto& inst : instances) {
    const auto& imps = inst.impressions();
    if (!inst.truth ||
        std::find(imps.begin(), imps.end(), *inst.truth) == imps.end()) {
      ++set.skipped;
      continue;
    }
    auto history = encoder.encode_history(inst);
    set.examples.push_back(encoder.encode(inst, history, *inst.truth, 1.0));
    for (const auto& item : imps) {
      if (item == *inst.truth) continue;
      set.examples.push_back(encoder.encode(inst, history, item, 0.0));
    }
    set.offsets.push_back(set.examples.size());
  }
  return set;
}

}  // namespace sessrank::neural
