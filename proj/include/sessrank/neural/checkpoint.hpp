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

#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sessrank/error.hpp"
#include "sessrank/io.hpp"
#include "sessrank/neural/ranker.hpp"

// Checkpoint layout, all integers and doubles little-endian:
//
//   magic "SRNNCKPT" | u32 version | u32 flags (bit 0 metadata, bit 1 context)
//   u64 V, E, H, P, E_meta, n_devices, n_platforms, mlp1, mlp2, max_history_len
//   tensors in ModelParameters::visit order, f64 each, sizes implied by shape
//   vocabulary: u64 n, then n x (string label, string reference)
//   devices, platforms, property labels: u64 n, then n strings
//
// Strings are u64 byte length followed by the bytes.

namespace sessrank::neural {

inline constexpr std::string_view kCheckpointMagic = "SRNNCKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw data_error("truncated checkpoint");
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  }
  return static_cast<T>(v);
}

inline void put_string(std::ostream& out, const std::string& s) {
  put_le<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& in) {
  const auto n = get_le<std::uint64_t>(in);
  if (n > (1ULL << 32)) throw data_error("corrupt checkpoint string");
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n))) {
    throw data_error("truncated checkpoint");
  }
  return s;
}

inline void put_strings(std::ostream& out, const std::vector<std::string>& v) {
  put_le<std::uint64_t>(out, v.size());
  for (const auto& s : v) put_string(out, s);
}

inline std::vector<std::string> get_strings(std::istream& in) {
  const auto n = get_le<std::uint64_t>(in);
  std::vector<std::string> v;
  for (std::uint64_t i = 0; i < n; ++i) v.push_back(get_string(in));
  return v;
}

}  // namespace detail

inline void save_checkpoint(const NeuralRanker& model, std::ostream& out) {
  const auto& s = model.params.shape;
  out.write(kCheckpointMagic.data(), kCheckpointMagic.size());
  detail::put_le<std::uint32_t>(out, kCheckpointVersion);
  detail::put_le<std::uint32_t>(
      out, (s.has_metadata() ? 1u : 0u) | (s.has_context() ? 2u : 0u));
  for (std::size_t v : {s.vocab_size, s.embedding_size, s.hidden_size,
                        s.n_properties, s.meta_size, s.n_devices, s.n_platforms,
                        s.mlp1, s.mlp2, model.max_history_len}) {
    detail::put_le<std::uint64_t>(out, v);
  }
  model.params.for_each([&](std::string_view, const Tensor& t) {
    for (double v : t.data) {
      detail::put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    }
  });
  detail::put_le<std::uint64_t>(out, model.vocab.pairs().size());
  for (const auto& [label, ref] : model.vocab.pairs()) {
    detail::put_string(out, label);
    detail::put_string(out, ref);
  }
  detail::put_strings(out, model.context.devices());
  detail::put_strings(out, model.context.platforms());
  detail::put_strings(out, model.property_labels);
}

inline NeuralRanker load_checkpoint(std::istream& in) {
  std::array<char, 8> magic;
  if (!in.read(magic.data(), magic.size()) ||
      std::string_view(magic.data(), magic.size()) != kCheckpointMagic) {
    throw data_error("not a model checkpoint");
  }
  const auto version = detail::get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw data_error("unsupported checkpoint version " + std::to_string(version));
  }
  const auto flags = detail::get_le<std::uint32_t>(in);
  ModelShape s;
  for (std::size_t* field : {&s.vocab_size, &s.embedding_size, &s.hidden_size,
                             &s.n_properties, &s.meta_size, &s.n_devices,
                             &s.n_platforms, &s.mlp1, &s.mlp2}) {
    *field = static_cast<std::size_t>(detail::get_le<std::uint64_t>(in));
  }
  NeuralRanker model;
  model.max_history_len =
      static_cast<std::size_t>(detail::get_le<std::uint64_t>(in));
  if (((flags & 1u) != 0) != s.has_metadata() ||
      ((flags & 2u) != 0) != s.has_context()) {
    throw data_error("checkpoint flags disagree with shape");
  }
  constexpr std::size_t kMaxDim = std::size_t{1} << 20;
  for (std::size_t d : {s.embedding_size, s.hidden_size, s.n_properties, s.meta_size,
                        s.n_devices, s.n_platforms, s.mlp1, s.mlp2}) {
    if (d > kMaxDim) throw data_error("implausible checkpoint shape");
  }
  if (s.vocab_size > (std::size_t{1} << 32) ||
      s.vocab_size * s.embedding_size > (std::size_t{1} << 31)) {
    throw data_error("implausible checkpoint shape");
  }
  model.params = ModelParameters(s);
  model.params.for_each([&](std::string_view, Tensor& t) {
    for (double& v : t.data) {
      v = std::bit_cast<double>(detail::get_le<std::uint64_t>(in));
    }
  });
  const auto n_pairs = detail::get_le<std::uint64_t>(in);
  std::vector<Vocabulary::Pair> pairs;
  for (std::uint64_t i = 0; i < n_pairs; ++i) {
    auto label = detail::get_string(in);
    auto ref = detail::get_string(in);
    pairs.emplace_back(std::move(label), std::move(ref));
  }
  model.vocab = Vocabulary(std::move(pairs));
  if (model.vocab.size() != s.vocab_size) {
    throw data_error("checkpoint vocabulary size mismatch");
  }
  auto devices = detail::get_strings(in);
  auto platforms = detail::get_strings(in);
  if (devices.size() != s.n_devices || platforms.size() != s.n_platforms) {
    throw data_error("checkpoint context size mismatch");
  }
  model.context = ContextEncoder(std::move(devices), std::move(platforms));
  model.property_labels = detail::get_strings(in);
  if (model.property_labels.size() != s.n_properties) {
    throw data_error("checkpoint property vocabulary size mismatch");
  }
  return model;
}

inline void save_checkpoint(const NeuralRanker& model,
                            const std::filesystem::path& path) {
  write_atomically(path, [&](std::ostream& out) { save_checkpoint(model, out); },
                   /*binary=*/true);
}

inline NeuralRanker load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot read " + path.string());
  return load_checkpoint(in);
}

}  // namespace sessrank::neural
