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

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include "sessrank/error.hpp"

namespace sessrank {

// Flat `key = value` text configuration. Blank lines and lines starting with
// '#' are ignored; a repeated key overrides the earlier one.
class KeyValues {
 public:
  static KeyValues parse(std::istream& in) {
    KeyValues kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto body = trim(line);
      if (body.empty() || body.front() == '#') continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos) {
        throw usage_error("config line " + std::to_string(line_no) +
                          ": expected key = value");
      }
      const auto key = trim(body.substr(0, eq));
      if (key.empty()) {
        throw usage_error("config line " + std::to_string(line_no) + ": empty key");
      }
      kv.values_[key] = trim(body.substr(eq + 1));
    }
    return kv;
  }

  static KeyValues load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("cannot read config " + path.string());
    return parse(in);
  }

  bool has(const std::string& key) const { return values_.contains(key); }
  const std::map<std::string, std::string>& values() const { return values_; }

  const std::string& raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw usage_error("missing config key " + key);
    return it->second;
  }

  // Rejects keys outside `known`, which are almost always typos.
  void require_known(const std::set<std::string>& known) const {
    for (const auto& [key, value] : values_) {
      if (!known.contains(key)) throw usage_error("unknown config key " + key);
    }
  }

  template <typename T>
  T get(const std::string& key, T fallback) const {
    return has(key) ? convert<T>(key, raw(key)) : fallback;
  }

  // Comma-separated list.
  template <typename T>
  std::vector<T> get_list(const std::string& key, std::vector<T> fallback) const {
    if (!has(key)) return fallback;
    std::vector<T> out;
    const std::string& s = raw(key);
    std::size_t start = 0;
    while (true) {
      const auto pos = s.find(',', start);
      out.push_back(convert<T>(key, trim(s.substr(start, pos - start))));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    return out;
  }

  template <typename T>
  static T convert(const std::string& key, const std::string& text) {
    if constexpr (std::is_same_v<T, std::string>) {
      return text;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (text == "true" || text == "1" || text == "yes") return true;
      if (text == "false" || text == "0" || text == "no") return false;
      throw usage_error("config key " + key + ": expected a boolean");
    } else {
      T value{};
      const auto [ptr, ec] =
          std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw usage_error("config key " + key + ": bad value '" + text + "'");
      }
      return value;
    }
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
};

}  // namespace sessrank
