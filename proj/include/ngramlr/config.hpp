/*
 * Copyright 2026 The ngramlr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ngramlr/detail/text.hpp"
#include "ngramlr/error.hpp"

namespace ngramlr {

/// Plain-text `key = value` settings. `#` starts a comment; blank lines are
/// ignored; a repeated key overrides the earlier value.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::string_view text, std::string_view origin = "config") {
    KeyValueConfig c;
    std::size_t line_no = 0;
    for (auto line : detail::split(text, '\n')) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": expected 'key = value'");
      }
      const auto key = detail::trim(line.substr(0, eq));
      if (key.empty()) throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": empty key");
      c.values_[std::string(key)] = std::string(detail::trim(line.substr(eq + 1)));
    }
    return c;
  }

  static KeyValueConfig load(const std::string& path) {
    std::string text;
    try {
      text = detail::read_file(path);
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
    return parse(text, path);
  }

  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

  /// Later values win.
  void merge(const KeyValueConfig& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
  }

  bool contains(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<std::string> get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  template <typename T>
  std::optional<T> get_number(const std::string& key) const {
    const auto s = get(key);
    if (!s) return std::nullopt;
    T v{};
    if (!detail::parse_number(*s, v)) throw ConfigError("config key '" + key + "': cannot parse '" + *s + "'");
    return v;
  }

  std::optional<bool> get_bool(const std::string& key) const {
    const auto s = get(key);
    if (!s) return std::nullopt;
    if (*s == "1" || *s == "true" || *s == "yes") return true;
    if (*s == "0" || *s == "false" || *s == "no") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, found '" + *s + "'");
  }

  std::optional<std::vector<double>> get_list(const std::string& key) const {
    const auto s = get(key);
    if (!s) return std::nullopt;
    std::vector<double> out;
    for (auto item : detail::split(*s, ',')) {
      double v = 0.0;
      if (!detail::parse_number(item, v)) {
        throw ConfigError("config key '" + key + "': cannot parse list item '" + std::string(item) + "'");
      }
      out.push_back(v);
    }
    return out;
  }

  /// Keys present in the file but never read; used to reject typos.
  std::vector<std::string> unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) out.push_back(k);
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace ngramlr
