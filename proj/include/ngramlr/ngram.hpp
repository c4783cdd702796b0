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

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ngramlr/detail/text.hpp"
#include "ngramlr/detail/utf8.hpp"
#include "ngramlr/error.hpp"

namespace ngramlr {

enum class Family : std::uint8_t { character = 0, word = 1 };

inline std::string_view to_string(Family f) { return f == Family::character ? "char" : "word"; }

/// Which n-gram families feed the model.
enum class FeatureSet { character, word, combined };

inline std::string_view to_string(FeatureSet s) {
  switch (s) {
    case FeatureSet::character: return "char";
    case FeatureSet::word: return "word";
    case FeatureSet::combined: return "combined";
  }
  return "?";
}

inline FeatureSet parse_feature_set(std::string_view s) {
  if (s == "char") return FeatureSet::character;
  if (s == "word") return FeatureSet::word;
  if (s == "combined") return FeatureSet::combined;
  throw ConfigError("unknown feature set '" + std::string(s) + "' (expected char, word or combined)");
}

struct NgramConfig {
  FeatureSet features = FeatureSet::combined;
  int char_min = 1;
  int char_max = 7;
  int word_min = 1;
  int word_max = 4;
  std::uint64_t min_total_count = 2;

  bool uses(Family f) const {
    return features == FeatureSet::combined ||
           (f == Family::character ? features == FeatureSet::character : features == FeatureSet::word);
  }

  void validate() const {
    if (char_min < 1 || char_max < char_min) throw ConfigError("char n-gram orders must satisfy 1 <= min <= max");
    if (word_min < 1 || word_max < word_min) throw ConfigError("word n-gram orders must satisfy 1 <= min <= max");
    if (min_total_count < 1) throw ConfigError("min_total_count must be at least 1");
  }

  friend bool operator==(const NgramConfig&, const NgramConfig&) = default;
};

/// (order, gram) -> multiplicity.
using NgramMultiset = std::map<std::pair<int, std::string>, std::size_t>;

namespace detail {

struct LoweredText {
  std::string utf8;                  // lowercased text
  std::vector<std::size_t> offsets;  // byte offset of each code point, plus end sentinel
};

inline LoweredText lower_text(std::string_view text) {
  LoweredText out;
  const auto cps = decode_utf8(text);
  out.offsets.reserve(cps.size() + 1);
  out.utf8.reserve(text.size());
  for (char32_t c : cps) {
    out.offsets.push_back(out.utf8.size());
    append_utf8(out.utf8, to_lower(c));
  }
  out.offsets.push_back(out.utf8.size());
  return out;
}

template <typename Fn>
void for_each_char_ngram(const LoweredText& t, int n_min, int n_max, Fn&& fn) {
  const auto len = t.offsets.size() - 1;
  for (int n = n_min; n <= n_max; ++n) {
    const auto un = static_cast<std::size_t>(n);
    if (un > len) break;
    for (std::size_t i = 0; i + un <= len; ++i) {
      fn(n, std::string_view(t.utf8).substr(t.offsets[i], t.offsets[i + un] - t.offsets[i]));
    }
  }
}

template <typename Fn>
void for_each_word_ngram(std::span<const std::string> tokens, int n_min, int n_max, Fn&& fn) {
  std::string gram;
  for (int n = n_min; n <= n_max; ++n) {
    const auto un = static_cast<std::size_t>(n);
    if (un > tokens.size()) break;
    for (std::size_t i = 0; i + un <= tokens.size(); ++i) {
      gram = tokens[i];
      for (std::size_t j = 1; j < un; ++j) {
        gram += ' ';
        gram += tokens[i + j];
      }
      fn(n, std::string_view(gram));
    }
  }
}

inline void check_orders(int n_min, int n_max) {
  if (n_min < 1 || n_max < n_min) {
    throw ConfigError("n-gram orders must satisfy 1 <= n_min <= n_max, got [" + std::to_string(n_min) + ", " +
                      std::to_string(n_max) + "]");
  }
}

}  // namespace detail

/// Lowercases, splits on whitespace, strips leading and trailing punctuation
/// from each token and drops tokens that end up empty.
inline std::vector<std::string> tokenize(std::string_view text) {
  const auto cps = detail::decode_utf8(text);
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && detail::is_space(cps[i])) ++i;
    std::size_t j = i;
    while (j < cps.size() && !detail::is_space(cps[j])) ++j;
    std::size_t b = i, e = j;
    while (b < e && detail::is_punct(cps[b])) ++b;
    while (e > b && detail::is_punct(cps[e - 1])) --e;
    if (b < e) {
      std::string tok;
      for (std::size_t k = b; k < e; ++k) detail::append_utf8(tok, detail::to_lower(cps[k]));
      tokens.push_back(std::move(tok));
    }
    i = j;
  }
  return tokens;
}

/// Every contiguous code-point substring of the lowercased text with length in
/// [n_min, n_max]. Whitespace and punctuation are kept.
inline NgramMultiset extract_char_ngrams(std::string_view text, int n_min = 1, int n_max = 7) {
  detail::check_orders(n_min, n_max);
  NgramMultiset out;
  detail::for_each_char_ngram(detail::lower_text(text), n_min, n_max,
                              [&](int n, std::string_view g) { ++out[{n, std::string(g)}]; });
  return out;
}

/// Contiguous token windows of length in [n_min, n_max], joined by a single space.
inline NgramMultiset extract_word_ngrams(std::span<const std::string> tokens, int n_min = 1, int n_max = 4) {
  detail::check_orders(n_min, n_max);
  NgramMultiset out;
  detail::for_each_word_ngram(tokens, n_min, n_max, [&](int n, std::string_view g) { ++out[{n, std::string(g)}]; });
  return out;
}

struct VocabEntry {
  Family family;
  int order;
  std::string gram;
  std::uint64_t count;  // total occurrences in the corpus the vocabulary was built on

  auto key() const { return std::tie(family, order, gram); }
  friend bool operator==(const VocabEntry&, const VocabEntry&) = default;
};

/// Frequency-thresholded n-gram vocabulary. Indices follow lexicographic order
/// of (family, order, gram); character grams therefore occupy [0, char_size()).
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Takes entries in any order and sorts them into canonical index order.
  Vocabulary(NgramConfig config, std::vector<VocabEntry> entries) : config_(config), entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
    for (std::size_t j = 0; j < entries_.size(); ++j) {
      auto& index = entries_[j].family == Family::character ? char_index_ : word_index_;
      if (!index.emplace(entries_[j].gram, static_cast<std::uint32_t>(j)).second) {
        throw DataError("vocabulary: duplicate " + std::string(to_string(entries_[j].family)) + " gram '" +
                        entries_[j].gram + "'");
      }
    }
    char_size_ = char_index_.size();
  }

  std::size_t size() const { return entries_.size(); }
  std::size_t char_size() const { return char_size_; }
  const NgramConfig& config() const { return config_; }
  const VocabEntry& entry(std::size_t j) const { return entries_.at(j); }
  std::span<const VocabEntry> entries() const { return entries_; }

  Family family_of(std::size_t j) const { return j < char_size_ ? Family::character : Family::word; }

  std::optional<std::uint32_t> find(Family f, std::string_view gram) const {
    const auto& index = f == Family::character ? char_index_ : word_index_;
    const auto it = index.find(std::string(gram));
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

  /// Fingerprint of the index assignment (family, order, gram, index).
  std::string hash() const {
    detail::Fnv1a h;
    for (std::size_t j = 0; j < entries_.size(); ++j) {
      const auto& e = entries_[j];
      h.update(to_string(e.family));
      h.update("\t" + std::to_string(e.order) + "\t");
      h.update(e.gram);
      h.update("\t" + std::to_string(j) + "\n");
    }
    return detail::hex64(h.digest());
  }

 private:
  NgramConfig config_;
  std::vector<VocabEntry> entries_;
  std::unordered_map<std::string, std::uint32_t> char_index_;
  std::unordered_map<std::string, std::uint32_t> word_index_;
  std::size_t char_size_ = 0;
};

/// Raw term frequencies of one document plus its lengths in both units.
struct SparseCountVector {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> counts;  // (feature index, tf), sorted by index
  std::size_t char_len = 0;  // code points in the lowercased text
  std::size_t word_len = 0;  // tokens after punctuation filtering

  friend bool operator==(const SparseCountVector&, const SparseCountVector&) = default;
};

/// Counts n-grams over the corpus and keeps those whose summed occurrence
/// count reaches config.min_total_count.
inline Vocabulary build_vocabulary(std::span<const std::string> texts, const NgramConfig& config) {
  config.validate();
  if (texts.empty()) throw DataError("build_vocabulary: empty corpus");
  struct Tally {
    int order;
    std::uint64_t count;
  };
  std::unordered_map<std::string, Tally> char_counts, word_counts;
  for (const auto& text : texts) {
    if (config.uses(Family::character)) {
      detail::for_each_char_ngram(detail::lower_text(text), config.char_min, config.char_max,
                                  [&](int n, std::string_view g) {
                                    auto [it, fresh] = char_counts.try_emplace(std::string(g), Tally{n, 0});
                                    ++it->second.count;
                                  });
    }
    if (config.uses(Family::word)) {
      const auto tokens = tokenize(text);
      detail::for_each_word_ngram(tokens, config.word_min, config.word_max, [&](int n, std::string_view g) {
        auto [it, fresh] = word_counts.try_emplace(std::string(g), Tally{n, 0});
        ++it->second.count;
      });
    }
  }
  std::vector<VocabEntry> entries;
  for (auto& [gram, t] : char_counts)
    if (t.count >= config.min_total_count) entries.push_back({Family::character, t.order, gram, t.count});
  for (auto& [gram, t] : word_counts)
    if (t.count >= config.min_total_count) entries.push_back({Family::word, t.order, gram, t.count});
  return Vocabulary(config, std::move(entries));
}

inline SparseCountVector vectorize(std::string_view text, const Vocabulary& vocab) {
  const auto& config = vocab.config();
  SparseCountVector v;
  std::unordered_map<std::uint32_t, std::uint32_t> tf;
  const auto lowered = detail::lower_text(text);
  v.char_len = lowered.offsets.size() - 1;
  if (config.uses(Family::character)) {
    detail::for_each_char_ngram(lowered, config.char_min, config.char_max, [&](int, std::string_view g) {
      if (auto j = vocab.find(Family::character, g)) ++tf[*j];
    });
  }
  const auto tokens = tokenize(text);
  v.word_len = tokens.size();
  if (config.uses(Family::word)) {
    detail::for_each_word_ngram(tokens, config.word_min, config.word_max, [&](int, std::string_view g) {
      if (auto j = vocab.find(Family::word, g)) ++tf[*j];
    });
  }
  v.counts.assign(tf.begin(), tf.end());
  std::sort(v.counts.begin(), v.counts.end());
  return v;
}

namespace detail {

inline std::string escape_field(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string unescape_field(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out += s[i];
      continue;
    }
    if (++i == s.size()) throw DataError("dangling escape in '" + std::string(s) + "'");
    switch (s[i]) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      default: throw DataError("unknown escape in '" + std::string(s) + "'");
    }
  }
  return out;
}

}  // namespace detail

/// One line per entry: family, order, gram (backslash-escaped), index, count.
inline std::string format_vocabulary(const Vocabulary& vocab) {
  std::string out;
  for (std::size_t j = 0; j < vocab.size(); ++j) {
    const auto& e = vocab.entry(j);
    out += std::string(to_string(e.family)) + '\t' + std::to_string(e.order) + '\t' + detail::escape_field(e.gram) +
           '\t' + std::to_string(j) + '\t' + std::to_string(e.count) + '\n';
  }
  return out;
}

/// Inverse of format_vocabulary. Indices must be 0..n-1 in canonical order.
inline Vocabulary parse_vocabulary(std::string_view text, const NgramConfig& config) {
  std::vector<VocabEntry> entries;
  std::size_t line_no = 0;
  for (auto line : detail::split(text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split(line, '\t');
    const auto where = "vocabulary line " + std::to_string(line_no);
    if (f.size() != 5) throw DataError(where + ": expected 5 columns");
    VocabEntry e;
    if (f[0] == "char") {
      e.family = Family::character;
    } else if (f[0] == "word") {
      e.family = Family::word;
    } else {
      throw DataError(where + ": unknown family '" + std::string(f[0]) + "'");
    }
    e.order = detail::parse_or_throw<int>(f[1], "order");
    e.gram = detail::unescape_field(f[2]);
    if (detail::parse_or_throw<std::size_t>(f[3], "index") != entries.size()) {
      throw DataError(where + ": index out of sequence");
    }
    e.count = detail::parse_or_throw<std::uint64_t>(f[4], "count");
    entries.push_back(std::move(e));
  }
  Vocabulary vocab(config, entries);
  for (std::size_t j = 0; j < entries.size(); ++j) {
    if (!(vocab.entry(j) == entries[j])) throw DataError("vocabulary entries are not in canonical order");
  }
  return vocab;
}

}  // namespace ngramlr
