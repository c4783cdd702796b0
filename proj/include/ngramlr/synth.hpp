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

#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ngramlr/corpus.hpp"
#include "ngramlr/detail/random.hpp"
#include "ngramlr/error.hpp"
#include "ngramlr/ngram.hpp"

namespace ngramlr {

/// Recipe for a synthetic labeled corpus with planted marker phrases.
struct SynthSpec {
  std::size_t n_docs = 500;
  double positive_rate = 0.1;                        // per category
  std::vector<std::vector<std::string>> markers;     // per category: candidate marker phrases
  std::vector<std::string> fillers;                  // neutral vocabulary
  std::size_t min_len = 8;                           // filler tokens per document
  std::size_t max_len = 20;
  std::uint64_t seed = 1;

  /// One category with the first default marker set (task 1 shape).
  static SynthSpec binary(std::size_t n, double rate, std::uint64_t seed);
  /// Seven categories with disjoint markers (task 2 shape).
  static SynthSpec multilabel(std::size_t n, double rate, std::uint64_t seed);
};

inline const std::vector<std::string>& default_fillers() {
  static const std::vector<std::string> words = {
      "the",      "people",  "city",    "report",  "family",  "said",    "new",      "government", "local",
      "year",     "support", "help",    "community", "work",  "home",    "school",   "children",   "many",
      "council",  "service", "plan",    "money",   "week",    "group",   "program",  "water",      "street",
      "house",    "life",    "country", "public",  "health",  "across",  "during",   "after",      "before",
      "while",    "their",   "would",   "could",   "should",  "about",   "some",     "other",      "into",
      "through",  "between", "under",   "over",    "again",   "village", "market",   "office",     "story",
      "morning",  "evening", "summer",  "winter",  "project", "budget",  "meeting",  "women",      "men"};
  return words;
}

inline const std::vector<std::vector<std::string>>& default_markers() {
  static const std::vector<std::vector<std::string>> m = {
      {"zorblax quentify", "zorblax vimmer"},  {"kraddle fwoon", "kraddle snuvt"},
      {"plixor dunvey", "plixor gragh"},       {"wexoth brindle", "wexoth qaffle"},
      {"yurnip sklode", "yurnip travv"},       {"mozzik frelp", "mozzik obbler"},
      {"huvvet crangle", "huvvet jispo"}};
  return m;
}

inline SynthSpec SynthSpec::binary(std::size_t n, double rate, std::uint64_t seed) {
  SynthSpec s;
  s.n_docs = n;
  s.positive_rate = rate;
  s.markers = {default_markers().front()};
  s.fillers = default_fillers();
  s.seed = seed;
  return s;
}

inline SynthSpec SynthSpec::multilabel(std::size_t n, double rate, std::uint64_t seed) {
  SynthSpec s = binary(n, rate, seed);
  s.markers = default_markers();
  return s;
}

/// True when the token sequence of `text` contains the tokens of `phrase` contiguously.
inline bool contains_phrase(std::string_view text, std::string_view phrase) {
  const auto t = tokenize(text);
  const auto p = tokenize(phrase);
  if (p.empty() || p.size() > t.size()) return false;
  for (std::size_t i = 0; i + p.size() <= t.size(); ++i) {
    if (std::equal(p.begin(), p.end(), t.begin() + static_cast<std::ptrdiff_t>(i))) return true;
  }
  return false;
}

namespace detail {

inline void validate_synth(const SynthSpec& s) {
  if (s.n_docs < 1) throw ConfigError("synth: n_docs must be positive");
  if (!(s.positive_rate > 0.0 && s.positive_rate < 1.0)) throw ConfigError("synth: positive_rate must be in (0, 1)");
  if (s.markers.size() != 1 && s.markers.size() != kNumCategories) {
    throw ConfigError("synth: need marker lists for 1 or 7 categories");
  }
  if (s.fillers.empty()) throw ConfigError("synth: empty filler vocabulary");
  if (s.min_len > s.max_len) throw ConfigError("synth: min_len exceeds max_len");
  std::set<std::string> filler_set;
  for (const auto& f : s.fillers) {
    const auto toks = tokenize(f);
    if (toks.size() != 1) throw ConfigError("synth: filler '" + f + "' must be a single token");
    filler_set.insert(toks.front());
  }
  std::set<std::string> seen;
  for (const auto& cat : s.markers) {
    if (cat.empty()) throw ConfigError("synth: a category has no marker phrases");
    std::set<std::string> own;
    for (const auto& phrase : cat) {
      const auto toks = tokenize(phrase);
      if (toks.empty()) throw ConfigError("synth: empty marker phrase");
      for (const auto& t : toks) {
        if (filler_set.count(t)) throw ConfigError("synth: marker token '" + t + "' is also a filler");
        if (seen.count(t)) throw ConfigError("synth: marker token '" + t + "' shared between categories");
        own.insert(t);
      }
    }
    seen.insert(own.begin(), own.end());
  }
  const auto n_pos = static_cast<std::size_t>(std::llround(s.positive_rate * static_cast<double>(s.n_docs)));
  if (n_pos < 1 || n_pos >= s.n_docs) throw ConfigError("synth: positive count must be in [1, n_docs)");
}

}  // namespace detail

/// Every category gets exactly round(positive_rate * n_docs) positives, drawn
/// independently, so categories may overlap. A positive document carries one
/// of its category's marker phrases; negatives carry none. With seven
/// categories the task 1 label is the union of the category labels.
inline Corpus generate(const SynthSpec& spec) {
  detail::validate_synth(spec);
  detail::Rng rng(spec.seed);
  const std::size_t n_cat = spec.markers.size();
  const auto n_pos = static_cast<std::size_t>(std::llround(spec.positive_rate * static_cast<double>(spec.n_docs)));

  std::vector<std::vector<Label>> is_pos(n_cat, std::vector<Label>(spec.n_docs, 0));
  for (std::size_t c = 0; c < n_cat; ++c) {
    std::vector<std::size_t> order(spec.n_docs);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    detail::shuffle(std::span(order), rng);
    for (std::size_t i = 0; i < n_pos; ++i) is_pos[c][order[i]] = 1;
  }

  static constexpr const char* kPunct[] = {",", ".", ";", "!", "?"};
  Corpus out;
  out.reserve(spec.n_docs);
  for (std::size_t i = 0; i < spec.n_docs; ++i) {
    const auto len = spec.min_len + detail::uniform_index(rng, spec.max_len - spec.min_len + 1);
    std::vector<std::string> words;
    for (std::size_t k = 0; k < len; ++k) {
      words.push_back(spec.fillers[detail::uniform_index(rng, spec.fillers.size())]);
      if (detail::uniform_index(rng, 8) == 0) words.back() += kPunct[detail::uniform_index(rng, 5)];
    }
    for (std::size_t c = 0; c < n_cat; ++c) {
      if (!is_pos[c][i]) continue;
      const auto& phrase = spec.markers[c][detail::uniform_index(rng, spec.markers[c].size())];
      const auto at = detail::uniform_index(rng, words.size() + 1);
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), phrase);
    }
    if (!words.empty() && !words.front().empty() && words.front()[0] >= 'a' && words.front()[0] <= 'z') {
      words.front()[0] = static_cast<char>(words.front()[0] - 'a' + 'A');
    }

    ParagraphRecord r;
    r.par_id = "syn" + std::to_string(i + 1);
    r.art_id = "art" + std::to_string(i / 4 + 1);
    r.keyword = spec.fillers[i % spec.fillers.size()];
    r.country = "zz";
    for (std::size_t k = 0; k < words.size(); ++k) r.text += (k ? " " : "") + words[k];
    Label any = 0;
    for (std::size_t c = 0; c < n_cat; ++c) any |= is_pos[c][i];
    r.task1_label = any;
    if (n_cat == kNumCategories) {
      std::array<Label, kNumCategories> cats{};
      for (std::size_t c = 0; c < n_cat; ++c) cats[c] = is_pos[c][i];
      r.task2_labels = cats;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace ngramlr
