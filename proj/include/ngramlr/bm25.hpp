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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ngramlr/detail/text.hpp"
#include "ngramlr/error.hpp"
#include "ngramlr/ngram.hpp"

namespace ngramlr {

struct Bm25Params {
  double k1 = 2.0;
  double b = 0.75;

  void validate() const {
    if (!(k1 > 0.0)) throw ConfigError("bm25: k1 must be positive");
    if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("bm25: b must lie in [0, 1]");
  }
  friend bool operator==(const Bm25Params&, const Bm25Params&) = default;
};

/// One stored component of a sparse real vector.
struct Feature {
  std::uint32_t index;
  double value;
  friend bool operator==(const Feature&, const Feature&) = default;
};

/// Sparse real vector, entries sorted by index.
using WeightedVector = std::vector<Feature>;

/// Training-set statistics for BM25. df is dense over the feature space; a
/// zero entry marks a feature never seen during fitting.
struct CorpusStats {
  std::size_t n_docs = 0;
  std::size_t char_size = 0;  // features [0, char_size) use character lengths
  std::vector<std::uint64_t> df;
  double avg_char_len = 0.0;
  double avg_word_len = 0.0;
  Bm25Params params;

  std::size_t dim() const { return df.size(); }
  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

/// Okapi BM25: saturating tf with length normalization, times
/// ln((N - df + 0.5) / (df + 0.5)). Negative idf is returned as-is.
inline double bm25_weight(std::uint64_t tf, std::uint64_t df, double dl, double avg_dl, std::uint64_t n_docs,
                          double k1 = 2.0, double b = 0.75) {
  if (tf == 0) return 0.0;
  if (df < 1 || df > n_docs) {
    throw DataError("bm25_weight: df=" + std::to_string(df) + " outside [1, N=" + std::to_string(n_docs) + "]");
  }
  if (!(avg_dl > 0.0)) throw DataError("bm25_weight: average document length must be positive");
  if (dl < 0.0) throw DataError("bm25_weight: negative document length");
  const double t = static_cast<double>(tf);
  const double norm = k1 * (1.0 - b + b * dl / avg_dl);
  const double idf = std::log((static_cast<double>(n_docs) - static_cast<double>(df) + 0.5) /
                              (static_cast<double>(df) + 0.5));
  return t / (t + norm) * idf;
}

inline CorpusStats fit_stats(std::span<const SparseCountVector> docs, std::size_t dim, std::size_t char_size,
                             const Bm25Params& params = {}) {
  params.validate();
  if (docs.empty()) throw DataError("fit_stats: empty document sequence");
  if (char_size > dim) throw ConfigError("fit_stats: char_size exceeds dimension");
  CorpusStats s;
  s.n_docs = docs.size();
  s.char_size = char_size;
  s.params = params;
  s.df.assign(dim, 0);
  double char_total = 0.0, word_total = 0.0;
  for (const auto& d : docs) {
    for (const auto& [j, tf] : d.counts) {
      if (j >= dim) throw DataError("fit_stats: feature index " + std::to_string(j) + " out of range");
      if (tf > 0) ++s.df[j];
    }
    char_total += static_cast<double>(d.char_len);
    word_total += static_cast<double>(d.word_len);
  }
  s.avg_char_len = char_total / static_cast<double>(docs.size());
  s.avg_word_len = word_total / static_cast<double>(docs.size());
  return s;
}

inline CorpusStats fit_stats(std::span<const SparseCountVector> docs, const Vocabulary& vocab,
                             const Bm25Params& params = {}) {
  return fit_stats(docs, vocab.size(), vocab.char_size(), params);
}

/// BM25-weights every stored feature, using the character length for
/// character features and the token count for word features.
inline WeightedVector transform(const SparseCountVector& v, const CorpusStats& stats) {
  WeightedVector out;
  out.reserve(v.counts.size());
  for (const auto& [j, tf] : v.counts) {
    if (j >= stats.dim() || stats.df[j] == 0) {
      throw DataError("transform: feature " + std::to_string(j) + " unknown to the fitted statistics");
    }
    const bool is_char = j < stats.char_size;
    const double dl = static_cast<double>(is_char ? v.char_len : v.word_len);
    const double avg = is_char ? stats.avg_char_len : stats.avg_word_len;
    out.push_back({j, bm25_weight(tf, stats.df[j], dl, avg, stats.n_docs, stats.params.k1, stats.params.b)});
  }
  return out;
}

inline double l2_norm(const WeightedVector& v) {
  double sq = 0.0;
  for (const auto& f : v) sq += f.value * f.value;
  return std::sqrt(sq);
}

/// Scales to unit Euclidean norm; an all-zero vector is returned unchanged.
inline WeightedVector l2_normalize(WeightedVector v) {
  const double norm = l2_norm(v);
  if (norm == 0.0) return v;
  for (auto& f : v) f.value /= norm;
  return v;
}

/// Diagnostic dump: `key value` header lines, then `index<TAB>df` for every feature.
inline std::string format_stats(const CorpusStats& s) {
  std::string out;
  out += "n_docs " + std::to_string(s.n_docs) + '\n';
  out += "k1 " + detail::format_double(s.params.k1) + '\n';
  out += "b " + detail::format_double(s.params.b) + '\n';
  out += "avg_char_len " + detail::format_double(s.avg_char_len) + '\n';
  out += "avg_word_len " + detail::format_double(s.avg_word_len) + '\n';
  out += "char_size " + std::to_string(s.char_size) + '\n';
  out += "dim " + std::to_string(s.dim()) + '\n';
  for (std::size_t j = 0; j < s.df.size(); ++j) out += std::to_string(j) + '\t' + std::to_string(s.df[j]) + '\n';
  return out;
}

inline CorpusStats parse_stats(std::string_view text) {
  CorpusStats s;
  const auto lines = detail::split(text, '\n');
  std::size_t i = 0;
  auto header = [&](std::string_view key) -> std::string_view {
    if (i >= lines.size()) throw DataError("stats: missing '" + std::string(key) + "'");
    const auto line = lines[i++];
    const auto sp = line.find(' ');
    if (sp == std::string_view::npos || line.substr(0, sp) != key) {
      throw DataError("stats: expected '" + std::string(key) + "', found '" + std::string(line) + "'");
    }
    return line.substr(sp + 1);
  };
  s.n_docs = detail::parse_or_throw<std::size_t>(header("n_docs"), "n_docs");
  s.params.k1 = detail::parse_or_throw<double>(header("k1"), "k1");
  s.params.b = detail::parse_or_throw<double>(header("b"), "b");
  s.avg_char_len = detail::parse_or_throw<double>(header("avg_char_len"), "avg_char_len");
  s.avg_word_len = detail::parse_or_throw<double>(header("avg_word_len"), "avg_word_len");
  s.char_size = detail::parse_or_throw<std::size_t>(header("char_size"), "char_size");
  const auto dim = detail::parse_or_throw<std::size_t>(header("dim"), "dim");
  s.df.reserve(dim);
  for (; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = detail::split(lines[i], '\t');
    if (f.size() != 2 || detail::parse_or_throw<std::size_t>(f[0], "index") != s.df.size()) {
      throw DataError("stats: malformed df line " + std::to_string(i + 1));
    }
    s.df.push_back(detail::parse_or_throw<std::uint64_t>(f[1], "df"));
  }
  if (s.df.size() != dim) throw DataError("stats: expected " + std::to_string(dim) + " df lines");
  return s;
}

}  // namespace ngramlr
