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
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ngramlr/detail/random.hpp"
#include "ngramlr/detail/text.hpp"
#include "ngramlr/error.hpp"

namespace ngramlr {

/// Binary label: 0 or 1.
using Label = std::uint8_t;
using LabelVector = std::vector<Label>;

inline constexpr std::size_t kNumCategories = 7;

/// Category letters, in column order of the task 2 release.
inline constexpr std::array<char, kNumCategories> kCategoryNames = {'a', 'b', 'c', 'd', 'e', 'f', 'g'};

enum class CorpusFormat { task1, task2, unlabeled };

inline std::size_t column_count(CorpusFormat format) {
  switch (format) {
    case CorpusFormat::unlabeled: return 5;
    case CorpusFormat::task1: return 6;
    case CorpusFormat::task2: return 6 + kNumCategories;
  }
  return 0;
}

struct ParagraphRecord {
  std::string par_id;
  std::string art_id;
  std::string keyword;
  std::string country;
  std::string text;  // verbatim; may be empty
  std::optional<Label> task1_label;
  std::optional<std::array<Label, kNumCategories>> task2_labels;

  friend bool operator==(const ParagraphRecord&, const ParagraphRecord&) = default;
};

using Corpus = std::vector<ParagraphRecord>;

namespace detail {

inline Label parse_label(std::string_view field, std::size_t line_no) {
  if (field == "0") return 0;
  if (field == "1") return 1;
  throw DataError("line " + std::to_string(line_no) + ": label must be 0 or 1, found '" +
                  std::string(field) + "'");
}

}  // namespace detail

/// Parses a tab-separated corpus held in memory. Blank lines are skipped;
/// there is no header row and no quoting.
inline Corpus parse_corpus(std::string_view content, CorpusFormat format) {
  const std::size_t expected = column_count(format);
  Corpus records;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    const auto line = detail::strip_cr(content.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;

    const auto fields = detail::split(line, '\t');
    if (fields.size() != expected) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(expected) +
                      " tab-separated columns, found " + std::to_string(fields.size()));
    }
    ParagraphRecord r;
    r.par_id = fields[0];
    if (r.par_id.empty()) throw DataError("line " + std::to_string(line_no) + ": empty par_id");
    r.art_id = fields[1];
    r.keyword = fields[2];
    r.country = fields[3];
    r.text = fields[4];
    if (format != CorpusFormat::unlabeled) r.task1_label = detail::parse_label(fields[5], line_no);
    if (format == CorpusFormat::task2) {
      std::array<Label, kNumCategories> cats{};
      for (std::size_t c = 0; c < kNumCategories; ++c) cats[c] = detail::parse_label(fields[6 + c], line_no);
      r.task2_labels = cats;
    }
    if (!seen.insert(r.par_id).second) {
      throw DataError("line " + std::to_string(line_no) + ": duplicate par_id '" + r.par_id + "'");
    }
    records.push_back(std::move(r));
  }
  return records;
}

inline Corpus load_corpus(const std::string& path, CorpusFormat format) {
  try {
    return parse_corpus(detail::read_file(path), format);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

/// Serializes records in the given format. Fields must not contain tabs or newlines.
inline std::string format_corpus(std::span<const ParagraphRecord> records, CorpusFormat format) {
  std::string out;
  for (const auto& r : records) {
    for (const std::string* f : {&r.par_id, &r.art_id, &r.keyword, &r.country, &r.text}) {
      if (f->find_first_of("\t\n\r") != std::string::npos) {
        throw DataError("record '" + r.par_id + "': field contains a tab or newline");
      }
    }
    out += r.par_id + '\t' + r.art_id + '\t' + r.keyword + '\t' + r.country + '\t' + r.text;
    if (format != CorpusFormat::unlabeled) {
      if (!r.task1_label) throw DataError("record '" + r.par_id + "' has no task 1 label");
      out += '\t';
      out += static_cast<char>('0' + *r.task1_label);
    }
    if (format == CorpusFormat::task2) {
      if (!r.task2_labels) throw DataError("record '" + r.par_id + "' has no task 2 labels");
      for (Label l : *r.task2_labels) {
        out += '\t';
        out += static_cast<char>('0' + l);
      }
    }
    out += '\n';
  }
  return out;
}

inline void save_corpus(const std::string& path, std::span<const ParagraphRecord> records, CorpusFormat format) {
  auto out = detail::open_output(path);
  out << format_corpus(records, format);
  if (!out) throw DataError("failed writing '" + path + "'");
}

inline LabelVector task1_labels(std::span<const ParagraphRecord> records) {
  LabelVector y;
  y.reserve(records.size());
  for (const auto& r : records) {
    if (!r.task1_label) throw DataError("record '" + r.par_id + "' has no task 1 label");
    y.push_back(*r.task1_label);
  }
  return y;
}

inline LabelVector category_labels(std::span<const ParagraphRecord> records, std::size_t category) {
  LabelVector y;
  y.reserve(records.size());
  for (const auto& r : records) {
    if (!r.task2_labels) throw DataError("record '" + r.par_id + "' has no task 2 labels");
    y.push_back((*r.task2_labels)[category]);
  }
  return y;
}

inline double positive_rate(std::span<const Label> labels) {
  if (labels.empty()) throw DataError("positive_rate: empty label sequence");
  const auto pos = std::count(labels.begin(), labels.end(), Label{1});
  return static_cast<double>(pos) / static_cast<double>(labels.size());
}

/// Assignment of every instance to one of k folds.
struct FoldAssignment {
  std::vector<int> fold_of;
  int k = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> members(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
      if (fold_of[i] == fold) out.push_back(i);
    return out;
  }

  std::vector<std::size_t> complement(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
      if (fold_of[i] != fold) out.push_back(i);
    return out;
  }

  friend bool operator==(const FoldAssignment&, const FoldAssignment&) = default;
};

/// Stratified k-fold split. Each class is shuffled independently and dealt
/// round-robin, the negatives continuing where the positives stopped, so both
/// per-fold sizes and per-fold positive counts differ by at most one.
inline FoldAssignment stratified_kfold(std::span<const Label> labels, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("stratified_kfold: k must be at least 2, got " + std::to_string(k));
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 1) throw DataError("stratified_kfold: labels must be 0 or 1");
    (labels[i] ? pos : neg).push_back(i);
  }
  const auto kk = static_cast<std::size_t>(k);
  if (pos.size() < kk || neg.size() < kk) {
    throw DataError("stratified_kfold: each class needs at least k=" + std::to_string(k) +
                    " members (positives " + std::to_string(pos.size()) + ", negatives " +
                    std::to_string(neg.size()) + ")");
  }
  detail::Rng rng(seed);
  detail::shuffle(std::span(pos), rng);
  detail::shuffle(std::span(neg), rng);

  FoldAssignment fa;
  fa.k = k;
  fa.seed = seed;
  fa.fold_of.assign(labels.size(), -1);
  std::size_t slot = 0;
  for (const auto* cls : {&pos, &neg}) {
    for (std::size_t i : *cls) fa.fold_of[i] = static_cast<int>(slot++ % kk);
  }
  return fa;
}

/// Fold file: `par_id<TAB>fold_id` per line. Every record must be listed exactly once.
inline FoldAssignment load_fold_file(const std::string& path, std::span<const ParagraphRecord> records) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) index.emplace(records[i].par_id, i);

  FoldAssignment fa;
  fa.fold_of.assign(records.size(), -1);
  const auto content = detail::read_file(path);
  std::size_t line_no = 0;
  for (auto line : detail::split(content, '\n')) {
    ++line_no;
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto fields = detail::split(line, '\t');
    const auto where = path + ": line " + std::to_string(line_no);
    if (fields.size() != 2) throw DataError(where + ": expected par_id<TAB>fold_id");
    const auto it = index.find(std::string(fields[0]));
    if (it == index.end()) throw DataError(where + ": unknown par_id '" + std::string(fields[0]) + "'");
    int fold = -1;
    if (!detail::parse_number(fields[1], fold) || fold < 0) throw DataError(where + ": bad fold id");
    if (fa.fold_of[it->second] != -1) throw DataError(where + ": par_id listed twice");
    fa.fold_of[it->second] = fold;
    fa.k = std::max(fa.k, fold + 1);
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (fa.fold_of[i] < 0) throw DataError(path + ": no fold for par_id '" + records[i].par_id + "'");
  }
  return fa;
}

inline void save_fold_file(const std::string& path, std::span<const ParagraphRecord> records,
                           const FoldAssignment& folds) {
  if (folds.fold_of.size() != records.size()) throw DataError("fold assignment size mismatch");
  auto out = detail::open_output(path);
  for (std::size_t i = 0; i < records.size(); ++i) out << records[i].par_id << '\t' << folds.fold_of[i] << '\n';
}

}  // namespace ngramlr
