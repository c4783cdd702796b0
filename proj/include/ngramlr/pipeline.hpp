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

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ngramlr/bm25.hpp"
#include "ngramlr/config.hpp"
#include "ngramlr/corpus.hpp"
#include "ngramlr/detail/parallel.hpp"
#include "ngramlr/detail/text.hpp"
#include "ngramlr/error.hpp"
#include "ngramlr/logreg.hpp"
#include "ngramlr/metrics.hpp"
#include "ngramlr/ngram.hpp"
#include "ngramlr/tuning.hpp"

namespace ngramlr {

/// Target names: "t1" for the binary task, "a".."g" for the categories.
inline const std::string kTask1Target = "t1";

inline std::string category_target(std::size_t c) { return std::string(1, kCategoryNames.at(c)); }

enum class Selection { best_f1, balanced };

struct PipelineConfig {
  NgramConfig ngrams;
  Bm25Params bm25;
  TrainConfig train;                                             // defaults for every target
  std::map<std::string, std::pair<double, double>> target_params;  // target -> (C, w)
  bool tune = false;
  GridSpec grid{{1.0}, {1.0}};
  std::map<std::string, GridSpec> target_grids;
  int folds = 5;
  std::uint64_t seed = 0;
  double delta = 0.01;
  Selection selection = Selection::best_f1;
  unsigned threads = 0;

  TrainConfig train_config(const std::string& target) const {
    auto c = train;
    if (const auto it = target_params.find(target); it != target_params.end()) {
      c.C = it->second.first;
      c.positive_weight = it->second.second;
    }
    return c;
  }

  const GridSpec& grid_for(const std::string& target) const {
    const auto it = target_grids.find(target);
    return it == target_grids.end() ? grid : it->second;
  }

  static std::vector<std::string> all_targets() {
    std::vector<std::string> t{kTask1Target};
    for (std::size_t c = 0; c < kNumCategories; ++c) t.push_back(category_target(c));
    return t;
  }

  /// Builds a configuration from key/value settings; unknown keys are rejected.
  static PipelineConfig from(const KeyValueConfig& kv) {
    PipelineConfig p;
    if (auto v = kv.get("features")) p.ngrams.features = parse_feature_set(*v);
    if (auto v = kv.get_number<int>("char_min")) p.ngrams.char_min = *v;
    if (auto v = kv.get_number<int>("char_max")) p.ngrams.char_max = *v;
    if (auto v = kv.get_number<int>("word_min")) p.ngrams.word_min = *v;
    if (auto v = kv.get_number<int>("word_max")) p.ngrams.word_max = *v;
    if (auto v = kv.get_number<std::uint64_t>("min_count")) p.ngrams.min_total_count = *v;
    if (auto v = kv.get_number<double>("k1")) p.bm25.k1 = *v;
    if (auto v = kv.get_number<double>("b")) p.bm25.b = *v;
    if (auto v = kv.get_number<double>("C")) p.train.C = *v;
    if (auto v = kv.get_number<double>("w")) p.train.positive_weight = *v;
    if (auto v = kv.get_number<double>("tol")) p.train.tol = *v;
    if (auto v = kv.get_number<int>("max_iter")) p.train.max_iter = *v;
    if (auto v = kv.get_bool("bias")) p.train.bias = *v;
    if (auto v = kv.get_bool("tune")) p.tune = *v;
    if (auto v = kv.get_list("grid.C")) p.grid.c_values = *v;
    if (auto v = kv.get_list("grid.w")) p.grid.w_values = *v;
    if (auto v = kv.get_number<int>("folds")) p.folds = *v;
    if (auto v = kv.get_number<std::uint64_t>("seed")) p.seed = *v;
    if (auto v = kv.get_number<double>("delta")) p.delta = *v;
    if (auto v = kv.get_number<unsigned>("threads")) p.threads = *v;
    if (auto v = kv.get("selection")) {
      if (*v == "best") {
        p.selection = Selection::best_f1;
      } else if (*v == "balanced") {
        p.selection = Selection::balanced;
      } else {
        throw ConfigError("selection must be 'best' or 'balanced'");
      }
    }
    for (const auto& t : all_targets()) {
      const auto c = kv.get_number<double>("C." + t);
      const auto w = kv.get_number<double>("w." + t);
      if (c || w) p.target_params[t] = {c.value_or(p.train.C), w.value_or(p.train.positive_weight)};
      const auto gc = kv.get_list("grid.C." + t);
      const auto gw = kv.get_list("grid.w." + t);
      if (gc || gw) p.target_grids[t] = GridSpec{gc.value_or(p.grid.c_values), gw.value_or(p.grid.w_values)};
    }
    if (const auto unused = kv.unused_keys(); !unused.empty()) {
      throw ConfigError("unknown config key '" + unused.front() + "'");
    }
    p.validate();
    return p;
  }

  void validate() const {
    ngrams.validate();
    bm25.validate();
    train.validate();
    for (const auto& t : all_targets()) train_config(t).validate();
    grid.validate();
    for (const auto& [t, g] : target_grids) g.validate();
    if (folds < 2) throw ConfigError("folds must be at least 2");
    if (!(delta >= 0.0)) throw ConfigError("delta must be nonnegative");
  }
};

/// Two named parameter sets, as key/value text.
/// `submission1` holds the best cross-validated F1 per target; `submission2`
/// a close-scoring alternative with the smallest precision/recall gap.
inline std::string preset_text(std::string_view name) {
  if (name == "submission1") {
    return "# best cross-validated F1 per target\n"
           "features = combined\n"
           "C.t1 = 3.1\nw.t1 = 180\n"
           "C.a = 4.75\nw.a = 500\n"
           "C.b = 0.95\nw.b = 1600\n"
           "C.c = 0.55\nw.c = 1300\n"
           "C.d = 0.35\nw.d = 700\n"
           "C.e = 0.25\nw.e = 1250\n"
           "C.f = 0.95\nw.f = 850\n"
           "C.g = 0.014\nw.g = 1400\n";
  }
  if (name == "submission2") {
    return "# close F1 with the smallest precision/recall gap per target\n"
           "features = combined\n"
           "C.t1 = 2\nw.t1 = 50\n"
           "C.a = 3.75\nw.a = 300\n"
           "C.b = 0.90\nw.b = 2000\n"
           "C.c = 0.70\nw.c = 1500\n"
           "C.d = 0.65\nw.d = 1400\n"
           "C.e = 0.40\nw.e = 750\n"
           "C.f = 1.45\nw.f = 1750\n"
           "C.g = 0.016\nw.g = 1800\n";
  }
  throw ConfigError("unknown preset '" + std::string(name) + "' (expected submission1 or submission2)");
}

inline bool is_preset_name(std::string_view name) { return name == "submission1" || name == "submission2"; }

/// Vocabulary plus BM25 statistics, both fitted on training text only.
class Featurizer {
 public:
  Featurizer() = default;
  Featurizer(Vocabulary vocab, CorpusStats stats) : vocab_(std::move(vocab)), stats_(std::move(stats)) {
    if (stats_.dim() != vocab_.size() || stats_.char_size != vocab_.char_size()) {
      throw DataError("featurizer: statistics do not match the vocabulary");
    }
  }

  static Featurizer fit(std::span<const std::string> texts, const NgramConfig& ngrams, const Bm25Params& bm25) {
    bm25.validate();
    auto vocab = build_vocabulary(texts, ngrams);
    std::vector<SparseCountVector> counts;
    counts.reserve(texts.size());
    for (const auto& t : texts) counts.push_back(vectorize(t, vocab));
    auto stats = fit_stats(counts, vocab, bm25);
    return Featurizer(std::move(vocab), std::move(stats));
  }

  /// Counts, BM25-weights and L2-normalizes one document.
  WeightedVector transform(std::string_view text) const {
    return l2_normalize(ngramlr::transform(vectorize(text, vocab_), stats_));
  }

  Dataset dataset(std::span<const std::string> texts, std::span<const Label> labels) const {
    if (texts.size() != labels.size()) throw DataError("dataset: text and label counts differ");
    Dataset d;
    d.dim = vocab_.size();
    d.x.reserve(texts.size());
    for (const auto& t : texts) d.x.push_back(transform(t));
    d.y = to_signed(labels);
    return d;
  }

  const Vocabulary& vocabulary() const { return vocab_; }
  const CorpusStats& stats() const { return stats_; }
  std::string hash() const { return vocab_.hash(); }

  std::string format() const {
    const auto& c = vocab_.config();
    std::string out = "ngramlr-featurizer 1\n";
    out += "features " + std::string(to_string(c.features)) + '\n';
    out += "char_orders " + std::to_string(c.char_min) + ' ' + std::to_string(c.char_max) + '\n';
    out += "word_orders " + std::to_string(c.word_min) + ' ' + std::to_string(c.word_max) + '\n';
    out += "min_count " + std::to_string(c.min_total_count) + '\n';
    out += "[stats]\n" + format_stats(stats_);
    out += "[vocabulary]\n" + format_vocabulary(vocab_);
    return out;
  }

  static Featurizer parse(std::string_view text) {
    const auto stats_at = text.find("\n[stats]\n");
    const auto vocab_at = text.find("\n[vocabulary]\n");
    if (stats_at == std::string_view::npos || vocab_at == std::string_view::npos || vocab_at < stats_at) {
      throw DataError("featurizer: missing [stats] or [vocabulary] section");
    }
    const auto head = detail::split(text.substr(0, stats_at), '\n');
    if (head.size() != 5 || head[0] != "ngramlr-featurizer 1") throw DataError("featurizer: bad header");
    auto value = [&](std::size_t i, std::string_view key) {
      if (head[i].substr(0, key.size() + 1) != std::string(key) + ' ') {
        throw DataError("featurizer: expected '" + std::string(key) + "'");
      }
      return head[i].substr(key.size() + 1);
    };
    NgramConfig c;
    c.features = parse_feature_set(value(1, "features"));
    const auto co = detail::split(value(2, "char_orders"), ' ');
    const auto wo = detail::split(value(3, "word_orders"), ' ');
    if (co.size() != 2 || wo.size() != 2) throw DataError("featurizer: bad order line");
    c.char_min = detail::parse_or_throw<int>(co[0], "char_min");
    c.char_max = detail::parse_or_throw<int>(co[1], "char_max");
    c.word_min = detail::parse_or_throw<int>(wo[0], "word_min");
    c.word_max = detail::parse_or_throw<int>(wo[1], "word_max");
    c.min_total_count = detail::parse_or_throw<std::uint64_t>(value(4, "min_count"), "min_count");
    auto stats = parse_stats(text.substr(stats_at + 9, vocab_at - (stats_at + 9)));
    auto vocab = parse_vocabulary(text.substr(vocab_at + 14), c);
    return Featurizer(std::move(vocab), std::move(stats));
  }

  void save(const std::string& path) const {
    auto out = detail::open_output(path);
    out << format();
    if (!out) throw DataError("failed writing '" + path + "'");
  }

  static Featurizer load(const std::string& path) { return parse(detail::read_file(path)); }

 private:
  Vocabulary vocab_;
  CorpusStats stats_;
};

inline std::vector<std::string> texts_of(std::span<const ParagraphRecord> records) {
  std::vector<std::string> t;
  t.reserve(records.size());
  for (const auto& r : records) t.push_back(r.text);
  return t;
}

/// A trained model for one target, with its tuning table when tuning ran.
struct TargetModel {
  std::string target;
  ModelWeights model;
  std::optional<CvResult> cv;
};

/// Grid-searches (when enabled) then trains one binary model.
inline TargetModel fit_target(DatasetView data, const std::string& target, const PipelineConfig& config,
                              const std::string& vocab_hash) {
  TargetModel t;
  t.target = target;
  auto train_config = config.train_config(target);
  train_config.seed = config.seed;
  if (config.tune) {
    t.cv = grid_search(data, config.grid_for(target), config.folds, config.seed, train_config, 1);
    const auto [c, w] = config.selection == Selection::balanced ? secondary_selection(*t.cv, config.delta)
                                                                : t.cv->best_params();
    train_config.C = c;
    train_config.positive_weight = w;
  }
  t.model = train(data, train_config);
  t.model.vocab_hash = vocab_hash;
  return t;
}

namespace detail {

// An empty evaluation set yields an all-zero table instead of an error.
inline Confusion eval_counts(std::span<const Label> pred, std::span<const Label> gold) {
  return gold.empty() && pred.empty() ? Confusion{} : confusion(pred, gold);
}

}  // namespace detail

struct Task1Result {
  Featurizer featurizer;
  TargetModel model;
  std::vector<Label> predictions;
  EvalReport report;
};

inline Task1Result run_task1(std::span<const ParagraphRecord> train_corpus, std::span<const ParagraphRecord> eval_corpus,
                             const PipelineConfig& config) {
  config.validate();
  Task1Result r;
  const auto train_texts = texts_of(train_corpus);
  r.featurizer = Featurizer::fit(train_texts, config.ngrams, config.bm25);
  const auto labels = task1_labels(train_corpus);
  const auto data = r.featurizer.dataset(train_texts, labels);
  r.model = fit_target(data, kTask1Target, config, r.featurizer.hash());

  const auto gold = task1_labels(eval_corpus);
  for (const auto& rec : eval_corpus) r.predictions.push_back(predict(r.model.model, r.featurizer.transform(rec.text)));
  const std::array<std::string, 1> names{kTask1Target};
  const std::array<Confusion, 1> counts{detail::eval_counts(r.predictions, gold)};
  r.report = make_report(names, counts);
  return r;
}

using CategoryPrediction = std::array<Label, kNumCategories>;

struct Task2Result {
  Featurizer featurizer;
  std::vector<TargetModel> models;  // one per category, a..g
  std::vector<CategoryPrediction> predictions;
  EvalReport report;
};

/// Seven independent binary problems sharing one featurizer; their
/// predictions are concatenated per instance.
inline Task2Result run_task2(std::span<const ParagraphRecord> train_corpus, std::span<const ParagraphRecord> eval_corpus,
                             const PipelineConfig& config) {
  config.validate();
  Task2Result r;
  const auto train_texts = texts_of(train_corpus);
  std::vector<LabelVector> labels;
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    labels.push_back(category_labels(train_corpus, c));
    const auto pos = std::count(labels[c].begin(), labels[c].end(), Label{1});
    if (pos == 0) throw DataError("category '" + category_target(c) + "' has no positive training instances");
    if (static_cast<std::size_t>(pos) == labels[c].size()) {
      throw DataError("category '" + category_target(c) + "' has no negative training instances");
    }
  }
  r.featurizer = Featurizer::fit(train_texts, config.ngrams, config.bm25);
  std::vector<WeightedVector> x;
  x.reserve(train_texts.size());
  for (const auto& t : train_texts) x.push_back(r.featurizer.transform(t));

  std::vector<std::vector<int>> signed_labels;
  for (const auto& l : labels) signed_labels.push_back(to_signed(l));
  r.models.resize(kNumCategories);
  const auto hash = r.featurizer.hash();
  detail::parallel_for(
      kNumCategories,
      [&](std::size_t c) {
        const DatasetView data(x, signed_labels[c], r.featurizer.vocabulary().size());
        r.models[c] = fit_target(data, category_target(c), config, hash);
      },
      config.threads);

  std::vector<std::string> names;
  std::vector<Confusion> counts;
  std::vector<WeightedVector> eval_x;
  for (const auto& rec : eval_corpus) eval_x.push_back(r.featurizer.transform(rec.text));
  r.predictions.assign(eval_corpus.size(), CategoryPrediction{});
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    std::vector<Label> pred;
    for (std::size_t i = 0; i < eval_x.size(); ++i) {
      r.predictions[i][c] = predict(r.models[c].model, eval_x[i]);
      pred.push_back(r.predictions[i][c]);
    }
    names.push_back(category_target(c));
    counts.push_back(detail::eval_counts(pred, category_labels(eval_corpus, c)));
  }
  r.report = make_report(names, counts);
  return r;
}

inline constexpr std::string_view kBundleMagic = "ngramlr-bundle 1";

/// Several named models in one file: a header, then `target <name>` followed
/// by each model's own container.
inline std::string format_bundle(std::span<const TargetModel> models) {
  std::string out = std::string(kBundleMagic) + "\ncount " + std::to_string(models.size()) + '\n';
  for (const auto& m : models) out += "target " + m.target + '\n' + format_model(m.model);
  return out;
}

inline std::vector<TargetModel> parse_bundle(std::string_view text) {
  detail::LineReader in(text);
  if (in.next() != kBundleMagic) throw DataError("model bundle: unsupported header");
  const auto n = detail::parse_or_throw<std::size_t>(in.field("count"), "count");
  std::vector<TargetModel> out;
  for (std::size_t i = 0; i < n; ++i) {
    TargetModel t;
    t.target = std::string(in.field("target"));
    t.model = detail::read_model(in);
    out.push_back(std::move(t));
  }
  if (in.position() != text.size()) throw DataError("model bundle: trailing data");
  return out;
}

inline void save_bundle(const std::string& path, std::span<const TargetModel> models) {
  auto out = detail::open_output(path);
  out << format_bundle(models);
  if (!out) throw DataError("failed writing '" + path + "'");
}

inline std::vector<TargetModel> load_bundle(const std::string& path) { return parse_bundle(detail::read_file(path)); }

/// Task 1 (one model): one 0/1 per line. Task 2 (seven models, a..g): seven
/// comma-separated 0/1 per line. Lines follow input order.
inline std::string format_predictions(const Featurizer& featurizer, std::span<const TargetModel> models,
                                      std::span<const ParagraphRecord> corpus) {
  if (models.size() != 1 && models.size() != kNumCategories) {
    throw DataError("predict: expected 1 or 7 models, got " + std::to_string(models.size()));
  }
  const auto hash = featurizer.hash();
  for (const auto& m : models) {
    if (m.model.vocab_hash != hash) {
      throw DataError("predict: model '" + m.target + "' was trained on vocabulary " + m.model.vocab_hash +
                      " but the featurizer has " + hash);
    }
  }
  std::string out;
  for (const auto& rec : corpus) {
    const auto v = featurizer.transform(rec.text);
    for (std::size_t m = 0; m < models.size(); ++m) {
      if (m > 0) out += ',';
      out += predict(models[m].model, v) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

inline void predict_file(const Featurizer& featurizer, std::span<const TargetModel> models,
                         std::span<const ParagraphRecord> corpus, const std::string& out_path) {
  const auto text = format_predictions(featurizer, models, corpus);
  auto out = detail::open_output(out_path);
  out << text;
  if (!out) throw DataError("failed writing '" + out_path + "'");
}

/// Reads a prediction file back: one row per line, `width` comma-separated labels.
inline std::vector<std::vector<Label>> parse_predictions(std::string_view text, std::size_t width) {
  std::vector<std::vector<Label>> rows;
  std::size_t line_no = 0;
  for (auto line : detail::split(text, '\n')) {
    ++line_no;
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != width) {
      throw DataError("predictions line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                      " values");
    }
    std::vector<Label> row;
    for (auto v : f) row.push_back(detail::parse_label(detail::trim(v), line_no));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Scores a prediction file against a labeled corpus (width 1: task 1, width 7: task 2).
inline EvalReport evaluate_predictions(std::span<const std::vector<Label>> rows,
                                       std::span<const ParagraphRecord> gold, std::size_t width) {
  if (rows.size() != gold.size()) {
    throw DataError("evaluate: " + std::to_string(rows.size()) + " prediction rows for " +
                    std::to_string(gold.size()) + " gold records");
  }
  std::vector<std::string> names;
  std::vector<Confusion> counts;
  for (std::size_t c = 0; c < width; ++c) {
    std::vector<Label> pred;
    for (const auto& r : rows) pred.push_back(r.at(c));
    const auto g = width == 1 ? task1_labels(gold) : category_labels(gold, c);
    names.push_back(width == 1 ? kTask1Target : category_target(c));
    counts.push_back(confusion(pred, g));
  }
  return make_report(names, counts);
}

}  // namespace ngramlr
