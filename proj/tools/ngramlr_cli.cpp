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
// ngramlr: command-line front end for the n-gram logistic-regression pipeline.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 solver did not converge.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ngramlr/ngramlr.hpp"

namespace {

using namespace ngramlr;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kConvergence = 3 };

struct CommonOptions {
  int task = 1;
  std::string features;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> folds;
  std::string model;
  std::string out;
  unsigned threads = 0;
};

void add_common(CLI::App* app, CommonOptions& o, bool with_model = true) {
  app->add_option("--task", o.task, "1 (binary) or 2 (seven categories)")->check(CLI::IsMember({1, 2}));
  app->add_option("--features", o.features, "char, word or combined")
      ->check(CLI::IsMember({"char", "word", "combined"}));
  app->add_option("--config", o.config, "key/value config file or preset name (submission1, submission2)");
  app->add_option("--seed", o.seed, "seed for fold assignment");
  app->add_option("--folds", o.folds, "number of cross-validation folds")->check(CLI::PositiveNumber);
  if (with_model) app->add_option("--model", o.model, "model bundle path (featurizer at <model>.feat)");
  app->add_option("--out", o.out, "output path (default: standard output)");
  app->add_option("--threads", o.threads, "worker threads (0: hardware concurrency)");
}

// Config file or preset, then command-line overrides.
PipelineConfig load_config(const CommonOptions& o, const std::vector<std::pair<std::string, std::string>>& extra = {}) {
  KeyValueConfig kv;
  if (!o.config.empty()) {
    kv = is_preset_name(o.config) ? KeyValueConfig::parse(preset_text(o.config), o.config)
                                  : KeyValueConfig::load(o.config);
  }
  if (!o.features.empty()) kv.set("features", o.features);
  if (o.seed) kv.set("seed", std::to_string(*o.seed));
  if (o.folds) kv.set("folds", std::to_string(*o.folds));
  if (o.threads) kv.set("threads", std::to_string(o.threads));
  for (const auto& [k, v] : extra) kv.set(k, v);
  return PipelineConfig::from(kv);
}

// Infers the TSV layout from the column count of the first nonblank line.
Corpus read_corpus(const std::string& path) {
  const auto text = detail::read_file(path);
  for (auto line : detail::split(text, '\n')) {
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto cols = detail::split(line, '\t').size();
    for (auto f : {CorpusFormat::unlabeled, CorpusFormat::task1, CorpusFormat::task2})
      if (cols == column_count(f)) return parse_corpus(text, f);
    throw DataError(path + ": unrecognized layout with " + std::to_string(cols) + " columns");
  }
  throw DataError(path + ": no records");
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  auto out = detail::open_output(path);
  out << text;
  if (!out) throw DataError("failed writing '" + path + "'");
}

std::string featurizer_path(const std::string& model) { return model + ".feat"; }

int cmd_featurize(const CommonOptions& o, const std::string& train_path) {
  if (o.out.empty()) throw ConfigError("featurize: --out <prefix> is required");
  const auto config = load_config(o);
  const auto corpus = read_corpus(train_path);
  const auto f = Featurizer::fit(texts_of(corpus), config.ngrams, config.bm25);
  write_output(o.out + ".vocab", format_vocabulary(f.vocabulary()));
  write_output(o.out + ".stats", format_stats(f.stats()));
  std::cout << "features=" << to_string(config.ngrams.features) << " size=" << f.vocabulary().size()
            << " char=" << f.vocabulary().char_size() << " hash=" << f.hash() << '\n';
  return kOk;
}

int cmd_train(const CommonOptions& o, const std::string& train_path, const std::string& eval_path, bool tune) {
  if (o.model.empty()) throw ConfigError("train: --model <path> is required");
  auto config = load_config(o);
  if (tune) config.tune = true;
  const auto train_corpus = read_corpus(train_path);
  const auto eval_corpus = eval_path.empty() ? Corpus{} : read_corpus(eval_path);
  std::string report;
  if (o.task == 1) {
    const auto r = run_task1(train_corpus, eval_corpus, config);
    r.featurizer.save(featurizer_path(o.model));
    const std::array<TargetModel, 1> models{r.model};
    save_bundle(o.model, models);
    report = format_report(r.report);
  } else {
    const auto r = run_task2(train_corpus, eval_corpus, config);
    r.featurizer.save(featurizer_path(o.model));
    save_bundle(o.model, r.models);
    report = format_report(r.report);
  }
  if (!eval_corpus.empty()) write_output(o.out, report);
  return kOk;
}

std::string best_line(const char* label, std::pair<double, double> p) {
  return std::string("# ") + label + " C=" + detail::format_double(p.first) + " w=" + detail::format_double(p.second) +
         '\n';
}

int cmd_tune(const CommonOptions& o, const std::string& train_path, const std::string& fold_file,
             const std::vector<std::pair<std::string, std::string>>& grid) {
  const auto config = load_config(o, grid);
  const auto corpus = read_corpus(train_path);
  const auto f = Featurizer::fit(texts_of(corpus), config.ngrams, config.bm25);
  std::vector<WeightedVector> x;
  for (const auto& r : corpus) x.push_back(f.transform(r.text));

  std::vector<std::string> targets;
  std::vector<LabelVector> labels;
  if (o.task == 1) {
    targets.push_back(kTask1Target);
    labels.push_back(task1_labels(corpus));
  } else {
    for (std::size_t c = 0; c < kNumCategories; ++c) {
      targets.push_back(category_target(c));
      labels.push_back(category_labels(corpus, c));
    }
  }
  const auto shared_folds = fold_file.empty() ? std::optional<FoldAssignment>{}
                                              : std::optional<FoldAssignment>{load_fold_file(fold_file, corpus)};
  std::string out;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const auto y = to_signed(labels[t]);
    const DatasetView data(x, y, f.vocabulary().size());
    auto base = config.train_config(targets[t]);
    base.seed = config.seed;
    const auto folds = shared_folds ? *shared_folds : stratified_kfold(labels[t], config.folds, config.seed);
    const auto cv = grid_search(data, config.grid_for(targets[t]), folds, base, config.threads);
    out += "# target " + targets[t] + " k=" + std::to_string(folds.k) + " seed=" + std::to_string(config.seed) + '\n';
    out += "# C\tw\tTP\tFP\tFN\tTN\tP\tR\tF1\n";
    out += format_cv_report(cv);
    out += best_line("best", cv.best_params());
    out += best_line("balanced", secondary_selection(cv, config.delta));
  }
  write_output(o.out, out);
  return kOk;
}

int cmd_predict(const CommonOptions& o, const std::string& input_path) {
  if (o.model.empty()) throw ConfigError("predict: --model <path> is required");
  const auto featurizer = Featurizer::load(featurizer_path(o.model));
  const auto models = load_bundle(o.model);
  const std::size_t expected = o.task == 1 ? 1 : kNumCategories;
  if (models.size() != expected) {
    throw DataError("predict: model bundle holds " + std::to_string(models.size()) + " models; task " +
                    std::to_string(o.task) + " needs " + std::to_string(expected));
  }
  write_output(o.out, format_predictions(featurizer, models, read_corpus(input_path)));
  return kOk;
}

int cmd_evaluate(const CommonOptions& o, const std::string& pred_path, const std::string& gold_path) {
  const std::size_t width = o.task == 1 ? 1 : kNumCategories;
  const auto rows = parse_predictions(detail::read_file(pred_path), width);
  write_output(o.out, format_report(evaluate_predictions(rows, read_corpus(gold_path), width)));
  return kOk;
}

int cmd_baseline(const CommonOptions& o, const std::string& gold_path, std::size_t trials,
                 const std::string& submission) {
  const auto corpus = read_corpus(gold_path);
  std::vector<std::pair<std::string, LabelVector>> targets;
  if (o.task == 1) {
    targets.emplace_back(kTask1Target, task1_labels(corpus));
  } else {
    for (std::size_t c = 0; c < kNumCategories; ++c) targets.emplace_back(category_target(c), category_labels(corpus, c));
  }
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
  const std::uint64_t seed = o.seed.value_or(0);
  std::string out;
  double total = 0.0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const double q = positive_rate(targets[t].second);
    const double f1 = f1_best_guess(q);
    total += f1;
    out += targets[t].first + "\tq=" + detail::format_fixed(q) + "\tbest_guess_f1=" + detail::format_fixed(f1);
    if (trials > 0) {
      const auto mc = monte_carlo_best_guess(q, grid, trials, detail::derive_seed(seed, t), corpus.size());
      out += "\tmc_best_p=" + detail::format_fixed(mc.best_p) + "\tmc_f1=" + detail::format_fixed(mc.best_f1);
    }
    out += '\n';
  }
  out += "summary targets=" + std::to_string(targets.size()) +
         " mean_best_guess_f1=" + detail::format_fixed(total / static_cast<double>(targets.size())) + '\n';
  write_output(o.out, out);
  if (!submission.empty()) {
    std::string lines;
    const std::string row = o.task == 1 ? "1\n" : "1,1,1,1,1,1,1\n";
    for (std::size_t i = 0; i < corpus.size(); ++i) lines += row;
    write_output(submission, lines);
  }
  return kOk;
}

int cmd_synth(const CommonOptions& o, std::size_t n, double rate, bool unlabeled) {
  if (o.out.empty()) throw ConfigError("synth: --out <path> is required");
  const std::uint64_t seed = o.seed.value_or(1);
  const auto spec = o.task == 1 ? SynthSpec::binary(n, rate, seed) : SynthSpec::multilabel(n, rate, seed);
  const auto corpus = generate(spec);
  save_corpus(o.out, corpus,
              unlabeled ? CorpusFormat::unlabeled : (o.task == 1 ? CorpusFormat::task1 : CorpusFormat::task2));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Character and word n-gram logistic regression for paragraph classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ngramlr 0.1.0");

  CommonOptions o;
  std::string train_path, eval_path, input_path, pred_path, gold_path, fold_file, submission;
  std::string grid_c, grid_w;
  std::size_t trials = 0, n_docs = 500;
  double rate = 0.1;
  bool tune = false, unlabeled = false;

  auto* featurize = app.add_subcommand("featurize", "fit the vocabulary and BM25 statistics; dump both");
  add_common(featurize, o, false);
  featurize->add_option("--train", train_path, "training corpus TSV")->required();

  auto* train = app.add_subcommand("train", "fit features and model(s); optionally score an evaluation corpus");
  add_common(train, o);
  train->add_option("--train", train_path, "training corpus TSV")->required();
  train->add_option("--eval", eval_path, "labeled evaluation corpus TSV");
  train->add_flag("--tune", tune, "grid-search C and w before the final fit");

  auto* tune_cmd = app.add_subcommand("tune", "cross-validated grid search; writes one line per cell");
  add_common(tune_cmd, o, false);
  tune_cmd->add_option("--train", train_path, "training corpus TSV")->required();
  tune_cmd->add_option("--grid-C", grid_c, "comma-separated C values");
  tune_cmd->add_option("--grid-w", grid_w, "comma-separated positive-class weights");
  tune_cmd->add_option("--fold-file", fold_file, "fixed fold assignment (par_id<TAB>fold)");

  auto* predict_cmd = app.add_subcommand("predict", "write a submission file for an unlabeled corpus");
  add_common(predict_cmd, o);
  predict_cmd->add_option("--input", input_path, "corpus TSV to label")->required();

  auto* evaluate = app.add_subcommand("evaluate", "score a submission file against gold labels");
  add_common(evaluate, o, false);
  evaluate->add_option("--pred", pred_path, "submission file")->required();
  evaluate->add_option("--gold", gold_path, "labeled corpus TSV")->required();

  auto* baseline = app.add_subcommand("baseline", "best-guess (always positive) F1 per target");
  add_common(baseline, o, false);
  baseline->add_option("--gold", gold_path, "labeled corpus TSV")->required();
  baseline->add_option("--trials", trials, "Monte Carlo trials per rate (0: closed form only)");
  baseline->add_option("--submission", submission, "also write the all-positive submission here");

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus with planted markers");
  add_common(synth, o, false);
  synth->add_option("--docs", n_docs, "number of documents")->check(CLI::PositiveNumber);
  synth->add_option("--rate", rate, "positive rate per category")->check(CLI::Range(0.0, 1.0));
  synth->add_flag("--unlabeled", unlabeled, "omit label columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*featurize) return cmd_featurize(o, train_path);
    if (*train) return cmd_train(o, train_path, eval_path, tune);
    if (*tune_cmd) {
      std::vector<std::pair<std::string, std::string>> grid;
      if (!grid_c.empty()) grid.emplace_back("grid.C", grid_c);
      if (!grid_w.empty()) grid.emplace_back("grid.w", grid_w);
      return cmd_tune(o, train_path, fold_file, grid);
    }
    if (*predict_cmd) return cmd_predict(o, input_path);
    if (*evaluate) return cmd_evaluate(o, pred_path, gold_path);
    if (*baseline) return cmd_baseline(o, gold_path, trials, submission);
    if (*synth) return cmd_synth(o, n_docs, rate, unlabeled);
  } catch (const ConfigError& e) {
    std::cerr << "ngramlr: " << e.what() << '\n';
    return kUsage;
  } catch (const ConvergenceError& e) {
    std::cerr << "ngramlr: " << e.what() << '\n';
    return kConvergence;
  } catch (const std::exception& e) {
    std::cerr << "ngramlr: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
