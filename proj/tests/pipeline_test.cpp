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
#include <gtest/gtest.h>

#include <filesystem>

#include "ngramlr/pipeline.hpp"
#include "ngramlr/synth.hpp"

namespace ngramlr {
namespace {

struct Split {
  Corpus train;
  Corpus eval;
};

Split split(const Corpus& all, std::size_t n_train) {
  return {Corpus(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_train)),
          Corpus(all.begin() + static_cast<std::ptrdiff_t>(n_train), all.end())};
}

PipelineConfig fixed(double C, double w) {
  PipelineConfig p;
  p.train.C = C;
  p.train.positive_weight = w;
  return p;
}

ParagraphRecord record(std::string id, std::string text) {
  ParagraphRecord r;
  r.par_id = std::move(id);
  r.art_id = "a";
  r.keyword = "k";
  r.country = "c";
  r.text = std::move(text);
  return r;
}

TEST(RunTask1, PlantedMarkerHeldOut) {
  const auto data = split(generate(SynthSpec::binary(500, 0.1, 5)), 400);
  const auto r = run_task1(data.train, data.eval, fixed(10.0, 5.0));
  ASSERT_EQ(r.report.categories.size(), 1u);
  EXPECT_GE(r.report.categories[0].scores.f1, 0.95);
  EXPECT_EQ(r.predictions.size(), data.eval.size());
  EXPECT_EQ(r.model.model.vocab_hash, r.featurizer.hash());
}

TEST(RunTask1, TrainEqualsEvalIsPerfect) {
  const auto corpus = generate(SynthSpec::binary(150, 0.2, 6));
  const auto r = run_task1(corpus, corpus, fixed(10.0, 1.0));
  EXPECT_EQ(r.report.categories[0].scores.f1, 1.0);
}

TEST(RunTask1, FeatureFamiliesChangeVocabulary) {
  const auto corpus = generate(SynthSpec::binary(80, 0.2, 2));
  auto chars = fixed(1.0, 1.0);
  chars.ngrams.features = FeatureSet::character;
  auto words = chars;
  words.ngrams.features = FeatureSet::word;
  const auto combined = fixed(1.0, 1.0);
  const auto vc = run_task1(corpus, corpus, chars).featurizer.vocabulary();
  const auto vw = run_task1(corpus, corpus, words).featurizer.vocabulary();
  const auto vb = run_task1(corpus, corpus, combined).featurizer.vocabulary();
  EXPECT_EQ(vw.char_size(), 0u);
  EXPECT_EQ(vc.char_size(), vc.size());
  EXPECT_EQ(vb.size(), vc.size() + vw.size());
  EXPECT_NE(vc.hash(), vb.hash());
}

TEST(RunTask1, TuningRecordsGrid) {
  const auto data = split(generate(SynthSpec::binary(200, 0.1, 8)), 150);
  auto p = fixed(1.0, 1.0);
  p.tune = true;
  p.grid = GridSpec{{0.1, 10.0}, {1.0, 5.0}};
  p.folds = 3;
  const auto r = run_task1(data.train, data.eval, p);
  ASSERT_TRUE(r.model.cv.has_value());
  EXPECT_EQ(r.model.cv->cells.size(), 4u);
  EXPECT_EQ(r.model.model.config.C, r.model.cv->best().C);
  EXPECT_EQ(r.model.model.config.positive_weight, r.model.cv->best().w);
}

TEST(RunTask2, DisjointMarkers) {
  const auto data = split(generate(SynthSpec::multilabel(500, 0.1, 3)), 400);
  const auto r = run_task2(data.train, data.eval, fixed(10.0, 5.0));
  ASSERT_EQ(r.models.size(), kNumCategories);
  EXPECT_GE(r.report.mean_f1, 0.95);
  for (std::size_t c = 0; c < kNumCategories; ++c) EXPECT_EQ(r.models[c].target, category_target(c));
}

TEST(RunTask2, MultiLabelOutputAndIndependence) {
  const auto train_corpus = generate(SynthSpec::multilabel(300, 0.15, 4));
  const Corpus probe{record("q1", "The zorblax quentify report said mozzik frelp today")};
  auto base = fixed(10.0, 5.0);
  base.threads = 1;
  auto with_gold = probe;
  with_gold[0].task1_label = 1;
  with_gold[0].task2_labels = CategoryPrediction{1, 0, 0, 0, 0, 1, 0};
  const auto a = run_task2(train_corpus, with_gold, base);
  EXPECT_EQ(a.predictions[0], (CategoryPrediction{1, 0, 0, 0, 0, 1, 0}));

  // Changing one category's parameters leaves the other six untouched.
  auto other = base;
  other.target_params["b"] = {0.05, 50.0};
  other.threads = 3;
  const auto b = run_task2(train_corpus, with_gold, other);
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    if (c == 1) continue;
    EXPECT_EQ(format_model(a.models[c].model), format_model(b.models[c].model)) << c;
  }
}

TEST(RunTask2, MissingCategoryNamed) {
  auto corpus = generate(SynthSpec::multilabel(100, 0.1, 2));
  for (auto& r : corpus) (*r.task2_labels)[4] = 0;
  try {
    run_task2(corpus, Corpus{}, fixed(1.0, 1.0));
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("'e'"), std::string::npos) << e.what();
  }
}

class PredictFile : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / "ngramlr_pipeline_test";
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::filesystem::path dir_;
};

TEST_F(PredictFile, OrderEmptyTextAndDeterminism) {
  const auto corpus = generate(SynthSpec::binary(120, 0.2, 11));
  const auto r = run_task1(corpus, corpus, fixed(10.0, 1.0));
  const Corpus input{record("x1", "zorblax quentify the city"), record("x2", ""), record("x3", "the city report")};
  const std::array<TargetModel, 1> models{r.model};
  predict_file(r.featurizer, models, input, path("a.txt"));
  predict_file(r.featurizer, models, input, path("b.txt"));
  const auto text = detail::read_file(path("a.txt"));
  EXPECT_EQ(text, detail::read_file(path("b.txt")));
  const auto rows = parse_predictions(text, 1);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][0], 1);
  EXPECT_EQ(rows[1][0], r.model.model.bias_weight > 0.0 ? 1 : 0);
  EXPECT_EQ(rows[2][0], 0);
}

TEST_F(PredictFile, ArtifactsRoundTrip) {
  const auto corpus = generate(SynthSpec::multilabel(150, 0.15, 12));
  const auto r = run_task2(corpus, corpus, fixed(10.0, 1.0));
  r.featurizer.save(path("feat"));
  save_bundle(path("bundle"), r.models);
  const auto feat = Featurizer::load(path("feat"));
  const auto models = load_bundle(path("bundle"));
  EXPECT_EQ(feat.format(), r.featurizer.format());
  EXPECT_EQ(format_bundle(models), format_bundle(r.models));
  const auto text = format_predictions(feat, models, corpus);
  const auto rows = parse_predictions(text, kNumCategories);
  const auto report = evaluate_predictions(rows, corpus, kNumCategories);
  EXPECT_EQ(format_report(report), format_report(r.report));
}

TEST_F(PredictFile, VocabularyMismatchRejected) {
  const auto a = run_task1(generate(SynthSpec::binary(60, 0.2, 1)), Corpus{}, fixed(1.0, 1.0));
  const auto b = run_task1(generate(SynthSpec::binary(60, 0.2, 2)), Corpus{}, fixed(1.0, 1.0));
  const std::array<TargetModel, 1> models{a.model};
  EXPECT_THROW(format_predictions(b.featurizer, models, Corpus{record("x", "t")}), DataError);
  EXPECT_THROW(parse_bundle("ngramlr-bundle 1\ncount 1\n"), DataError);
  EXPECT_THROW(Featurizer::parse("nonsense"), DataError);
}

TEST(Evaluate, AllNegativeGivesZero) {
  const auto corpus = generate(SynthSpec::multilabel(50, 0.2, 3));
  const std::vector<std::vector<Label>> rows(corpus.size(), std::vector<Label>(kNumCategories, 0));
  EXPECT_EQ(evaluate_predictions(rows, corpus, kNumCategories).mean_f1, 0.0);
  EXPECT_THROW(evaluate_predictions(std::vector<std::vector<Label>>{}, corpus, 7), DataError);
  EXPECT_THROW(parse_predictions("1,0\n", 7), DataError);
}

}  // namespace
}  // namespace ngramlr
