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

#include <array>
#include <random>

#include "ngramlr/metrics.hpp"

namespace ngramlr {
namespace {

using Labels = std::vector<Label>;

TEST(Confusion, Examples) {
  EXPECT_EQ(confusion(Labels{1, 0}, Labels{1, 0}), (Confusion{1, 0, 0, 1}));
  // All-positive predictions over 100 instances with 20 positives.
  Labels gold(100, 0);
  std::fill(gold.begin(), gold.begin() + 20, Label{1});
  EXPECT_EQ(confusion(Labels(100, 1), gold), (Confusion{20, 80, 0, 0}));
  EXPECT_THROW(confusion(Labels{1}, Labels{1, 0}), DataError);
  EXPECT_THROW(confusion(Labels{}, Labels{}), DataError);
  EXPECT_THROW(confusion(Labels{2}, Labels{1}), DataError);
}

TEST(Confusion, MatchesIndependentRecount) {
  std::mt19937_64 rng(1000);
  Labels pred(1000), gold(1000);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    pred[i] = static_cast<Label>(rng() & 1);
    gold[i] = static_cast<Label>((rng() >> 1) & 1);
  }
  std::array<std::array<std::uint64_t, 2>, 2> table{};
  for (std::size_t i = 0; i < pred.size(); ++i) ++table[pred[i]][gold[i]];
  const auto c = confusion(pred, gold);
  EXPECT_EQ(c.tp, table[1][1]);
  EXPECT_EQ(c.fp, table[1][0]);
  EXPECT_EQ(c.fn, table[0][1]);
  EXPECT_EQ(c.tn, table[0][0]);
  EXPECT_EQ(c.total(), 1000u);
}

// Counts chosen so that P and R round to the reference three-decimal values.
TEST(PrecisionRecallF1, ReferenceRows) {
  const auto row_a = precision_recall_f1(Confusion{2001, 3749, 1624, 0});
  EXPECT_NEAR(row_a.precision, 0.348, 0.0005);
  EXPECT_NEAR(row_a.recall, 0.552, 0.0005);
  EXPECT_NEAR(row_a.f1, 0.427, 0.0005);
  const auto row_b = precision_recall_f1(Confusion{26486, 14514, 13889, 0});
  EXPECT_NEAR(row_b.precision, 0.646, 0.0005);
  EXPECT_NEAR(row_b.recall, 0.656, 0.0005);
  EXPECT_NEAR(row_b.f1, 0.651, 0.0005);
}

TEST(PrecisionRecallF1, ZeroOverZeroIsZero) {
  const auto s = precision_recall_f1(Confusion{0, 0, 0, 5});
  EXPECT_EQ(s.precision, 0.0);
  EXPECT_EQ(s.recall, 0.0);
  EXPECT_EQ(s.f1, 0.0);
  const auto only_fn = precision_recall_f1(Confusion{0, 0, 3, 5});
  EXPECT_EQ(only_fn.precision, 0.0);
  EXPECT_EQ(only_fn.f1, 0.0);
}

TEST(PrecisionRecallF1, HarmonicMeanProperty) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Confusion c{1 + rng() % 500, 1 + rng() % 500, 1 + rng() % 500, rng() % 500};
    const auto s = precision_recall_f1(c);
    EXPECT_NEAR(s.f1, 2.0 / (1.0 / s.precision + 1.0 / s.recall), 1e-12);
    EXPECT_NEAR(s.f1, 2.0 * c.tp / static_cast<double>(2 * c.tp + c.fp + c.fn), 1e-12);
    EXPECT_GE(s.f1, 0.0);
    EXPECT_LE(s.f1, 1.0);
  }
}

TEST(MeanF1, ReferenceRows) {
  const std::array<double, 7> row_a{0.424, 0.331, 0.170, 0.232, 0.175, 0.315, 0.142};
  EXPECT_NEAR(mean_f1(row_a), 0.256, 0.0005);
  const std::array<double, 7> baseline{0.354, 0.0, 0.167, 0.0, 0.0, 0.209, 0.0};
  EXPECT_NEAR(mean_f1(baseline), 0.104, 0.0005);
  EXPECT_EQ(mean_f1(std::array<double, 7>{}), 0.0);
  EXPECT_THROW(mean_f1(std::array<double, 3>{}), DataError);
}

TEST(F1BestGuess, Examples) {
  EXPECT_EQ(f1_best_guess(0.0), 0.0);
  EXPECT_EQ(f1_best_guess(1.0), 1.0);
  EXPECT_NEAR(f1_best_guess(1.0 / 3.0), 0.5, 1e-15);
  EXPECT_NEAR(f1_best_guess(0.095), 0.17351598173515981, 1e-15);
  EXPECT_THROW(f1_best_guess(-0.1), ConfigError);
  EXPECT_THROW(f1_best_guess(1.5), ConfigError);
}

TEST(F1BestGuess, StrictlyIncreasing) {
  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = f1_best_guess(i / 1000.0);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

// Agrees with the constant all-positive predictor on an explicit label vector.
TEST(F1BestGuess, MatchesAllPositivePredictor) {
  for (int pos : {1, 7, 50, 95, 300}) {
    Labels gold(1000, 0);
    std::fill(gold.begin(), gold.begin() + pos, Label{1});
    const auto f1 = precision_recall_f1(confusion(Labels(1000, 1), gold)).f1;
    EXPECT_NEAR(f1, f1_best_guess(pos / 1000.0), 1e-12);
  }
}

std::vector<double> rate_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 20; ++i) g.push_back(i / 20.0);
  return g;
}

TEST(MonteCarlo, BestRateIsOneAndMatchesClosedForm) {
  const auto grid = rate_grid();
  for (double q : {0.05, 0.095, 0.5}) {
    const auto r = monte_carlo_best_guess(q, grid, 5000, 42);
    EXPECT_EQ(r.best_p, 1.0) << q;
    EXPECT_NEAR(r.best_f1, f1_best_guess(q), 0.01) << q;
    ASSERT_EQ(r.mean_f1.size(), grid.size());
    // Upper bound: the closed form plus three standard errors.
    for (std::size_t g = 0; g < grid.size(); ++g) EXPECT_LE(r.mean_f1[g], f1_best_guess(q) + 3 * r.std_error[g] + 1e-12);
  }
}

TEST(MonteCarlo, DeterministicAndEdgeRates) {
  const std::vector<double> grid{0.0, 0.3, 1.0};
  const auto a = monte_carlo_best_guess(0.2, grid, 1, 9);
  const auto b = monte_carlo_best_guess(0.2, grid, 1, 9);
  EXPECT_EQ(a.mean_f1, b.mean_f1);
  EXPECT_EQ(a.mean_f1[0], 0.0);
  EXPECT_NEAR(a.mean_f1[2], f1_best_guess(0.2), 1e-12);
  EXPECT_THROW(monte_carlo_best_guess(0.2, grid, 0, 1), ConfigError);
  EXPECT_THROW(monte_carlo_best_guess(0.2, std::vector<double>{}, 1, 1), ConfigError);
  EXPECT_THROW(monte_carlo_best_guess(0.2, std::vector<double>{1.2}, 1, 1), ConfigError);
}

TEST(Report, FormatIsStable) {
  const std::array<std::string, 2> names{"a", "b"};
  const std::array<Confusion, 2> counts{Confusion{1, 1, 0, 2}, Confusion{0, 0, 1, 3}};
  const auto r = make_report(names, counts);
  EXPECT_NEAR(r.mean_f1, (2.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(format_report(r),
            "[a]\ntp=1\nfp=1\nfn=0\ntn=2\nprecision=0.500000\nrecall=1.000000\nf1=0.666667\n"
            "[b]\ntp=0\nfp=0\nfn=1\ntn=3\nprecision=0.000000\nrecall=0.000000\nf1=0.000000\n"
            "summary categories=2 mean_f1=0.333333\n");
}

}  // namespace
}  // namespace ngramlr
