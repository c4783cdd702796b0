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
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ngramlr/corpus.hpp"
#include "ngramlr/detail/random.hpp"
#include "ngramlr/detail/text.hpp"
#include "ngramlr/error.hpp"

namespace ngramlr {

struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  Confusion& operator+=(const Confusion& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  std::uint64_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline Confusion confusion(std::span<const Label> pred, std::span<const Label> gold) {
  if (pred.size() != gold.size()) {
    throw DataError("confusion: " + std::to_string(pred.size()) + " predictions vs " + std::to_string(gold.size()) +
                    " gold labels");
  }
  if (pred.empty()) throw DataError("confusion: empty input");
  Confusion c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] > 1 || gold[i] > 1) throw DataError("confusion: labels must be 0 or 1");
    if (pred[i]) {
      ++(gold[i] ? c.tp : c.fp);
    } else {
      ++(gold[i] ? c.fn : c.tn);
    }
  }
  return c;
}

/// Positive-class precision, recall and F1; every 0/0 is taken as 0.
inline Scores precision_recall_f1(const Confusion& c) {
  Scores s;
  const auto tp = static_cast<double>(c.tp);
  if (c.tp + c.fp > 0) s.precision = tp / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) s.recall = tp / static_cast<double>(c.tp + c.fn);
  if (s.precision + s.recall > 0.0) s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

/// Unweighted mean over the seven category F1 scores.
inline double mean_f1(std::span<const double> f1s) {
  if (f1s.size() != kNumCategories) {
    throw DataError("mean_f1: expected " + std::to_string(kNumCategories) + " scores, got " +
                    std::to_string(f1s.size()));
  }
  return std::accumulate(f1s.begin(), f1s.end(), 0.0) / static_cast<double>(f1s.size());
}

/// F1 of the constant all-positive predictor when a fraction q of instances is positive.
inline double f1_best_guess(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("f1_best_guess: q must lie in [0, 1]");
  return 2.0 * q / (q + 1.0);
}

struct MonteCarloResult {
  double best_p = 0.0;
  double best_f1 = 0.0;
  std::vector<double> mean_f1;    // one per grid point
  std::vector<double> std_error;  // standard error of each mean
};

/// Simulates knowledge-free random predictors. Each trial fixes round(q * n)
/// positives among n instances and emits positive predictions independently
/// with rate p. Because predictions ignore the labels, the true and false
/// positive counts are independent binomials, which is what gets sampled.
inline MonteCarloResult monte_carlo_best_guess(double q, std::span<const double> p_grid, std::size_t trials,
                                               std::uint64_t seed, std::size_t n_instances = 1000) {
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("monte_carlo_best_guess: q must lie in [0, 1]");
  if (trials < 1) throw ConfigError("monte_carlo_best_guess: trials must be at least 1");
  if (p_grid.empty()) throw ConfigError("monte_carlo_best_guess: empty rate grid");
  if (n_instances < 1) throw ConfigError("monte_carlo_best_guess: need at least one instance");
  const auto n_pos = static_cast<std::uint64_t>(std::llround(q * static_cast<double>(n_instances)));
  const auto n_neg = static_cast<std::uint64_t>(n_instances) - n_pos;

  MonteCarloResult r;
  for (std::size_t g = 0; g < p_grid.size(); ++g) {
    const double p = p_grid[g];
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("monte_carlo_best_guess: rates must lie in [0, 1]");
    detail::Rng rng(detail::derive_seed(seed, g));
    std::binomial_distribution<std::uint64_t> draw_tp(n_pos, p), draw_fp(n_neg, p);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      Confusion c;
      c.tp = p >= 1.0 ? n_pos : (p <= 0.0 ? 0 : draw_tp(rng));
      c.fp = p >= 1.0 ? n_neg : (p <= 0.0 ? 0 : draw_fp(rng));
      c.fn = n_pos - c.tp;
      c.tn = n_neg - c.fp;
      const double f1 = precision_recall_f1(c).f1;
      sum += f1;
      sum_sq += f1 * f1;
    }
    const double n = static_cast<double>(trials);
    const double mean = sum / n;
    const double var = trials > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
    r.mean_f1.push_back(mean);
    r.std_error.push_back(std::sqrt(var / n));
    if (g == 0 || mean > r.best_f1) {
      r.best_f1 = mean;
      r.best_p = p;
    }
  }
  return r;
}

struct CategoryScore {
  std::string name;
  Confusion counts;
  Scores scores;
};

struct EvalReport {
  std::vector<CategoryScore> categories;
  double mean_f1 = 0.0;
};

inline EvalReport make_report(std::span<const std::string> names, std::span<const Confusion> counts) {
  if (names.size() != counts.size() || names.empty()) throw DataError("make_report: mismatched inputs");
  EvalReport r;
  double total = 0.0;
  for (std::size_t i = 0; i < names.size(); ++i) {
    r.categories.push_back({names[i], counts[i], precision_recall_f1(counts[i])});
    total += r.categories.back().scores.f1;
  }
  r.mean_f1 = total / static_cast<double>(names.size());
  return r;
}

/// Per-category blocks followed by one summary line; field order is fixed.
inline std::string format_report(const EvalReport& r) {
  using detail::format_fixed;
  std::string out;
  for (const auto& c : r.categories) {
    out += "[" + c.name + "]\n";
    out += "tp=" + std::to_string(c.counts.tp) + "\n";
    out += "fp=" + std::to_string(c.counts.fp) + "\n";
    out += "fn=" + std::to_string(c.counts.fn) + "\n";
    out += "tn=" + std::to_string(c.counts.tn) + "\n";
    out += "precision=" + format_fixed(c.scores.precision) + "\n";
    out += "recall=" + format_fixed(c.scores.recall) + "\n";
    out += "f1=" + format_fixed(c.scores.f1) + "\n";
  }
  out += "summary categories=" + std::to_string(r.categories.size()) + " mean_f1=" + format_fixed(r.mean_f1) + "\n";
  return out;
}

}  // namespace ngramlr
