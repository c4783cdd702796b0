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
#include <tuple>
#include <utility>
#include <vector>

#include "ngramlr/corpus.hpp"
#include "ngramlr/detail/parallel.hpp"
#include "ngramlr/detail/text.hpp"
#include "ngramlr/error.hpp"
#include "ngramlr/logreg.hpp"
#include "ngramlr/metrics.hpp"

namespace ngramlr {

struct GridSpec {
  std::vector<double> c_values;
  std::vector<double> w_values;

  void validate() const {
    if (c_values.empty() || w_values.empty()) throw ConfigError("grid: C and w value lists must be nonempty");
    for (double v : c_values)
      if (!(v > 0.0)) throw ConfigError("grid: C values must be positive");
    for (double v : w_values)
      if (!(v > 0.0)) throw ConfigError("grid: w values must be positive");
  }
};

struct CellResult {
  double C = 0.0;
  double w = 0.0;
  Confusion counts;
  Scores scores;
};

struct CvResult {
  std::vector<CellResult> cells;  // C-major, in grid order
  std::size_t best_index = 0;
  int k = 0;
  std::uint64_t seed = 0;

  const CellResult& best() const { return cells.at(best_index); }
  std::pair<double, double> best_params() const { return {best().C, best().w}; }
};

inline std::vector<Label> labels_of(DatasetView data) {
  std::vector<Label> y;
  y.reserve(data.y.size());
  for (int v : data.y) y.push_back(v > 0 ? 1 : 0);
  return y;
}

/// Trains on all folds but one, predicts the held-out fold, and sums the
/// confusion counts over every fold.
inline Confusion cross_validate(DatasetView data, const FoldAssignment& folds, const TrainConfig& config) {
  if (folds.fold_of.size() != data.size()) throw DataError("cross_validate: fold assignment size mismatch");
  Confusion pooled;
  for (int f = 0; f < folds.k; ++f) {
    const auto held_out = folds.members(f);
    if (held_out.empty()) continue;
    const auto model = train(data, folds.complement(f), config);
    for (std::size_t i : held_out) {
      const bool pred = predict(model, data.x[i]) == 1;
      const bool gold = data.y[i] > 0;
      if (pred) {
        ++(gold ? pooled.tp : pooled.fp);
      } else {
        ++(gold ? pooled.fn : pooled.tn);
      }
    }
  }
  return pooled;
}

inline Confusion cross_validate(DatasetView data, double C, double w, int k, std::uint64_t seed,
                                TrainConfig base = {}) {
  base.C = C;
  base.positive_weight = w;
  const auto labels = labels_of(data);
  return cross_validate(data, stratified_kfold(labels, k, seed), base);
}

namespace detail {

// Strict-weak "better" order: higher F1, then smaller C, then smaller w.
inline bool better_cell(const CellResult& a, const CellResult& b) {
  return std::make_tuple(-a.scores.f1, a.C, a.w) < std::make_tuple(-b.scores.f1, b.C, b.w);
}

}  // namespace detail

/// Exhaustive search over every (C, w) pair using one shared fold assignment.
inline CvResult grid_search(DatasetView data, const GridSpec& grid, const FoldAssignment& folds,
                            const TrainConfig& base = {}, unsigned threads = 0) {
  grid.validate();
  CvResult r;
  r.k = folds.k;
  r.seed = folds.seed;
  for (double c : grid.c_values)
    for (double w : grid.w_values) r.cells.push_back({c, w, {}, {}});
  detail::parallel_for(
      r.cells.size(),
      [&](std::size_t i) {
        auto config = base;
        config.C = r.cells[i].C;
        config.positive_weight = r.cells[i].w;
        r.cells[i].counts = cross_validate(data, folds, config);
        r.cells[i].scores = precision_recall_f1(r.cells[i].counts);
      },
      threads);
  for (std::size_t i = 1; i < r.cells.size(); ++i)
    if (detail::better_cell(r.cells[i], r.cells[r.best_index])) r.best_index = i;
  return r;
}

inline CvResult grid_search(DatasetView data, const GridSpec& grid, int k, std::uint64_t seed,
                            const TrainConfig& base = {}, unsigned threads = 0) {
  const auto labels = labels_of(data);
  return grid_search(data, grid, stratified_kfold(labels, k, seed), base, threads);
}

/// Among cells whose F1 is the maximum or falls short of it by less than
/// delta, picks the one with the smallest |precision - recall|.
inline std::pair<double, double> secondary_selection(const CvResult& cv, double delta = 0.01) {
  if (cv.cells.empty()) throw ConfigError("secondary_selection: empty cross-validation result");
  if (!(delta >= 0.0)) throw ConfigError("secondary_selection: delta must be nonnegative");
  const double top = cv.best().scores.f1;
  const CellResult* pick = nullptr;
  auto gap = [](const CellResult& c) { return std::abs(c.scores.precision - c.scores.recall); };
  for (const auto& c : cv.cells) {
    const bool eligible = c.scores.f1 == top || top - c.scores.f1 < delta;
    if (!eligible) continue;
    if (pick == nullptr || std::make_tuple(gap(c), c.C, c.w) < std::make_tuple(gap(*pick), pick->C, pick->w)) {
      pick = &c;
    }
  }
  return {pick->C, pick->w};
}

/// One line per cell: C, w, TP, FP, FN, TN, P, R, F1 (tab-separated).
inline std::string format_cv_report(const CvResult& cv) {
  using detail::format_double;
  using detail::format_fixed;
  std::string out;
  for (const auto& c : cv.cells) {
    out += format_double(c.C) + '\t' + format_double(c.w) + '\t' + std::to_string(c.counts.tp) + '\t' +
           std::to_string(c.counts.fp) + '\t' + std::to_string(c.counts.fn) + '\t' + std::to_string(c.counts.tn) +
           '\t' + format_fixed(c.scores.precision) + '\t' + format_fixed(c.scores.recall) + '\t' +
           format_fixed(c.scores.f1) + '\n';
  }
  return out;
}

}  // namespace ngramlr
