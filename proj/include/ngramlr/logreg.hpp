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
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ngramlr/bm25.hpp"
#include "ngramlr/corpus.hpp"
#include "ngramlr/detail/text.hpp"
#include "ngramlr/error.hpp"

namespace ngramlr {

struct TrainConfig {
  double C = 1.0;
  double positive_weight = 1.0;  // multiplies C on positive instances
  double tol = 1e-4;             // relative to the gradient norm at the origin
  int max_iter = 1000;
  std::uint64_t seed = 0;        // the Newton solver is deterministic; kept for reproducibility records
  bool bias = true;

  void validate() const {
    if (!(C > 0.0) || !std::isfinite(C)) throw ConfigError("C must be positive and finite");
    if (!(positive_weight > 0.0) || !std::isfinite(positive_weight)) {
      throw ConfigError("positive_weight must be positive and finite");
    }
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
  }

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Feature vectors with labels in {-1, +1}.
struct Dataset {
  std::vector<WeightedVector> x;
  std::vector<int> y;
  std::size_t dim = 0;

  std::size_t size() const { return x.size(); }
};

/// Non-owning view of a Dataset; lets several label sets share one set of vectors.
struct DatasetView {
  std::span<const WeightedVector> x;
  std::span<const int> y;
  std::size_t dim = 0;

  DatasetView(std::span<const WeightedVector> x_, std::span<const int> y_, std::size_t dim_)
      : x(x_), y(y_), dim(dim_) {}
  DatasetView(const Dataset& d) : x(d.x), y(d.y), dim(d.dim) {}  // NOLINT: implicit by intent

  std::size_t size() const { return x.size(); }
};

inline std::vector<int> to_signed(std::span<const Label> labels) {
  std::vector<int> y;
  y.reserve(labels.size());
  for (Label l : labels) y.push_back(l ? 1 : -1);
  return y;
}

struct ModelWeights {
  std::vector<double> w;
  double bias_weight = 0.0;
  TrainConfig config;
  double objective_value = 0.0;
  int n_iterations = 0;
  std::string vocab_hash = "-";  // fingerprint of the vocabulary the weights index into

  friend bool operator==(const ModelWeights&, const ModelWeights&) = default;
};

namespace detail {

// Rows of a Dataset selected for one optimization problem.
struct Problem {
  std::vector<const WeightedVector*> x;
  std::vector<double> y;
  std::vector<double> cost;
  std::size_t dim = 0;
  bool bias = true;

  Problem(DatasetView data, std::span<const std::size_t> rows, const TrainConfig& config)
      : dim(data.dim), bias(config.bias) {
    if (data.y.size() != data.x.size()) throw DataError("dataset: label count does not match vector count");
    x.reserve(rows.size());
    for (std::size_t i : rows) {
      if (i >= data.size()) throw DataError("dataset row index out of range");
      const int yi = data.y[i];
      if (yi != 1 && yi != -1) throw DataError("labels must be -1 or +1, found " + std::to_string(yi));
      for (const auto& f : data.x[i]) {
        if (f.index >= dim) throw DataError("feature index " + std::to_string(f.index) + " exceeds dimension");
        if (!std::isfinite(f.value)) throw DataError("non-finite feature value");
      }
      x.push_back(&data.x[i]);
      y.push_back(yi);
      cost.push_back(yi == 1 ? config.C * config.positive_weight : config.C);
    }
  }

  std::size_t size() const { return x.size(); }

  // Parameter vector layout: [w_0 .. w_{dim-1}, bias].
  double margin(std::size_t i, std::span<const double> p) const {
    double z = bias ? p[dim] : 0.0;
    for (const auto& f : *x[i]) z += p[f.index] * f.value;
    return z;
  }
};

// ln(1 + exp(-m)) without overflow.
inline double log1p_exp_neg(double m) {
  return m >= 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

// 1 / (1 + exp(-m))
inline double sigmoid(double m) {
  if (m >= 0.0) return 1.0 / (1.0 + std::exp(-m));
  const double e = std::exp(m);
  return e / (1.0 + e);
}

inline double regularizer(std::span<const double> p, std::size_t dim) {
  double sq = 0.0;
  for (std::size_t j = 0; j < dim; ++j) sq += p[j] * p[j];
  return 0.5 * sq;
}

inline double problem_objective(const Problem& pb, std::span<const double> p) {
  double f = regularizer(p, pb.dim);
  for (std::size_t i = 0; i < pb.size(); ++i) f += pb.cost[i] * log1p_exp_neg(pb.y[i] * pb.margin(i, p));
  return f;
}

// Returns f(p), fills grad and the Hessian diagonal weights D_i = c_i s_i (1 - s_i).
inline double objective_grad(const Problem& pb, std::span<const double> p, std::vector<double>& grad,
                             std::vector<double>& hess_d) {
  const std::size_t n = pb.dim + 1;
  grad.assign(n, 0.0);
  hess_d.assign(pb.size(), 0.0);
  double f = regularizer(p, pb.dim);
  for (std::size_t j = 0; j < pb.dim; ++j) grad[j] = p[j];
  for (std::size_t i = 0; i < pb.size(); ++i) {
    const double m = pb.y[i] * pb.margin(i, p);
    f += pb.cost[i] * log1p_exp_neg(m);
    const double s = sigmoid(m);
    const double coef = pb.cost[i] * (s - 1.0) * pb.y[i];
    for (const auto& feat : *pb.x[i]) grad[feat.index] += coef * feat.value;
    if (pb.bias) grad[pb.dim] += coef;
    hess_d[i] = pb.cost[i] * s * (1.0 - s);
  }
  return f;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// out = H v, H = diag(1,..,1,0) + X^T D X over the augmented [x, 1] rows.
inline void hessian_vector(const Problem& pb, std::span<const double> hess_d, std::span<const double> v,
                           std::vector<double>& out) {
  out.assign(pb.dim + 1, 0.0);
  for (std::size_t j = 0; j < pb.dim; ++j) out[j] = v[j];
  for (std::size_t i = 0; i < pb.size(); ++i) {
    const double xv = pb.margin(i, v) * hess_d[i];
    for (const auto& f : *pb.x[i]) out[f.index] += xv * f.value;
    if (pb.bias) out[pb.dim] += xv;
  }
}

// Preconditioned conjugate gradient for H s = -g; stops once the residual
// drops below eta * ||g||.
inline std::vector<double> newton_direction(const Problem& pb, std::span<const double> hess_d,
                                            std::span<const double> grad, double eta) {
  const std::size_t n = pb.dim + 1;
  std::vector<double> precond(n, 1.0);
  precond[pb.dim] = 0.0;
  for (std::size_t i = 0; i < pb.size(); ++i) {
    for (const auto& f : *pb.x[i]) precond[f.index] += hess_d[i] * f.value * f.value;
    if (pb.bias) precond[pb.dim] += hess_d[i];
  }
  if (!(precond[pb.dim] > 0.0)) precond[pb.dim] = 1.0;

  std::vector<double> s(n, 0.0), r(n), z(n), d(n), hd;
  for (std::size_t j = 0; j < n; ++j) r[j] = -grad[j];
  if (!pb.bias) r[pb.dim] = 0.0;
  for (std::size_t j = 0; j < n; ++j) z[j] = r[j] / precond[j];
  d = z;
  double rz = dot(r, z);
  const double stop = eta * norm2(grad);
  const std::size_t max_cg = std::max<std::size_t>(50, std::min<std::size_t>(2 * n, 1000));
  for (std::size_t it = 0; it < max_cg; ++it) {
    if (norm2(r) <= stop) break;
    hessian_vector(pb, hess_d, d, hd);
    const double dhd = dot(d, hd);
    if (!(dhd > 0.0)) break;
    const double alpha = rz / dhd;
    for (std::size_t j = 0; j < n; ++j) {
      s[j] += alpha * d[j];
      r[j] -= alpha * hd[j];
    }
    for (std::size_t j = 0; j < n; ++j) z[j] = r[j] / precond[j];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t j = 0; j < n; ++j) d[j] = z[j] + beta * d[j];
  }
  return s;
}

inline ModelWeights solve(const Problem& pb, const TrainConfig& config) {
  bool has_pos = false, has_neg = false;
  for (double yi : pb.y) (yi > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw DataError("train: training data must contain both classes");

  const std::size_t n = pb.dim + 1;
  std::vector<double> p(n, 0.0), grad, hess_d, trial(n), trial_grad, trial_hess;
  double f = objective_grad(pb, p, grad, hess_d);
  const double g0 = norm2(grad);
  double gnorm = g0;
  int iter = 0;
  while (gnorm > config.tol * g0) {
    if (iter >= config.max_iter) {
      throw ConvergenceError("train: no convergence within " + std::to_string(config.max_iter) +
                                 " iterations (gradient norm " + format_double(gnorm) + ", target " +
                                 format_double(config.tol * g0) + ")",
                             gnorm);
    }
    const double eta = std::min(0.1, std::sqrt(gnorm / g0));
    const auto step_dir = newton_direction(pb, hess_d, grad, eta);
    const double slope = dot(grad, step_dir);
    if (!(slope < 0.0)) {
      throw ConvergenceError("train: no descent direction (gradient norm " + format_double(gnorm) + ")", gnorm);
    }
    // Backtracking (Armijo) line search along the Newton direction.
    double step = 1.0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      for (std::size_t j = 0; j < n; ++j) trial[j] = p[j] + step * step_dir[j];
      const double ft = problem_objective(pb, trial);
      if (ft <= f + 0.01 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      throw ConvergenceError("train: line search failed (gradient norm " + format_double(gnorm) + ")", gnorm);
    }
    p.swap(trial);
    f = objective_grad(pb, p, grad, hess_d);
    gnorm = norm2(grad);
    ++iter;
  }

  ModelWeights m;
  m.w.assign(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(pb.dim));
  m.bias_weight = pb.bias ? p[pb.dim] : 0.0;
  m.config = config;
  m.objective_value = f;
  m.n_iterations = iter;
  return m;
}

inline std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

inline std::vector<double> pack(std::span<const double> w, double bias, std::size_t dim) {
  if (w.size() != dim) throw DataError("weight vector length does not match dataset dimension");
  std::vector<double> p(w.begin(), w.end());
  p.push_back(bias);
  return p;
}

}  // namespace detail

/// 0.5 ||w||^2 + sum_i c_i ln(1 + exp(-y_i (w.x_i + bias))), where c_i is
/// C * positive_weight for positives and C otherwise. The bias is not penalized.
inline double objective(std::span<const double> w, double bias, DatasetView data, const TrainConfig& config) {
  const auto rows = detail::all_rows(data.size());
  const detail::Problem pb(data, rows, config);
  return detail::problem_objective(pb, detail::pack(w, bias, data.dim));
}

/// Gradient of objective(); the last component is the bias derivative (0 when bias is off).
inline std::vector<double> objective_gradient(std::span<const double> w, double bias, DatasetView data,
                                              const TrainConfig& config) {
  const auto rows = detail::all_rows(data.size());
  const detail::Problem pb(data, rows, config);
  std::vector<double> grad, hess_d;
  detail::objective_grad(pb, detail::pack(w, bias, data.dim), grad, hess_d);
  return grad;
}

/// Newton-CG with Armijo backtracking. Stops once the gradient norm
/// falls to config.tol times its value at the origin.
inline ModelWeights train(DatasetView data, std::span<const std::size_t> rows, const TrainConfig& config) {
  config.validate();
  const detail::Problem pb(data, rows, config);
  return detail::solve(pb, config);
}

inline ModelWeights train(DatasetView data, const TrainConfig& config) {
  const auto rows = detail::all_rows(data.size());
  return train(data, rows, config);
}

inline double decision_value(const ModelWeights& model, const WeightedVector& v) {
  double z = model.bias_weight;
  for (const auto& f : v) {
    if (f.index >= model.w.size()) throw DataError("decision_value: feature index exceeds model dimension");
    z += model.w[f.index] * f.value;
  }
  return z;
}

/// Positive iff the decision value is strictly above zero.
inline Label predict(const ModelWeights& model, const WeightedVector& v) {
  return decision_value(model, v) > 0.0 ? 1 : 0;
}

inline constexpr std::string_view kModelMagic = "ngramlr-model 1";

/// Text container; every double uses the shortest round-trip representation,
/// so format(parse(s)) == s.
inline std::string format_model(const ModelWeights& m) {
  using detail::format_double;
  std::string out;
  out += std::string(kModelMagic) + '\n';
  out += "vocab_hash " + m.vocab_hash + '\n';
  out += "dim " + std::to_string(m.w.size()) + '\n';
  out += "C " + format_double(m.config.C) + '\n';
  out += "positive_weight " + format_double(m.config.positive_weight) + '\n';
  out += "tol " + format_double(m.config.tol) + '\n';
  out += "max_iter " + std::to_string(m.config.max_iter) + '\n';
  out += "seed " + std::to_string(m.config.seed) + '\n';
  out += std::string("bias ") + (m.config.bias ? "1" : "0") + '\n';
  out += "objective " + format_double(m.objective_value) + '\n';
  out += "iterations " + std::to_string(m.n_iterations) + '\n';
  out += "bias_weight " + format_double(m.bias_weight) + '\n';
  out += "weights\n";
  for (double v : m.w) out += format_double(v) + '\n';
  out += "end\n";
  return out;
}

namespace detail {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::string_view next() {
    if (pos_ >= text_.size()) throw DataError("model: unexpected end of input (truncated file?)");
    auto eol = text_.find('\n', pos_);
    if (eol == std::string_view::npos) throw DataError("model: unterminated last line (truncated file?)");
    const auto line = text_.substr(pos_, eol - pos_);
    pos_ = eol + 1;
    return line;
  }

  std::string_view field(std::string_view key) {
    const auto line = next();
    if (line.size() <= key.size() || line.substr(0, key.size()) != key || line[key.size()] != ' ') {
      throw DataError("model: expected '" + std::string(key) + "', found '" + std::string(line) + "'");
    }
    return line.substr(key.size() + 1);
  }

  std::size_t position() const { return pos_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

inline ModelWeights read_model(LineReader& in) {
  const auto magic = in.next();
  if (magic != kModelMagic) {
    throw DataError("model: unsupported header '" + std::string(magic) + "' (expected '" +
                    std::string(kModelMagic) + "')");
  }
  ModelWeights m;
  m.vocab_hash = std::string(in.field("vocab_hash"));
  const auto dim = parse_or_throw<std::size_t>(in.field("dim"), "dim");
  m.config.C = parse_or_throw<double>(in.field("C"), "C");
  m.config.positive_weight = parse_or_throw<double>(in.field("positive_weight"), "positive_weight");
  m.config.tol = parse_or_throw<double>(in.field("tol"), "tol");
  m.config.max_iter = parse_or_throw<int>(in.field("max_iter"), "max_iter");
  m.config.seed = parse_or_throw<std::uint64_t>(in.field("seed"), "seed");
  const auto bias = in.field("bias");
  if (bias != "0" && bias != "1") throw DataError("model: bias flag must be 0 or 1");
  m.config.bias = bias == "1";
  m.objective_value = parse_or_throw<double>(in.field("objective"), "objective");
  m.n_iterations = parse_or_throw<int>(in.field("iterations"), "iterations");
  m.bias_weight = parse_or_throw<double>(in.field("bias_weight"), "bias_weight");
  if (in.next() != "weights") throw DataError("model: missing weights section");
  m.w.reserve(dim);
  for (std::size_t j = 0; j < dim; ++j) m.w.push_back(parse_or_throw<double>(in.next(), "weight"));
  if (in.next() != "end") throw DataError("model: missing end marker");
  return m;
}

}  // namespace detail

inline ModelWeights parse_model(std::string_view text) {
  detail::LineReader in(text);
  auto m = detail::read_model(in);
  if (in.position() != text.size()) throw DataError("model: trailing data after end marker");
  return m;
}

inline void save_model(const std::string& path, const ModelWeights& m) {
  auto out = detail::open_output(path);
  out << format_model(m);
  if (!out) throw DataError("failed writing '" + path + "'");
}

inline ModelWeights load_model(const std::string& path) { return parse_model(detail::read_file(path)); }

}  // namespace ngramlr
