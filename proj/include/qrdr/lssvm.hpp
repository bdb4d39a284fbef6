// Copyright 2026 The QRDR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "qrdr/dataset.hpp"
#include "qrdr/errors.hpp"
#include "qrdr/parallel.hpp"
#include "qrdr/tensor.hpp"

namespace qrdr {

namespace tol {
/// Relative residual of the bordered LS-SVM system.
inline constexpr double kLssvmResidual = 1e-8;
/// Smallest kernel eigenvalue tolerated as PSD rounding.
inline constexpr double kKernelPsd = 1e-9;
}  // namespace tol

/// K_jk = x_j . x_k over rows.
inline RMatrix kernel_matrix(const RMatrix& x) {
  if (x.rows() < 1) throw ValidationError("kernel_matrix: need at least one sample");
  RMatrix k = x * x.transpose();
  return 0.5 * (k + k.transpose());
}

struct LssvmModel {
  double eta0 = 0.0;
  RVector eta;
  double gamma = 1.0;
  RMatrix support;
  RVector labels;

  double decision(const RVector& query) const {
    if (query.size() != support.cols()) {
      throw DimensionError("lssvm: query has " + std::to_string(query.size()) +
                           " features, model expects " + std::to_string(support.cols()));
    }
    return eta.dot(support * query) + eta0;
  }

  /// sign(f(x)), with f = 0 sent to +1.
  int predict(const RVector& query) const { return decision(query) >= 0.0 ? 1 : -1; }

  std::vector<int> predict(const RMatrix& queries) const {
    if (queries.cols() != support.cols()) throw DimensionError("lssvm: query feature count");
    const RVector f = queries * (support.transpose() * eta);
    std::vector<int> out(static_cast<std::size_t>(f.size()));
    for (Index i = 0; i < f.size(); ++i) out[static_cast<std::size_t>(i)] = f(i) + eta0 >= 0.0 ? 1 : -1;
    return out;
  }
};

/// [[0, 1^T], [1, K + I/gamma]].
inline RMatrix lssvm_system(const RMatrix& kernel, double gamma) {
  const Index m = kernel.rows();
  RMatrix a(m + 1, m + 1);
  a(0, 0) = 0.0;
  a.block(0, 1, 1, m).setOnes();
  a.block(1, 0, m, 1).setOnes();
  a.block(1, 1, m, m) = kernel;
  a.block(1, 1, m, m).diagonal().array() += 1.0 / gamma;
  return a;
}

inline LssvmModel train_lssvm(const RMatrix& x, const std::vector<int>& y, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("train_lssvm: gamma must be > 0");
  const Index m = x.rows();
  if (m < 2) throw ValidationError("train_lssvm: need at least two samples");
  if (static_cast<Index>(y.size()) != m) throw DimensionError("train_lssvm: label count");
  RVector yv(m);
  for (Index i = 0; i < m; ++i) {
    const int v = y[static_cast<std::size_t>(i)];
    if (v != 1 && v != -1) throw ValidationError("train_lssvm: labels must be +1 or -1");
    yv(i) = v;
  }
  const RMatrix a = lssvm_system(kernel_matrix(x), gamma);
  RVector rhs(m + 1);
  rhs(0) = 0.0;
  rhs.tail(m) = yv;

  // K + I/gamma is SPD, so eliminate eta through its Cholesky factor.
  const Eigen::LLT<RMatrix> llt(a.block(1, 1, m, m));
  if (llt.info() != Eigen::Success) throw Error("train_lssvm: kernel block is not positive definite");
  const RVector ones = RVector::Ones(m);
  const RVector k_inv_ones = llt.solve(ones);
  const RVector k_inv_y = llt.solve(yv);
  const double schur = ones.dot(k_inv_ones);
  if (!(schur > 0.0)) throw Error("train_lssvm: singular system");

  LssvmModel model;
  model.gamma = gamma;
  model.eta0 = ones.dot(k_inv_y) / schur;
  model.eta = k_inv_y - model.eta0 * k_inv_ones;
  model.support = x;
  model.labels = yv;

  RVector sol(m + 1);
  sol(0) = model.eta0;
  sol.tail(m) = model.eta;
  const double residual = (a * sol - rhs).norm();
  if (!(residual <= tol::kLssvmResidual * yv.norm())) {
    throw Error("train_lssvm: residual " + std::to_string(residual) + " too large");
  }
  return model;
}

inline double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size() || truth.empty()) throw DimensionError("accuracy: size mismatch");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

inline std::vector<double> default_gamma_grid() { return {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}; }

/// Mean held-out accuracy of gamma over the folds of `plan`, training on the
/// complement each time.
inline double fold_accuracy(const LabeledDataset& ds, const FoldPlan& plan, double gamma) {
  double sum = 0.0;
  int used = 0;
  for (int f = 0; f < plan.k; ++f) {
    const auto test = plan.fold(f);
    if (test.empty()) continue;
    const auto train = ds.subset(plan.complement(f));
    const auto held = ds.subset(test);
    const auto model = train_lssvm(train.x, train.labels, gamma);
    sum += accuracy(model.predict(held.x), held.labels);
    ++used;
  }
  return used > 0 ? sum / used : 0.0;
}

struct GammaChoice {
  double gamma = 1.0;
  double inner_accuracy = 0.0;
};

/// Picks gamma by k-fold CV inside `train`. Ties keep the earlier grid entry.
inline GammaChoice select_gamma(const LabeledDataset& train, const std::vector<double>& grid,
                                int inner_folds, std::uint64_t seed) {
  if (grid.empty()) throw ValidationError("select_gamma: empty gamma grid");
  if (grid.size() == 1) return {grid.front(), 0.0};
  const FoldPlan plan = kfold_split(train, inner_folds, seed);
  GammaChoice best{grid.front(), -1.0};
  for (double g : grid) {
    const double a = fold_accuracy(train, plan, g);
    if (a > best.inner_accuracy) best = {g, a};
  }
  return best;
}

struct CvReport {
  std::vector<double> per_fold_accuracies;
  std::vector<double> chosen_gammas;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<std::string> warnings;
};

inline void to_json(nlohmann::json& j, const CvReport& r) {
  j = nlohmann::json{{"per_fold_accuracies", r.per_fold_accuracies},
                     {"mean", r.mean},
                     {"min", r.min},
                     {"max", r.max},
                     {"chosen_gammas", r.chosen_gammas},
                     {"warnings", r.warnings}};
}

namespace detail {
inline void summarize(const std::vector<double>& v, double& mean, double& lo, double& hi) {
  if (v.empty()) {
    mean = lo = hi = 0.0;
    return;
  }
  mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  lo = *std::min_element(v.begin(), v.end());
  hi = *std::max_element(v.begin(), v.end());
}

inline bool single_class(const std::vector<int>& labels) {
  return std::all_of(labels.begin(), labels.end(), [&](int v) { return v == labels.front(); });
}
}  // namespace detail

/// Outer k-fold CV. For each outer fold, gamma is chosen by leave-one-fold-out
/// CV over the remaining folds of the same plan.
inline CvReport cross_validate(const LabeledDataset& ds, const FoldPlan& plan,
                               const std::vector<double>& gamma_grid, unsigned threads = 1) {
  ds.validate();
  if (plan.assignment.size() != static_cast<std::size_t>(ds.samples())) {
    throw DimensionError("cross_validate: fold plan covers " + std::to_string(plan.assignment.size()) +
                         " samples, dataset has " + std::to_string(ds.samples()));
  }
  if (gamma_grid.empty()) throw ValidationError("cross_validate: empty gamma grid");
  for (double g : gamma_grid) {
    if (!(g > 0.0)) throw ValidationError("cross_validate: gamma values must be > 0");
  }
  const auto k = static_cast<std::size_t>(plan.k);
  CvReport report;
  report.per_fold_accuracies.assign(k, 0.0);
  report.chosen_gammas.assign(k, gamma_grid.front());
  std::vector<std::string> fold_warnings(k);

  parallel_for(k, threads, [&](std::size_t fi) {
    const int f = static_cast<int>(fi);
    const auto test_rows = plan.fold(f);
    const LabeledDataset train = ds.subset(plan.complement(f));
    const LabeledDataset test = ds.subset(test_rows);
    if (detail::single_class(train.labels)) {
      fold_warnings[fi] = "fold " + std::to_string(f) + ": training data has a single class";
    }

    // Inner plan: the outer assignment restricted to the training rows.
    double best_gamma = gamma_grid.front();
    if (gamma_grid.size() > 1 && plan.k > 2) {
      FoldPlan inner;
      inner.k = plan.k - 1;
      inner.seed = plan.seed;
      for (std::size_t i = 0; i < plan.assignment.size(); ++i) {
        const int a = plan.assignment[i];
        if (a != f) inner.assignment.push_back(a < f ? a : a - 1);
      }
      double best = -1.0;
      for (double g : gamma_grid) {
        const double acc = fold_accuracy(train, inner, g);
        if (acc > best) {
          best = acc;
          best_gamma = g;
        }
      }
    }
    report.chosen_gammas[fi] = best_gamma;
    const LssvmModel model = train_lssvm(train.x, train.labels, best_gamma);
    report.per_fold_accuracies[fi] = test_rows.empty() ? 0.0 : accuracy(model.predict(test.x), test.labels);
  });

  for (auto& w : fold_warnings) {
    if (!w.empty()) report.warnings.push_back(std::move(w));
  }
  detail::summarize(report.per_fold_accuracies, report.mean, report.min, report.max);
  return report;
}

struct HoldoutSpec {
  std::size_t test_count = 20;
  int repeats = 8;
  std::uint64_t seed = 7;
  int inner_folds = 8;
};

struct RSweepRow {
  int r = 0;
  std::vector<double> accuracies;  // one per repeat
  std::vector<double> chosen_gammas;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

inline void to_json(nlohmann::json& j, const RSweepRow& row) {
  j = nlohmann::json{{"r", row.r},
                     {"per_repeat_accuracies", row.accuracies},
                     {"mean", row.mean},
                     {"min", row.min},
                     {"max", row.max},
                     {"chosen_gammas", row.chosen_gammas}};
}

/// Maps (full feature matrix, R) to the M x R reduced feature matrix.
using FeatureReducer = std::function<RMatrix(const RMatrix&, int)>;

inline bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

/// Repeated holdout evaluation per R. Repeat s uses the same split for every R.
inline std::vector<RSweepRow> r_sweep(const LabeledDataset& ds, const std::vector<int>& r_values,
                                      const HoldoutSpec& holdout, const FeatureReducer& reduce,
                                      const std::vector<double>& gamma_grid = default_gamma_grid(),
                                      unsigned threads = 1) {
  ds.validate();
  if (holdout.repeats < 1) throw ValidationError("r_sweep: repeats must be >= 1");
  for (int r : r_values) {
    if (!is_power_of_two(r) || r < 2 || r > ds.features()) {
      throw ValidationError("r_sweep: R must be a power of two in [2, " + std::to_string(ds.features()) +
                            "], got " + std::to_string(r));
    }
  }
  std::vector<HoldoutSplit> splits;
  for (int s = 0; s < holdout.repeats; ++s) {
    splits.push_back(holdout_split(ds, holdout.test_count, holdout.seed + static_cast<std::uint64_t>(s)));
  }

  std::vector<RSweepRow> rows;
  for (int r : r_values) {
    LabeledDataset reduced = ds;
    reduced.x = reduce(ds.x, r);
    if (reduced.x.rows() != ds.samples()) throw DimensionError("r_sweep: reducer changed sample count");
    RSweepRow row;
    row.r = r;
    row.accuracies.assign(splits.size(), 0.0);
    row.chosen_gammas.assign(splits.size(), 0.0);
    parallel_for(splits.size(), threads, [&](std::size_t s) {
      const LabeledDataset train = reduced.subset(splits[s].train);
      const LabeledDataset test = reduced.subset(splits[s].test);
      const GammaChoice g = select_gamma(train, gamma_grid, holdout.inner_folds, holdout.seed + s);
      const LssvmModel model = train_lssvm(train.x, train.labels, g.gamma);
      row.accuracies[s] = accuracy(model.predict(test.x), test.labels);
      row.chosen_gammas[s] = g.gamma;
    });
    detail::summarize(row.accuracies, row.mean, row.min, row.max);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace qrdr
