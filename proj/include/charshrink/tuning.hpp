#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "charshrink/admm.hpp"
#include "charshrink/lda.hpp"
#include "charshrink/rng.hpp"

namespace charshrink {

/// Strictly decreasing positive tuning parameters; a terminal 0 is allowed.
struct LambdaGrid {
  std::vector<double> values;

  explicit LambdaGrid(std::vector<double> values_);
};

/// Log-spaced grid from lambda_max down to lambda_max * 1e-4, where
/// lambda_max is the largest |entry| of A Omega_0 B - C at the solver's
/// default initialization -- the level at which the first soft-threshold
/// zeroes Theta entirely. Entries with penalty weight w scale as |entry|/w.
/// A floor of 1e-8 keeps the grid valid when the characteristic vanishes
/// (e.g. identical class means).
LambdaGrid default_grid(const ProblemSpec& prob, int length);
LambdaGrid default_grid(const SymmetricMatrix& S, const DenseMatrix& A,
                        const DenseMatrix& B, const DenseMatrix& C,
                        int length);

struct SelectionRow {
  double lambda = 0.0;
  double metric = std::numeric_limits<double>::quiet_NaN();
  int iters = 0;
  bool converged = false;
  std::string error;  // empty unless the fit failed
};

template <class Model>
struct FittedModel {
  Model model;
  int iters = 0;
  bool converged = true;
};

/// fit(train, lambda, warm) fits at one grid point; warm is the previous
/// grid point's fit (nullptr at the first point or with warm starting off).
template <class Model>
using FitFn = std::function<FittedModel<Model>(const LabeledData& train,
                                               double lambda,
                                               const Model* warm)>;

template <class Model>
using MetricFn =
    std::function<double(const Model& model, const LabeledData& holdout)>;

template <class Model>
struct SelectionResult {
  double best_lambda = 0.0;
  Model best_model;
  std::vector<SelectionRow> table;
};

/// Fits once per grid value (warm-starting down the grid) and returns the
/// metric argmin. Ties go to the larger lambda, i.e. the sparser model; the
/// grid is descending, so a strict '<' comparison implements that. Throws
/// when every fit fails, listing the failures.
template <class Model>
SelectionResult<Model> validation_select(const LabeledData& train,
                                         const LabeledData& validation,
                                         const LambdaGrid& grid,
                                         const FitFn<Model>& fit,
                                         const MetricFn<Model>& metric,
                                         bool warm_start = true) {
  if (grid.values.empty()) {
    throw std::invalid_argument("validation_select: empty grid");
  }
  SelectionResult<Model> result;
  result.best_lambda = grid.values.front();
  double best_metric = std::numeric_limits<double>::infinity();
  bool any_ok = false;
  const Model* warm = nullptr;
  Model prev;
  for (double lambda : grid.values) {
    SelectionRow row;
    row.lambda = lambda;
    try {
      FittedModel<Model> fitted = fit(train, lambda, warm_start ? warm : nullptr);
      row.metric = metric(fitted.model, validation);
      row.iters = fitted.iters;
      row.converged = fitted.converged;
      if (!any_ok || row.metric < best_metric) {
        best_metric = row.metric;
        result.best_lambda = lambda;
        result.best_model = fitted.model;
      }
      any_ok = true;
      prev = std::move(fitted.model);
      warm = &prev;
    } catch (const std::exception& e) {
      row.error = e.what();
      warm = nullptr;
    }
    result.table.push_back(std::move(row));
  }
  if (!any_ok) {
    std::string msg = "validation_select: every fit failed:";
    for (const auto& row : result.table) {
      msg += "\n  lambda=" + std::to_string(row.lambda) + ": " + row.error;
    }
    throw std::runtime_error(msg);
  }
  return result;
}

/// Stratified fold ids (0..folds-1) per observation: within each class the
/// (seed-shuffled) members are dealt round-robin, so fold sizes differ by at
/// most one and class balance is preserved. Falls back to plain round-robin
/// over a shuffled index when some class has fewer members than folds;
/// *stratified_out reports which path ran.
std::vector<int> kfold_assignments(const LabeledData& data, int folds,
                                   std::uint64_t seed, bool* stratified_out);

struct KfoldResult {
  double best_lambda = 0.0;
  std::vector<SelectionRow> table;  // metric = mean over folds
  bool stratified = true;
};

template <class Model>
KfoldResult kfold_select(const LabeledData& data, int folds,
                         const LambdaGrid& grid, const FitFn<Model>& fit,
                         const MetricFn<Model>& metric, std::uint64_t seed,
                         bool warm_start = true) {
  if (folds < 2) throw std::invalid_argument("kfold_select: folds < 2");
  if (folds > data.n()) {
    throw std::invalid_argument("kfold_select: folds > n");
  }
  KfoldResult result;
  const std::vector<int> assignment =
      kfold_assignments(data, folds, seed, &result.stratified);

  std::vector<double> metric_sums(grid.values.size(), 0.0);
  std::vector<int> metric_counts(grid.values.size(), 0);
  std::vector<int> iter_sums(grid.values.size(), 0);
  std::vector<bool> all_converged(grid.values.size(), true);
  std::vector<std::string> errors(grid.values.size());

  for (int fold = 0; fold < folds; ++fold) {
    std::vector<Index> train_rows, val_rows;
    for (Index i = 0; i < data.n(); ++i) {
      (assignment[static_cast<size_t>(i)] == fold ? val_rows : train_rows)
          .push_back(i);
    }
    Eigen::MatrixXd train_x(train_rows.size(), data.p());
    Eigen::MatrixXd val_x(val_rows.size(), data.p());
    std::vector<int> train_y, val_y;
    for (size_t r = 0; r < train_rows.size(); ++r) {
      train_x.row(static_cast<Index>(r)) = data.X.m().row(train_rows[r]);
      train_y.push_back(data.y[static_cast<size_t>(train_rows[r])]);
    }
    for (size_t r = 0; r < val_rows.size(); ++r) {
      val_x.row(static_cast<Index>(r)) = data.X.m().row(val_rows[r]);
      val_y.push_back(data.y[static_cast<size_t>(val_rows[r])]);
    }
    LabeledData train(DenseMatrix(std::move(train_x)), std::move(train_y),
                      data.J);
    LabeledData val(DenseMatrix(std::move(val_x)), std::move(val_y), data.J);

    const Model* warm = nullptr;
    Model prev;
    for (size_t g = 0; g < grid.values.size(); ++g) {
      try {
        FittedModel<Model> fitted =
            fit(train, grid.values[g], warm_start ? warm : nullptr);
        metric_sums[g] += metric(fitted.model, val);
        metric_counts[g] += 1;
        iter_sums[g] += fitted.iters;
        all_converged[g] = all_converged[g] && fitted.converged;
        prev = std::move(fitted.model);
        warm = &prev;
      } catch (const std::exception& e) {
        errors[g] = e.what();
        all_converged[g] = false;
        warm = nullptr;
      }
    }
  }

  double best_metric = std::numeric_limits<double>::infinity();
  bool any_ok = false;
  result.best_lambda = grid.values.front();
  for (size_t g = 0; g < grid.values.size(); ++g) {
    SelectionRow row;
    row.lambda = grid.values[g];
    row.iters = iter_sums[g];
    row.converged = all_converged[g];
    row.error = errors[g];
    if (metric_counts[g] > 0) {
      row.metric = metric_sums[g] / metric_counts[g];
      if (!any_ok || row.metric < best_metric) {
        best_metric = row.metric;
        result.best_lambda = grid.values[g];
      }
      any_ok = true;
    }
    result.table.push_back(std::move(row));
  }
  if (!any_ok) {
    throw std::runtime_error("kfold_select: every fit failed");
  }
  return result;
}

/// Misclassification metric over a holdout set, usable as MetricFn<LdaFit>
/// or MetricFn<LdaModel> via lambdas.
double holdout_misclassification(const LdaModel& model,
                                 const LabeledData& holdout);

/// FitFn<LdaFit> for the mean-difference characteristic estimator; warm
/// starts reuse the previous solution's iterates.
FitFn<LdaFit> lda_fit_fn(const SolverConfig& cfg);

/// The (alpha, gamma) grid used when tuning the Ledoit-Wolf-type baseline:
/// 10 log-spaced alphas in [0.01, 0.99] crossed with
/// gamma in {0.1, 0.5, 1, 2, 5, 10}.
std::vector<std::pair<double, double>> ledoit_wolf_grid();

}  // namespace charshrink
