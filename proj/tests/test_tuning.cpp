#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "charshrink/estimators.hpp"
#include "charshrink/rng.hpp"
#include "charshrink/simulation.hpp"
#include "charshrink/tuning.hpp"
#include "helpers.hpp"

using namespace charshrink;
using charshrink::test::random_covariance;

namespace {

LabeledData blobs(Rng& rng, int n_per_class, double separation, int p = 2) {
  Eigen::MatrixXd X(2 * n_per_class, p);
  std::vector<int> y(static_cast<size_t>(2 * n_per_class));
  for (int i = 0; i < 2 * n_per_class; ++i) {
    const int label = i < n_per_class ? 1 : 2;
    for (int d = 0; d < p; ++d) X(i, d) = rng.normal();
    X(i, 0) += label == 1 ? separation : -separation;
    y[static_cast<size_t>(i)] = label;
  }
  return LabeledData(DenseMatrix(std::move(X)), std::move(y), 2);
}

}  // namespace

TEST_SUITE("tuning") {

TEST_CASE("lambda grid validation") {
  CHECK_THROWS_AS(LambdaGrid({1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(LambdaGrid({1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(LambdaGrid({0.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(LambdaGrid({1.0, 0.0, 0.0}), std::invalid_argument);
  const LambdaGrid terminal_zero({1.0, 0.5, 0.0});
  CHECK(terminal_zero.values.size() == 3);
}

TEST_CASE("default_grid endpoints and monotonicity") {
  Rng rng(157);
  const SymmetricMatrix S = random_covariance(rng, 4, 16);
  const ProblemSpec prob = glasso_problem(S, 0.0, true);

  const LambdaGrid two = default_grid(prob, 2);
  REQUIRE(two.values.size() == 2);
  CHECK(two.values[1] == doctest::Approx(two.values[0] * 1e-4));

  const LambdaGrid ten = default_grid(prob, 10);
  for (size_t i = 1; i < ten.values.size(); ++i) {
    CHECK(ten.values[i] < ten.values[i - 1]);
  }
  CHECK(ten.values.front() == two.values.front());
}

TEST_CASE("lambda_max zeroes theta on the first update from the default init") {
  Rng rng(163);
  const SymmetricMatrix S = random_covariance(rng, 5, 20);
  ProblemSpec prob(S, DenseMatrix::identity(5), DenseMatrix::identity(5),
                   DenseMatrix::zero(5, 5), 0.0);
  const double lambda_max = default_grid(prob, 2).values.front();

  ProblemSpec at_max(prob.S, prob.A, prob.B, prob.C, lambda_max);
  SolverConfig cfg;  // rho = 1
  const SolverState init = default_init(at_max);
  const DenseMatrix theta = theta_update(init.omega, init, at_max, cfg);
  CHECK(theta.m().norm() == 0.0);
}

TEST_CASE("degenerate characteristic still yields a valid grid") {
  const SymmetricMatrix S = SymmetricMatrix::identity(3);
  const Eigen::VectorXd mean = Eigen::Vector3d(1.0, 2.0, 3.0);
  const LambdaGrid grid =
      default_grid(lda_characteristic_problem(S, {mean, mean}, 0.0), 5);
  CHECK(grid.values.front() > 0.0);
}

TEST_CASE("validation_select basics") {
  Rng rng(167);
  const LabeledData train = blobs(rng, 30, 2.5);
  const LabeledData val = blobs(rng, 30, 2.5);

  const MetricFn<LdaFit> metric = [](const LdaFit& fit,
                                     const LabeledData& holdout) {
    return holdout_misclassification(fit.model, holdout);
  };

  SUBCASE("single-point grid returns that lambda") {
    const auto result = validation_select<LdaFit>(
        train, val, LambdaGrid({0.3}), lda_fit_fn(SolverConfig()), metric);
    CHECK(result.best_lambda == 0.3);
    CHECK(result.table.size() == 1);
  }

  SUBCASE("constant metric keeps the largest lambda") {
    const MetricFn<LdaFit> flat = [](const LdaFit&, const LabeledData&) {
      return 0.25;
    };
    const auto result = validation_select<LdaFit>(
        train, val, LambdaGrid({2.0, 1.0, 0.5}), lda_fit_fn(SolverConfig()),
        flat);
    CHECK(result.best_lambda == 2.0);
  }

  SUBCASE("selection is the argmin of its own table") {
    const auto grid = default_grid(
        lda_characteristic_problem(pooled_covariance(train),
                                   class_means(train), 0.0),
        6);
    const auto result = validation_select<LdaFit>(
        train, val, grid, lda_fit_fn(SolverConfig()), metric);
    double best = std::numeric_limits<double>::infinity();
    double best_lambda = 0.0;
    for (const SelectionRow& row : result.table) {
      if (row.metric < best) {
        best = row.metric;
        best_lambda = row.lambda;
      }
    }
    CHECK(result.best_lambda == best_lambda);
  }
}

TEST_CASE("warm start does not change the selection") {
  Rng rng(173);
  const LabeledData train = blobs(rng, 25, 1.2, 4);
  const LabeledData val = blobs(rng, 25, 1.2, 4);
  const auto grid = default_grid(
      lda_characteristic_problem(pooled_covariance(train), class_means(train),
                                 0.0),
      8);
  const MetricFn<LdaFit> metric = [](const LdaFit& fit,
                                     const LabeledData& holdout) {
    return holdout_misclassification(fit.model, holdout);
  };
  const auto warm = validation_select<LdaFit>(
      train, val, grid, lda_fit_fn(SolverConfig()), metric, true);
  const auto cold = validation_select<LdaFit>(
      train, val, grid, lda_fit_fn(SolverConfig()), metric, false);
  CHECK(warm.best_lambda == cold.best_lambda);
}

TEST_CASE("kfold assignments partition and balance") {
  Rng rng(179);
  const LabeledData data = blobs(rng, 17, 1.0);
  bool stratified = false;
  const auto assignment = kfold_assignments(data, 5, 42, &stratified);
  CHECK(stratified);

  std::vector<int> sizes(5, 0);
  for (Index i = 0; i < data.n(); ++i) {
    REQUIRE(assignment[static_cast<size_t>(i)] >= 0);
    REQUIRE(assignment[static_cast<size_t>(i)] < 5);
    ++sizes[static_cast<size_t>(assignment[static_cast<size_t>(i)])];
  }
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  CHECK(*hi - *lo <= 1);

  const auto again = kfold_assignments(data, 5, 42, nullptr);
  CHECK(assignment == again);
  const auto other = kfold_assignments(data, 5, 43, nullptr);
  CHECK(assignment != other);
}

TEST_CASE("kfold falls back when a class is smaller than the fold count") {
  Eigen::MatrixXd X(7, 1);
  std::vector<int> y = {1, 1, 1, 1, 1, 1, 2};
  for (int i = 0; i < 7; ++i) X(i, 0) = i;
  const LabeledData data(DenseMatrix(std::move(X)), std::move(y), 2);
  bool stratified = true;
  kfold_assignments(data, 4, 1, &stratified);
  CHECK_FALSE(stratified);
}

TEST_CASE("kfold_select runs leave-one-out and is seed-stable") {
  Rng rng(181);
  const LabeledData data = blobs(rng, 6, 3.0);
  const LambdaGrid grid({0.5, 0.05});
  const MetricFn<LdaFit> metric = [](const LdaFit& fit,
                                     const LabeledData& holdout) {
    return holdout_misclassification(fit.model, holdout);
  };
  const auto loo = kfold_select<LdaFit>(data, static_cast<int>(data.n()),
                                        grid, lda_fit_fn(SolverConfig()),
                                        metric, 7);
  CHECK(loo.table.size() == 2);

  const auto a = kfold_select<LdaFit>(data, 4, grid,
                                      lda_fit_fn(SolverConfig()), metric, 7);
  const auto b = kfold_select<LdaFit>(data, 4, grid,
                                      lda_fit_fn(SolverConfig()), metric, 7);
  CHECK(a.best_lambda == b.best_lambda);
  for (size_t i = 0; i < a.table.size(); ++i) {
    CHECK(a.table[i].metric == b.table[i].metric);
  }
}

TEST_CASE("kfold_select reaches low error on separable classes") {
  Rng rng(191);
  const LabeledData data = blobs(rng, 30, 3.0);
  const auto grid = default_grid(
      lda_characteristic_problem(pooled_covariance(data), class_means(data),
                                 0.0),
      6);
  const MetricFn<LdaFit> metric = [](const LdaFit& fit,
                                     const LabeledData& holdout) {
    return holdout_misclassification(fit.model, holdout);
  };
  const auto result = kfold_select<LdaFit>(data, 5, grid,
                                           lda_fit_fn(SolverConfig()),
                                           metric, 11);
  double best = std::numeric_limits<double>::infinity();
  for (const SelectionRow& row : result.table) {
    best = std::min(best, row.metric);
  }
  CHECK(best <= 0.1);
}

TEST_CASE("validation_select surfaces total failure with details") {
  Rng rng(193);
  const LabeledData train = blobs(rng, 10, 1.0);
  const FitFn<LdaFit> broken = [](const LabeledData&, double,
                                  const LdaFit*) -> FittedModel<LdaFit> {
    throw std::runtime_error("synthetic failure");
  };
  const MetricFn<LdaFit> metric = [](const LdaFit&, const LabeledData&) {
    return 0.0;
  };
  CHECK_THROWS_WITH_AS(
      validation_select<LdaFit>(train, train, LambdaGrid({1.0, 0.1}), broken,
                                metric),
      doctest::Contains("synthetic failure"), std::runtime_error);
}

TEST_CASE("ledoit wolf grid covers the documented ranges") {
  const auto grid = ledoit_wolf_grid();
  CHECK(grid.size() == 60);
  std::set<double> gammas;
  for (const auto& [alpha, gamma] : grid) {
    CHECK(alpha > 0.0);
    CHECK(alpha < 1.0);
    gammas.insert(gamma);
  }
  CHECK(grid.front().first == doctest::Approx(0.01));
  CHECK(gammas == std::set<double>{0.1, 0.5, 1.0, 2.0, 5.0, 10.0});
}

}  // TEST_SUITE
