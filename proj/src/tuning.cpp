#include "charshrink/tuning.hpp"

#include <algorithm>

#include "charshrink/estimators.hpp"
#include "charshrink/simulation.hpp"

namespace charshrink {

LambdaGrid::LambdaGrid(std::vector<double> values_)
    : values(std::move(values_)) {
  if (values.empty()) throw std::invalid_argument("LambdaGrid: empty");
  for (size_t i = 0; i < values.size(); ++i) {
    const bool terminal = i + 1 == values.size();
    if (values[i] < 0.0 || (values[i] == 0.0 && !terminal)) {
      throw std::invalid_argument("LambdaGrid: values must be positive");
    }
    if (i > 0 && values[i] >= values[i - 1]) {
      throw std::invalid_argument("LambdaGrid: values must be decreasing");
    }
  }
}

LambdaGrid default_grid(const ProblemSpec& prob, int length) {
  if (length < 2) throw std::invalid_argument("default_grid: length < 2");
  const SolverState init = default_init(prob);
  const Eigen::MatrixXd first =
      prob.A.m() * init.omega.m() * prob.B.m() - prob.C.m();
  double lambda_max = 0.0;
  for (Index j = 0; j < first.cols(); ++j) {
    for (Index i = 0; i < first.rows(); ++i) {
      const double w =
          prob.penalty_weights.empty() ? 1.0 : prob.penalty_weights(i, j);
      if (w > 0.0) lambda_max = std::max(lambda_max, std::abs(first(i, j)) / w);
    }
  }
  lambda_max = std::max(lambda_max, 1e-8);
  std::vector<double> values(static_cast<size_t>(length));
  for (int i = 0; i < length; ++i) {
    values[static_cast<size_t>(i)] =
        lambda_max * std::pow(1e-4, static_cast<double>(i) / (length - 1));
  }
  return LambdaGrid(std::move(values));
}

LambdaGrid default_grid(const SymmetricMatrix& S, const DenseMatrix& A,
                        const DenseMatrix& B, const DenseMatrix& C,
                        int length) {
  return default_grid(ProblemSpec(S, A, B, C, 0.0), length);
}

std::vector<int> kfold_assignments(const LabeledData& data, int folds,
                                   std::uint64_t seed, bool* stratified_out) {
  const auto counts = class_counts(data);
  const bool stratified =
      std::all_of(counts.begin(), counts.end(),
                  [folds](Index c) { return c >= folds; });
  if (stratified_out != nullptr) *stratified_out = stratified;

  Rng rng(seed);
  std::vector<int> assignment(static_cast<size_t>(data.n()), -1);
  auto shuffled = [&rng](std::vector<Index> idx) {
    for (size_t i = idx.size(); i > 1; --i) {
      const size_t j =
          static_cast<size_t>(rng.uniform_int(0, static_cast<int>(i) - 1));
      std::swap(idx[i - 1], idx[j]);
    }
    return idx;
  };

  if (stratified) {
    // The fold cursor carries across classes so total fold sizes differ by
    // at most one.
    int cursor = 0;
    for (int cls = 1; cls <= data.J; ++cls) {
      std::vector<Index> members;
      for (Index i = 0; i < data.n(); ++i) {
        if (data.y[static_cast<size_t>(i)] == cls) members.push_back(i);
      }
      members = shuffled(std::move(members));
      for (const Index member : members) {
        assignment[static_cast<size_t>(member)] = cursor;
        cursor = (cursor + 1) % folds;
      }
    }
  } else {
    std::vector<Index> all(static_cast<size_t>(data.n()));
    std::iota(all.begin(), all.end(), Index{0});
    all = shuffled(std::move(all));
    for (size_t r = 0; r < all.size(); ++r) {
      assignment[static_cast<size_t>(all[r])] =
          static_cast<int>(r % static_cast<size_t>(folds));
    }
  }
  return assignment;
}

double holdout_misclassification(const LdaModel& model,
                                 const LabeledData& holdout) {
  return misclassification_rate(predict_batch(model, holdout.X), holdout.y);
}

FitFn<LdaFit> lda_fit_fn(const SolverConfig& cfg) {
  return [cfg](const LabeledData& train, double lambda,
               const LdaFit* warm) -> FittedModel<LdaFit> {
    SolverState init;
    const SolverState* init_ptr = nullptr;
    if (warm != nullptr) {
      init = state_from_solution(warm->solution);
      init_ptr = &init;
    }
    LdaFit fitted = fit_lda(train, lambda, cfg, init_ptr);
    FittedModel<LdaFit> out;
    out.iters = fitted.solution.iters_used;
    out.converged = fitted.solution.converged;
    out.model = std::move(fitted);
    return out;
  };
}

std::vector<std::pair<double, double>> ledoit_wolf_grid() {
  std::vector<std::pair<double, double>> grid;
  const double lo = std::log(0.01), hi = std::log(0.99);
  for (int i = 0; i < 10; ++i) {
    const double alpha = std::exp(lo + (hi - lo) * i / 9.0);
    for (double gamma : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
      grid.emplace_back(alpha, gamma);
    }
  }
  return grid;
}

}  // namespace charshrink
