#pragma once

#include <filesystem>
#include <vector>

#include "charshrink/admm.hpp"
#include "charshrink/matrix.hpp"

namespace charshrink {

/// n observations with labels in {1..J}. Fitting requires every class to
/// appear at least once (class_means enforces this); holdout slices such as
/// leave-one-out validation folds may miss classes.
struct LabeledData {
  DenseMatrix X;
  std::vector<int> y;
  int J = 0;

  LabeledData() = default;
  LabeledData(DenseMatrix X_, std::vector<int> y_, int J_);

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }
};

/// Variable indices (0-based) with nonzero characteristic entries for class
/// pair (j,k), 1 <= j < k <= J.
struct PairSupport {
  int j = 0;
  int k = 0;
  std::vector<int> indices;
};

struct LdaModel {
  std::vector<Eigen::VectorXd> means;  // per-class sample means
  std::vector<double> priors;          // class frequencies, sum to 1
  SpdMatrix omega_hat;
  std::vector<PairSupport> pair_supports;
  double lambda = 0.0;
};

struct LdaFit {
  LdaModel model;
  Solution solution;
};

std::vector<Eigen::VectorXd> class_means(const LabeledData& data);
std::vector<Index> class_counts(const LabeledData& data);

/// Within-class covariance pooled over classes with divisor n (MLE).
SymmetricMatrix pooled_covariance(const LabeledData& data);

/// Fits the discriminant model: per-class means and frequencies, pooled
/// covariance, then the precision estimate from the mean-difference
/// characteristic problem at `lambda`. Pair supports are the exact-zero
/// pattern of the solution's theta columns.
LdaFit fit_lda(const LabeledData& data, double lambda,
               const SolverConfig& cfg = SolverConfig(),
               const SolverState* init = nullptr);

LdaModel fit(const LabeledData& data, double lambda,
             const SolverConfig& cfg = SolverConfig());

/// Builds a model from an externally estimated precision matrix (baseline
/// estimators); supports are |Omega d|-thresholded at `support_tol` since
/// such estimates are never exactly sparse.
LdaModel model_from_precision(const LabeledData& data, SpdMatrix omega,
                              double support_tol = 1e-8);

/// argmax_j of x^T Omega mean_j - mean_j^T Omega mean_j / 2 + log prior_j,
/// ties broken toward the smallest label.
int predict(const LdaModel& model, const Eigen::VectorXd& x);
std::vector<int> predict_batch(const LdaModel& model, const DenseMatrix& X);

std::vector<int> selected_variables(const LdaModel& model, int j, int k);

/// One-way ANOVA F statistic per column. Columns with zero within-class
/// variance get +infinity when the between-class variance is positive and 0
/// when it is zero too.
std::vector<double> f_statistics(const LabeledData& data);

/// Indices (0-based) of the k largest F statistics, in decreasing F order,
/// ties broken toward the smaller index.
std::vector<int> f_statistic_screen(const LabeledData& data, int k);

/// CSV with feature columns followed by one integer label column.
LabeledData read_labeled_csv(const std::filesystem::path& path);
void write_labeled_csv(const std::filesystem::path& path,
                       const LabeledData& data);

}  // namespace charshrink
