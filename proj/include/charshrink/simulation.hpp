#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "charshrink/admm.hpp"
#include "charshrink/lda.hpp"

namespace charshrink {

/// Ground truth for a simulation model: Sigma* (omega_star_inv), its inverse
/// Omega*, the discriminant directions beta*_j, the class means
/// mu*_j = Sigma* beta*_j, and uniform priors 1/J.
struct TrueParams {
  SpdMatrix omega_star_inv;
  SpdMatrix omega_star;
  std::vector<Eigen::VectorXd> betas;
  std::vector<Eigen::VectorXd> mus;
  std::vector<double> priors;
  int J = 0;

  Index p() const { return omega_star.dim(); }
};

struct SplitSizes {
  int train = 0;
  int validation = 0;
  int test = 0;
};

/// beta*_{j,k} = 1.5 on k in {4(j-1)+1, ..., 4j} (1-based), else 0;
/// Sigma*_{a,b} = 0.9^|a-b|, whose inverse is tridiagonal (built in closed
/// form so off-band zeros are exact). Requires p >= 4J.
TrueParams model1_params(int p, int J);

/// beta*_{j,k} = 2 on k in {5(j-1)+1, ..., 5j}, else 0; Sigma* block
/// diagonal: the leading 5J x 5J block has unit diagonal and 0.5
/// off-diagonal, the trailing block has entries 0.5^|a-b|. Each block is
/// inverted in closed form, keeping cross-block zeros exact. Requires
/// p >= 5J.
TrueParams model2_params(int p, int J);

struct Dataset {
  LabeledData train;
  LabeledData validation;
  LabeledData test;
};

/// Y uniform on {1..J}, X | Y=j ~ N(mu*_j, Sigma*) via the Cholesky factor
/// of Sigma*. The first `train` draws form the training split, then
/// validation, then test. Bitwise reproducible from the seed.
Dataset generate_dataset(const TrueParams& params, const SplitSizes& sizes,
                         std::uint64_t seed);

double misclassification_rate(const std::vector<int>& predicted,
                              const std::vector<int>& truth);

double frobenius_error(const SymmetricMatrix& omega_bar,
                       const SymmetricMatrix& omega_star);

/// Variable-selection rates over the (J-1) x p grid of (pair m in 2..J,
/// variable k): TPR counts estimated nonzeros among true nonzeros of
/// Delta*_m = beta*_1 - beta*_m, TNR the complements. Throws
/// UndefinedRateError when either denominator is empty.
std::pair<double, double> tpr_tnr(
    const std::vector<std::vector<bool>>& estimated_supports,
    const DenseMatrix& true_deltas);

enum class Method { proposed, glasso, lw, bayes };

Method parse_method(const std::string& name);
std::string method_name(Method m);

struct StudyConfig {
  int model = 1;  // 1 or 2
  int p = 50;
  std::vector<int> J_list = {3, 4, 5, 6, 7, 8, 9, 10};
  int replications = 100;
  std::vector<Method> methods = {Method::proposed, Method::glasso, Method::lw,
                                 Method::bayes};
  std::uint64_t seed = 0;
  /// Zero fields mean the defaults: train 25J, validation 200, test 1000.
  SplitSizes sizes{0, 0, 0};
  int grid_length = 10;
  int threads = 1;
  SolverConfig solver = study_solver_defaults();

  /// Study solves stop at residuals around 1e-7; tighter tolerances change
  /// the selected models imperceptibly and triple the runtime.
  static SolverConfig study_solver_defaults();
};

struct StudyRow {
  int model = 0;
  int J = 0;
  std::string method;
  int replication = 0;  // 1-based
  double misclass = 0.0;
  double frob_err = 0.0;
  double tpr = 0.0;
  double tnr = 0.0;
  bool failed = false;
  std::string error;
};

struct StudySummaryRow {
  int model = 0;
  int J = 0;
  std::string method;
  int replications_ok = 0;
  double mean_misclass = 0.0, se_misclass = 0.0;
  double mean_frob = 0.0, se_frob = 0.0;
  double mean_tpr = 0.0, se_tpr = 0.0;
  double mean_tnr = 0.0, se_tnr = 0.0;
};

struct StudyReport {
  std::vector<StudyRow> rows;
  std::vector<StudySummaryRow> summary;
};

/// Runs the full study: per (J, replication) generate splits, tune each
/// method's parameter on validation misclassification, evaluate
/// misclassification / Frobenius error / TPR / TNR on the test split, then
/// aggregate means and standard errors. Replication r of configuration J
/// uses the derived seed Rng::derive(Rng::derive(seed, J), r), so results
/// do not depend on the thread count; failures are recorded per row, not
/// fatal. The selected model is the one fit on the training split (no
/// refit on train+validation).
StudyReport run_study(const StudyConfig& cfg);

void write_study_csv(const std::filesystem::path& path,
                     const StudyReport& report);
void write_study_summary_csv(const std::filesystem::path& path,
                             const StudyReport& report);

}  // namespace charshrink
