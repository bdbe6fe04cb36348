#pragma once

#include <vector>

#include "charshrink/admm.hpp"

namespace charshrink {

/// Which constructor produced a ProblemSpec, plus a short human-readable
/// description of the inputs used to build A, B, C. Recorded in run
/// manifests and diagnostics.
struct CharacteristicKind {
  enum Tag { generic, glasso, lda, portfolio, regression };
  Tag tag = generic;
  std::string metadata;
};

CharacteristicKind characteristic_kind(const ProblemSpec& prob);

/// Validated passthrough: any user-specified (S, A, B, C, lambda).
ProblemSpec generic_problem(SymmetricMatrix S, DenseMatrix A, DenseMatrix B,
                            DenseMatrix C, double lambda);

/// A = B = I_p, C = 0: the L1-penalized Gaussian likelihood estimator.
/// With penalize_diagonal=false the diagonal entries carry penalty weight
/// zero (the off-diagonal-only variant cannot be expressed through C).
ProblemSpec glasso_problem(const SymmetricMatrix& S, double lambda,
                           bool penalize_diagonal);

/// A = I_p, C = 0, B holds the columns mean[j] - mean[k] for all
/// 1 <= j < k <= J in lexicographic (j,k) order; column (j,k) sits at index
/// (j-1)(2J-j)/2 + (k-j) - 1 (0-based).
ProblemSpec lda_characteristic_problem(
    const SymmetricMatrix& S_pooled,
    const std::vector<Eigen::VectorXd>& class_means, double lambda);

/// A = I_p, C = 0, B = mu_hat as a p x 1 column, so the penalty shrinks the
/// portfolio direction Omega mu_hat.
ProblemSpec portfolio_problem(const SymmetricMatrix& S,
                              const Eigen::VectorXd& mu_hat, double lambda);

/// A = I_p, C = 0, B = S_XY, so the penalty shrinks the coefficient matrix
/// Omega S_XY.
ProblemSpec regression_problem(const SymmetricMatrix& S_XX,
                               const DenseMatrix& S_XY, double lambda);

/// Inverse of alpha S + gamma (1 - alpha) I_p, the Ledoit-Wolf-type
/// shrinkage baseline. Requires alpha in (0,1) and gamma > 0.
SpdMatrix ledoit_wolf_precision(const SymmetricMatrix& S, double alpha,
                                double gamma);

/// Fully-invested weights w = Omega mu / sum(Omega mu). Exact zeros of
/// Omega mu stay exact zeros in w. Throws DegeneratePortfolioError when the
/// sum is zero.
Eigen::VectorXd portfolio_weights(const SpdMatrix& omega_hat,
                                  const Eigen::VectorXd& mu_hat);

/// Coefficient matrix Omega S_XY.
DenseMatrix regression_coefficients(const SpdMatrix& omega_hat,
                                    const DenseMatrix& S_XY);

/// 0-based column index of pair (j,k), 1 <= j < k <= J, in the
/// lda_characteristic_problem ordering.
int pair_column_index(int j, int k, int J);

}  // namespace charshrink
