#include "charshrink/estimators.hpp"

#include <sstream>

namespace charshrink {

ProblemSpec generic_problem(SymmetricMatrix S, DenseMatrix A, DenseMatrix B,
                            DenseMatrix C, double lambda) {
  return ProblemSpec(std::move(S), std::move(A), std::move(B), std::move(C),
                     lambda);
}

ProblemSpec glasso_problem(const SymmetricMatrix& S, double lambda,
                           bool penalize_diagonal) {
  const Index p = S.dim();
  DenseMatrix weights;
  if (!penalize_diagonal) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Ones(p, p);
    w.diagonal().setZero();
    weights = DenseMatrix(std::move(w));
  }
  ProblemSpec prob(S, DenseMatrix::identity(p), DenseMatrix::identity(p),
                   DenseMatrix::zero(p, p), lambda, std::move(weights));
  prob.kind = "glasso";
  return prob;
}

ProblemSpec lda_characteristic_problem(
    const SymmetricMatrix& S_pooled,
    const std::vector<Eigen::VectorXd>& class_means, double lambda) {
  const int J = static_cast<int>(class_means.size());
  if (J < 2) {
    throw std::invalid_argument("lda_characteristic_problem: need J >= 2");
  }
  const Index p = S_pooled.dim();
  for (const auto& mean : class_means) {
    if (mean.size() != p) {
      std::ostringstream os;
      os << "lda_characteristic_problem: mean length " << mean.size()
         << ", expected " << p;
      throw std::invalid_argument(os.str());
    }
  }
  Eigen::MatrixXd B(p, J * (J - 1) / 2);
  for (int j = 1; j < J; ++j) {
    for (int k = j + 1; k <= J; ++k) {
      B.col(pair_column_index(j, k, J)) = class_means[j - 1] - class_means[k - 1];
    }
  }
  ProblemSpec prob(S_pooled, DenseMatrix::identity(p),
                   DenseMatrix(std::move(B)),
                   DenseMatrix::zero(p, J * (J - 1) / 2), lambda);
  prob.kind = "lda";
  return prob;
}

ProblemSpec portfolio_problem(const SymmetricMatrix& S,
                              const Eigen::VectorXd& mu_hat, double lambda) {
  if (mu_hat.size() != S.dim()) {
    std::ostringstream os;
    os << "portfolio_problem: mu length " << mu_hat.size() << ", S dim "
       << S.dim();
    throw std::invalid_argument(os.str());
  }
  ProblemSpec prob(S, DenseMatrix::identity(S.dim()),
                   DenseMatrix(Eigen::MatrixXd(mu_hat)),
                   DenseMatrix::zero(S.dim(), 1), lambda);
  prob.kind = "portfolio";
  return prob;
}

ProblemSpec regression_problem(const SymmetricMatrix& S_XX,
                               const DenseMatrix& S_XY, double lambda) {
  if (S_XY.rows() != S_XX.dim()) {
    std::ostringstream os;
    os << "regression_problem: S_XY has " << S_XY.rows() << " rows, S_XX dim "
       << S_XX.dim();
    throw std::invalid_argument(os.str());
  }
  ProblemSpec prob(S_XX, DenseMatrix::identity(S_XX.dim()), S_XY,
                   DenseMatrix::zero(S_XX.dim(), S_XY.cols()), lambda);
  prob.kind = "regression";
  return prob;
}

SpdMatrix ledoit_wolf_precision(const SymmetricMatrix& S, double alpha,
                                double gamma) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("ledoit_wolf_precision: alpha not in (0,1)");
  }
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("ledoit_wolf_precision: gamma <= 0");
  }
  const Index p = S.dim();
  SymmetricMatrix target(Eigen::MatrixXd(
      alpha * S.m() + gamma * (1.0 - alpha) * Eigen::MatrixXd::Identity(p, p)));
  return spd_inverse_and_logdet(SpdMatrix(target)).first;
}

Eigen::VectorXd portfolio_weights(const SpdMatrix& omega_hat,
                                  const Eigen::VectorXd& mu_hat) {
  if (mu_hat.size() != omega_hat.dim()) {
    throw std::invalid_argument("portfolio_weights: length mismatch");
  }
  Eigen::VectorXd direction = omega_hat.m() * mu_hat;
  const double total = direction.sum();
  if (total == 0.0) {
    throw DegeneratePortfolioError(
        "portfolio_weights: sum of Omega*mu is zero");
  }
  return direction / total;
}

DenseMatrix regression_coefficients(const SpdMatrix& omega_hat,
                                    const DenseMatrix& S_XY) {
  if (S_XY.rows() != omega_hat.dim()) {
    std::ostringstream os;
    os << "regression_coefficients: S_XY has " << S_XY.rows()
       << " rows, Omega dim " << omega_hat.dim();
    throw std::invalid_argument(os.str());
  }
  return DenseMatrix(Eigen::MatrixXd(omega_hat.m() * S_XY.m()));
}

int pair_column_index(int j, int k, int J) {
  if (!(1 <= j && j < k && k <= J)) {
    throw std::invalid_argument("pair_column_index: need 1 <= j < k <= J");
  }
  return (j - 1) * (2 * J - j) / 2 + (k - j) - 1;
}

CharacteristicKind characteristic_kind(const ProblemSpec& prob) {
  CharacteristicKind kind;
  if (prob.kind == "glasso") {
    kind.tag = CharacteristicKind::glasso;
  } else if (prob.kind == "lda") {
    kind.tag = CharacteristicKind::lda;
  } else if (prob.kind == "portfolio") {
    kind.tag = CharacteristicKind::portfolio;
  } else if (prob.kind == "regression") {
    kind.tag = CharacteristicKind::regression;
  }
  std::ostringstream os;
  os << prob.kind << ": characteristic " << prob.a() << "x" << prob.b()
     << " of a " << prob.p() << "x" << prob.p() << " precision matrix, lambda "
     << prob.lambda;
  if (!prob.penalty_weights.empty()) os << ", weighted penalty";
  kind.metadata = os.str();
  return kind;
}

}  // namespace charshrink
