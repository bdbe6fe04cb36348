#include "charshrink/verification.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "charshrink/csv.hpp"
#include "charshrink/rng.hpp"

namespace charshrink {

namespace {

double spectral_norm(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      M.transpose() * M, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

Eigen::MatrixXd sym(const Eigen::MatrixXd& M) {
  return 0.5 * (M + M.transpose());
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

KktReport kkt_residual(const ProblemSpec& prob, const Solution& sol) {
  const Eigen::MatrixXd& A = prob.A.m();
  const Eigen::MatrixXd& B = prob.B.m();
  const Eigen::MatrixXd& theta = sol.theta_hat.m();
  const double lambda = prob.lambda;

  const Eigen::MatrixXd omega_inv =
      spd_inverse_and_logdet(sol.omega_hat).first.m();
  const Eigen::MatrixXd smooth_grad = prob.S.m() - omega_inv;

  KktReport report;
  if (lambda == 0.0) {
    report.residual = smooth_grad.norm();
    return report;
  }

  const Index a = prob.a();
  const Index b = prob.b();
  Eigen::MatrixXd weights = prob.penalty_weights.empty()
                                ? Eigen::MatrixXd::Ones(a, b)
                                : prob.penalty_weights.m();

  // Pin Z on the support; the zero entries are optimized below, seeded from
  // the solver's dual variable when present (at an ADMM fixed point the
  // admissible subgradient is -Gamma/lambda, so that start sits next to the
  // box optimum).
  const bool have_gamma = !sol.gamma_hat.empty();
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(a, b);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> free_cell(a, b);
  for (Index j = 0; j < b; ++j) {
    for (Index i = 0; i < a; ++i) {
      if (theta(i, j) != 0.0) {
        z(i, j) = weights(i, j) * sign_of(theta(i, j));
        free_cell(i, j) = false;
      } else {
        if (have_gamma) {
          z(i, j) = std::clamp(-sol.gamma_hat(i, j) / lambda,
                               -weights(i, j), weights(i, j));
        }
        free_cell(i, j) = true;
      }
    }
  }

  const double lip = 2.0 * lambda * lambda * spectral_norm(A) *
                     spectral_norm(A) * spectral_norm(B) * spectral_norm(B);
  const double step = lip > 0.0 ? 1.0 / lip : 1.0;

  auto residual_matrix = [&](const Eigen::MatrixXd& zz) {
    return Eigen::MatrixXd(smooth_grad +
                           lambda * sym(A.transpose() * zz * B.transpose()));
  };

  // Unconstrained descent on the free cells measures how far the best
  // subgradient would have to leave its box.
  Eigen::MatrixXd z_unc = z;
  for (int it = 0; it < 2000; ++it) {
    const Eigen::MatrixXd grad =
        2.0 * lambda * A * residual_matrix(z_unc) * B;
    double moved = 0.0;
    for (Index j = 0; j < b; ++j) {
      for (Index i = 0; i < a; ++i) {
        if (!free_cell(i, j)) continue;
        const double delta = step * grad(i, j);
        z_unc(i, j) -= delta;
        moved = std::max(moved, std::abs(delta));
      }
    }
    if (moved <= 1e-14) break;
  }
  double violation = 0.0;
  for (Index j = 0; j < b; ++j) {
    for (Index i = 0; i < a; ++i) {
      if (free_cell(i, j)) {
        violation =
            std::max(violation, std::abs(z_unc(i, j)) - weights(i, j));
      }
    }
  }
  report.max_subgradient_violation = std::max(0.0, violation);

  // Projected descent from the clipped point gives the certified residual.
  for (Index j = 0; j < b; ++j) {
    for (Index i = 0; i < a; ++i) {
      if (free_cell(i, j)) {
        z(i, j) = std::clamp(z_unc(i, j), -weights(i, j), weights(i, j));
      }
    }
  }
  for (int it = 0; it < 2000; ++it) {
    const Eigen::MatrixXd grad = 2.0 * lambda * A * residual_matrix(z) * B;
    double moved = 0.0;
    for (Index j = 0; j < b; ++j) {
      for (Index i = 0; i < a; ++i) {
        if (!free_cell(i, j)) continue;
        const double prev = z(i, j);
        z(i, j) = std::clamp(prev - step * grad(i, j), -weights(i, j),
                             weights(i, j));
        moved = std::max(moved, std::abs(z(i, j) - prev));
      }
    }
    if (moved <= 1e-14) break;
  }
  report.residual = residual_matrix(z).norm();

  const Eigen::MatrixXd characteristic =
      A * sol.omega_hat.m() * B - prob.C.m();
  bool consistent = report.max_subgradient_violation <= 1e-6;
  for (Index j = 0; j < b && consistent; ++j) {
    for (Index i = 0; i < a; ++i) {
      if (theta(i, j) != 0.0 &&
          sign_of(theta(i, j)) != sign_of(characteristic(i, j))) {
        consistent = false;
        break;
      }
    }
  }
  report.support_consistent = consistent;
  return report;
}

double compatibility_constant_identity(const SymmetricMatrix& omega_star) {
  Index nonzero = 0;
  for (Index j = 0; j < omega_star.dim(); ++j) {
    for (Index i = 0; i < omega_star.dim(); ++i) {
      if (omega_star(i, j) != 0.0) ++nonzero;
    }
  }
  return std::sqrt(static_cast<double>(nonzero));
}

std::vector<std::pair<int, int>> support_from_mask(const DenseMatrix& mask) {
  std::vector<std::pair<int, int>> cells;
  for (Index i = 0; i < mask.rows(); ++i) {
    for (Index j = 0; j < mask.cols(); ++j) {
      if (mask(i, j) != 0.0) {
        cells.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  return cells;
}

double compatibility_constant_estimate(
    const DenseMatrix& A, const DenseMatrix& B,
    const std::vector<std::pair<int, int>>& support, int restarts,
    std::uint64_t seed) {
  if (support.empty()) {
    throw std::invalid_argument(
        "compatibility_constant_estimate: empty support");
  }
  if (restarts < 1) {
    throw std::invalid_argument(
        "compatibility_constant_estimate: restarts < 1");
  }
  const Index p = A.cols();
  if (B.rows() != p) {
    throw std::invalid_argument(
        "compatibility_constant_estimate: A.cols != B.rows");
  }

  auto value_of = [&](const Eigen::MatrixXd& M) {
    const Eigen::MatrixXd AMB = A.m() * M * B.m();
    double v = 0.0;
    for (const auto& [i, j] : support) v += std::abs(AMB(i, j));
    return v;
  };

  double best = 0.0;
  for (int r = 0; r < restarts; ++r) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(r)));
    Eigen::MatrixXd M(p, p);
    for (Index j = 0; j < p; ++j) {
      for (Index i = 0; i <= j; ++i) {
        M(i, j) = rng.normal();
        M(j, i) = M(i, j);
      }
    }
    double norm = M.norm();
    if (norm == 0.0) continue;
    M /= norm;

    double value = value_of(M);
    best = std::max(best, value);
    for (int it = 0; it < 1000; ++it) {
      // Conditional-gradient step: move to the unit sphere point aligned
      // with a supergradient; monotone since the objective is a seminorm.
      const Eigen::MatrixXd AMB = A.m() * M * B.m();
      Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(A.rows(), B.cols());
      for (const auto& [i, j] : support) Z(i, j) = sign_of(AMB(i, j));
      Eigen::MatrixXd D = sym(A.m().transpose() * Z * B.m().transpose());
      const double dnorm = D.norm();
      if (dnorm == 0.0) break;
      M = D / dnorm;
      const double next = value_of(M);
      best = std::max(best, next);
      if (next - value <= 1e-12 * std::max(1.0, std::abs(next))) break;
      value = next;
    }
  }
  return best;
}

RateTable rate_experiment(const TrueParams& params,
                          const std::vector<int>& n_list, int replications,
                          double K, std::uint64_t seed,
                          const SolverConfig& solver) {
  if (n_list.empty()) {
    throw std::invalid_argument("rate_experiment: empty n list");
  }
  if (replications < 1) {
    throw std::invalid_argument("rate_experiment: replications < 1");
  }
  const Index p = params.p();
  Eigen::LLT<Eigen::MatrixXd> llt(params.omega_star_inv.m());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("rate_experiment: Cholesky failed");
  }
  const Eigen::MatrixXd L = llt.matrixL();

  RateTable table;
  for (size_t ni = 0; ni < n_list.size(); ++ni) {
    const int n = n_list[ni];
    const double lambda_n =
        K * std::sqrt(std::log(static_cast<double>(p)) / n);
    std::vector<double> errors;
    errors.reserve(static_cast<size_t>(replications));
    for (int r = 0; r < replications; ++r) {
      Rng rng(Rng::derive(Rng::derive(seed, ni), static_cast<std::uint64_t>(r)));
      Eigen::MatrixXd X(n, p);
      Eigen::VectorXd z(p);
      for (int i = 0; i < n; ++i) {
        for (Index d = 0; d < p; ++d) z(d) = rng.normal();
        X.row(i) = (L * z).transpose();
      }
      SymmetricMatrix S(
          Eigen::MatrixXd(X.transpose() * X / static_cast<double>(n)));
      ProblemSpec prob(S, DenseMatrix::identity(p), DenseMatrix::identity(p),
                       DenseMatrix::zero(p, p), lambda_n);
      const Solution sol = solve(prob, solver);
      errors.push_back(
          frobenius_error(sol.omega_hat.sym(), params.omega_star.sym()));
    }
    double mean = 0.0;
    for (double e : errors) mean += e;
    mean /= static_cast<double>(errors.size());
    double se = 0.0;
    if (errors.size() > 1) {
      double ss = 0.0;
      for (double e : errors) ss += (e - mean) * (e - mean);
      se = std::sqrt(ss / static_cast<double>(errors.size() - 1) /
                     static_cast<double>(errors.size()));
    }
    table.rows.push_back(RateRow{n, mean, se});
  }

  // Log-log slope by least squares; 0 when n does not vary.
  double mx = 0.0, my = 0.0;
  for (const RateRow& row : table.rows) {
    mx += std::log(static_cast<double>(row.n));
    my += std::log(row.mean_frob);
  }
  mx /= static_cast<double>(table.rows.size());
  my /= static_cast<double>(table.rows.size());
  double sxx = 0.0, sxy = 0.0;
  for (const RateRow& row : table.rows) {
    const double dx = std::log(static_cast<double>(row.n)) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(row.mean_frob) - my);
  }
  table.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return table;
}

void write_rate_csv(const std::filesystem::path& path,
                    const RateTable& table) {
  std::vector<std::vector<std::string>> rows;
  for (const RateRow& row : table.rows) {
    rows.push_back({std::to_string(row.n), format_double(row.mean_frob),
                    format_double(row.stderr_frob)});
  }
  rows.push_back({"slope", format_double(table.slope), ""});
  write_table_csv(path, {"n", "mean_frob", "stderr"}, rows);
}

}  // namespace charshrink
