#include "charshrink/admm.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace charshrink {

namespace {

/// Largest eigenvalue of a PSD matrix by power iteration.
double largest_eigenvalue(const Eigen::MatrixXd& M) {
  const Index n = M.rows();
  if (n == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n) / std::sqrt(double(n));
  double value = 0.0;
  for (int it = 0; it < 1000; ++it) {
    Eigen::VectorXd w = M * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;  // v in the null space; M PSD => top eig 0
    v = w / norm;
    const double next = v.dot(M * v);
    if (std::abs(next - value) <= 1e-10 * std::max(1.0, std::abs(next))) {
      return next;
    }
    value = next;
  }
  return value;
}

/// Positive root of rho*tau*f^2 + psi*f - 1 = 0, evaluated in the branch
/// that avoids cancellation.
inline double omega_eigenvalue(double psi, double rho_tau) {
  const double root = std::sqrt(psi * psi + 4.0 * rho_tau);
  if (psi >= 0.0) return 2.0 / (psi + root);
  return (-psi + root) / (2.0 * rho_tau);
}

double weighted_l1(const ProblemSpec& prob, const Eigen::MatrixXd& resid) {
  if (prob.penalty_weights.empty()) return resid.cwiseAbs().sum();
  return prob.penalty_weights.m().cwiseProduct(resid.cwiseAbs()).sum();
}

struct OmegaStep {
  Eigen::MatrixXd omega;
  double min_eig;
  double logdet;
};

OmegaStep omega_step(const Eigen::MatrixXd& S, const Eigen::MatrixXd& A,
                     const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
                     const Eigen::MatrixXd& omega_k,
                     const Eigen::MatrixXd& theta_k,
                     const Eigen::MatrixXd& gamma_k, double rho, double tau) {
  const Eigen::MatrixXd G =
      rho * A.transpose() *
      (A * omega_k * B - gamma_k / rho - theta_k - C) * B.transpose();
  const Eigen::MatrixXd target =
      S + 0.5 * (G + G.transpose()) - rho * tau * omega_k;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (target + target.transpose()));
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("omega_update: eigendecomposition failed");
  }
  const double rho_tau = rho * tau;
  Eigen::VectorXd f(es.eigenvalues().size());
  double logdet = 0.0;
  for (Index i = 0; i < f.size(); ++i) {
    f(i) = omega_eigenvalue(es.eigenvalues()(i), rho_tau);
    logdet += std::log(f(i));
  }
  const Eigen::MatrixXd raw =
      es.eigenvectors() * f.asDiagonal() * es.eigenvectors().transpose();
  Eigen::MatrixXd omega = 0.5 * (raw + raw.transpose());
  // f is decreasing in psi, so the top psi gives the smallest eigenvalue.
  const double min_eig = f(f.size() - 1);
  return {std::move(omega), min_eig, logdet};
}

Eigen::MatrixXd soft_matrix(const Eigen::MatrixXd& X, double t,
                            const DenseMatrix& weights) {
  Eigen::MatrixXd out(X.rows(), X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    for (Index i = 0; i < X.rows(); ++i) {
      const double tij = weights.empty() ? t : t * weights(i, j);
      const double x = X(i, j);
      const double mag = std::abs(x) - tij;
      out(i, j) = mag > 0.0 ? (x > 0.0 ? mag : -mag) : 0.0;
    }
  }
  return out;
}

}  // namespace

ProblemSpec::ProblemSpec(SymmetricMatrix S_, DenseMatrix A_, DenseMatrix B_,
                         DenseMatrix C_, double lambda_,
                         DenseMatrix penalty_weights_)
    : S(std::move(S_)),
      A(std::move(A_)),
      B(std::move(B_)),
      C(std::move(C_)),
      lambda(lambda_),
      penalty_weights(std::move(penalty_weights_)) {
  std::ostringstream os;
  if (A.cols() != S.dim()) {
    os << "ProblemSpec: A.cols (" << A.cols() << ") != S.dim (" << S.dim()
       << ")";
    throw std::invalid_argument(os.str());
  }
  if (B.rows() != S.dim()) {
    os << "ProblemSpec: B.rows (" << B.rows() << ") != S.dim (" << S.dim()
       << ")";
    throw std::invalid_argument(os.str());
  }
  if (C.rows() != A.rows() || C.cols() != B.cols()) {
    os << "ProblemSpec: C is " << C.rows() << "x" << C.cols() << ", expected "
       << A.rows() << "x" << B.cols();
    throw std::invalid_argument(os.str());
  }
  if (lambda < 0.0) {
    throw std::invalid_argument("ProblemSpec: lambda < 0");
  }
  if (!penalty_weights.empty()) {
    if (penalty_weights.rows() != A.rows() ||
        penalty_weights.cols() != B.cols()) {
      os << "ProblemSpec: penalty_weights is " << penalty_weights.rows() << "x"
         << penalty_weights.cols() << ", expected " << A.rows() << "x"
         << B.cols();
      throw std::invalid_argument(os.str());
    }
    if ((penalty_weights.m().array() < 0.0).any()) {
      throw std::invalid_argument("ProblemSpec: negative penalty weight");
    }
  }
}

double default_tau(const DenseMatrix& A, const DenseMatrix& B) {
  const double phi_a = largest_eigenvalue(A.m().transpose() * A.m());
  const double phi_b = largest_eigenvalue(B.m() * B.m().transpose());
  return phi_a * phi_b + 1e-8;
}

SolverState default_init(const ProblemSpec& prob) {
  Eigen::VectorXd d = (prob.S.m().diagonal().array() + 1e-8).inverse();
  SymmetricMatrix omega0(Eigen::MatrixXd(d.asDiagonal()));
  SolverState st;
  st.omega = SpdMatrix::trusted(omega0, d.minCoeff());
  st.theta = DenseMatrix(Eigen::MatrixXd(prob.A.m() * omega0.m() * prob.B.m() -
                                         prob.C.m()));
  st.gamma = DenseMatrix::zero(prob.a(), prob.b());
  st.iter = 0;
  return st;
}

SpdMatrix omega_update(const SolverState& state, const ProblemSpec& prob,
                       const SolverConfig& cfg) {
  const double tau = cfg.tau ? *cfg.tau : default_tau(prob.A, prob.B);
  OmegaStep step =
      omega_step(prob.S.m(), prob.A.m(), prob.B.m(), prob.C.m(),
                 state.omega.m(), state.theta.m(), state.gamma.m(), cfg.rho,
                 tau);
  return SpdMatrix::trusted(SymmetricMatrix(step.omega), step.min_eig);
}

DenseMatrix theta_update(const SpdMatrix& omega_next, const SolverState& state,
                         const ProblemSpec& prob, const SolverConfig& cfg) {
  const Eigen::MatrixXd arg = prob.A.m() * omega_next.m() * prob.B.m() -
                              state.gamma.m() / cfg.rho - prob.C.m();
  return DenseMatrix(
      soft_matrix(arg, prob.lambda / cfg.rho, prob.penalty_weights));
}

DenseMatrix dual_update(const DenseMatrix& gamma, const SpdMatrix& omega_next,
                        const DenseMatrix& theta_next, const ProblemSpec& prob,
                        const SolverConfig& cfg) {
  return DenseMatrix(Eigen::MatrixXd(
      gamma.m() - cfg.rho * (prob.A.m() * omega_next.m() * prob.B.m() -
                             theta_next.m() - prob.C.m())));
}

double objective(const ProblemSpec& prob, const SpdMatrix& omega) {
  const auto [inv, logdet] = spd_inverse_and_logdet(omega);
  (void)inv;
  const Eigen::MatrixXd resid =
      prob.A.m() * omega.m() * prob.B.m() - prob.C.m();
  return (prob.S.m() * omega.m()).trace() - logdet +
         prob.lambda * weighted_l1(prob, resid);
}

SolverState state_from_solution(const Solution& sol) {
  SolverState st;
  st.omega = sol.omega_hat;
  st.theta = sol.theta_hat;
  st.gamma = sol.gamma_hat;
  st.iter = 0;
  return st;
}

Solution solve(const ProblemSpec& prob, const SolverConfig& cfg,
               const std::optional<SolverState>& init) {
  if (cfg.rho <= 0.0) throw std::invalid_argument("solve: rho <= 0");
  if (cfg.max_iters < 1) throw std::invalid_argument("solve: max_iters < 1");
  const double tau_floor =
      largest_eigenvalue(prob.A.m().transpose() * prob.A.m()) *
      largest_eigenvalue(prob.B.m() * prob.B.m().transpose());
  double tau;
  if (cfg.tau) {
    tau = *cfg.tau;
    if (tau <= tau_floor) {
      std::ostringstream os;
      os << "solve: tau " << tau << " <= phi1(A^T A) phi1(B B^T) = "
         << tau_floor;
      throw std::invalid_argument(os.str());
    }
  } else {
    tau = tau_floor + 1e-8;
  }

  const Eigen::MatrixXd& S = prob.S.m();
  const Eigen::MatrixXd& A = prob.A.m();
  const Eigen::MatrixXd& B = prob.B.m();
  const Eigen::MatrixXd& C = prob.C.m();
  const Index p = prob.p();
  const Index a = prob.a();
  const Index b = prob.b();
  const double sqrt_ab = std::sqrt(static_cast<double>(a * b));

  SolverState st = init ? *init : default_init(prob);
  Eigen::MatrixXd omega = st.omega.m();
  Eigen::MatrixXd theta = st.theta.m();
  Eigen::MatrixXd gamma = st.gamma.m();
  double rho = cfg.rho;

  Solution sol;
  double min_eig = st.omega.min_eigenvalue();
  double logdet = 0.0;
  int k = 0;
  bool converged = false;
  double r_norm = 0.0, s_norm = 0.0;

  for (k = 1; k <= cfg.max_iters; ++k) {
    OmegaStep step = omega_step(S, A, B, C, omega, theta, gamma, rho, tau);
    const Eigen::MatrixXd a_omega_b = A * step.omega * B;
    const Eigen::MatrixXd theta_next =
        soft_matrix(a_omega_b - gamma / rho - C, prob.lambda / rho,
                    prob.penalty_weights);
    // Evaluated as (A Omega B - C) - Theta so the reported primal residual
    // is bitwise recomputable from the solution fields.
    const Eigen::MatrixXd constraint_gap = a_omega_b - C - theta_next;
    const Eigen::MatrixXd gamma_next = gamma - rho * constraint_gap;

    r_norm = constraint_gap.norm();
    s_norm =
        rho * (A.transpose() * (theta_next - theta) * B.transpose()).norm();

    if (!step.omega.allFinite() || !theta_next.allFinite() ||
        !gamma_next.allFinite()) {
      std::ostringstream os;
      os << "solve: non-finite iterate at iteration " << k;
      throw DivergedError(os.str(), k);
    }

    omega = std::move(step.omega);
    min_eig = step.min_eig;
    logdet = step.logdet;
    theta = theta_next;
    gamma = gamma_next;

    const double eps_pri =
        sqrt_ab * cfg.eps_abs +
        cfg.eps_rel * std::max({a_omega_b.norm(), theta.norm(), C.norm()});
    const double eps_dual =
        static_cast<double>(p) * cfg.eps_abs +
        cfg.eps_rel * (A.transpose() * gamma * B.transpose()).norm();

    if (cfg.record_trace) {
      const double obj = (S * omega).trace() - logdet +
                         prob.lambda * weighted_l1(prob, a_omega_b - C);
      sol.trace.push_back(TraceRow{k, obj, r_norm, s_norm});
    }

    if (r_norm <= eps_pri && s_norm <= eps_dual) {
      converged = true;
      break;
    }

    // Residual balancing every 10 iterations, with rho clamped to four
    // decades around its starting value so it cannot run away when one
    // residual sits at its floor.
    if (cfg.adaptive_rho && k % 10 == 0) {
      if (r_norm > 10.0 * s_norm) {
        rho = std::min(rho * 2.0, cfg.rho * 1e4);
      } else if (s_norm > 10.0 * r_norm) {
        rho = std::max(rho * 0.5, cfg.rho * 1e-4);
      }
    }
  }

  sol.iters_used = std::min(k, cfg.max_iters);
  sol.converged = converged;
  sol.primal_residual = r_norm;
  sol.dual_residual = s_norm;
  sol.omega_hat = SpdMatrix::trusted(SymmetricMatrix(omega), min_eig);
  sol.theta_hat = DenseMatrix(theta);
  sol.gamma_hat = DenseMatrix(gamma);
  sol.objective = (S * omega).trace() - logdet +
                  prob.lambda * weighted_l1(prob, A * omega * B - C);
  return sol;
}

}  // namespace charshrink
