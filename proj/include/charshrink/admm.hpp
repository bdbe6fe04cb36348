#pragma once

#include <optional>
#include <string>
#include <vector>

#include "charshrink/matrix.hpp"

namespace charshrink {

/// One instance of the penalized-likelihood precision estimation problem
///
///   minimize over positive definite Omega:
///     tr(S Omega) - log det(Omega) + lambda * |A Omega B - C|_1
///
/// S is a p x p covariance (PSD), A is a x p, B is p x b, C is a x b.
/// penalty_weights, when non-empty, is an a x b matrix of nonnegative
/// per-entry multipliers on lambda; entries with weight zero are unpenalized
/// (this is how the off-diagonal-only penalty variant is expressed).
struct ProblemSpec {
  SymmetricMatrix S;
  DenseMatrix A;
  DenseMatrix B;
  DenseMatrix C;
  double lambda = 0.0;
  DenseMatrix penalty_weights;  // empty => uniform weight 1
  std::string kind = "generic";

  ProblemSpec(SymmetricMatrix S_, DenseMatrix A_, DenseMatrix B_,
              DenseMatrix C_, double lambda_,
              DenseMatrix penalty_weights_ = DenseMatrix());

  Index p() const { return S.dim(); }
  Index a() const { return A.rows(); }
  Index b() const { return B.cols(); }
};

struct SolverConfig {
  double rho = 1.0;          // augmented Lagrangian parameter, fixed by default
  std::optional<double> tau; // empty => largest-eigenvalue product + 1e-8
  int max_iters = 5000;
  double eps_abs = 1e-8;
  double eps_rel = 1e-8;
  /// Residual-balancing rho adaptation (factor of 2 when one residual
  /// exceeds 10x the other). Off by default so runs are reproducible
  /// against the fixed-rho baseline.
  bool adaptive_rho = false;
  bool record_trace = false;
};

/// Iterates (Omega_k, Theta_k, Gamma_k). omega stays positive definite at
/// every iteration; the update formula guarantees it.
struct SolverState {
  SpdMatrix omega;
  DenseMatrix theta;  // a x b
  DenseMatrix gamma;  // a x b dual variable
  int iter = 0;
};

struct TraceRow {
  int iter;
  double objective;
  double primal_residual;
  double dual_residual;
};

struct Solution {
  SpdMatrix omega_hat;
  /// Sparse characteristic estimate. Zeros are exact (bitwise) where the
  /// soft-threshold produced them; A*omega_hat*B - C is only approximately
  /// sparse, so variable selection reads theta_hat.
  DenseMatrix theta_hat;
  DenseMatrix gamma_hat;  // final dual variable, kept so solves can warm start
  int iters_used = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  bool converged = false;
  std::vector<TraceRow> trace;
};

/// tau = phi_1(A^T A) * phi_1(B B^T) + 1e-8, the smallest value that keeps
/// the majorizer positive definite (plus slack). Largest eigenvalues come
/// from power iteration (tolerance 1e-10, at most 1000 iterations).
double default_tau(const DenseMatrix& A, const DenseMatrix& B);

/// Omega_0 = diag(1/(S_ii + 1e-8)), Theta_0 = A Omega_0 B - C, Gamma_0 = 0.
SolverState default_init(const ProblemSpec& prob);

/// One prox-linear Omega update:
///   G_k   = rho A^T (A Omega_k B - Gamma_k/rho - Theta_k - C) B^T
///   U Psi U^T = eigendecomposition of S + (G_k + G_k^T)/2 - rho tau Omega_k
///   Omega_{k+1} = U {-Psi + (Psi^2 + 4 rho tau I)^{1/2}} U^T / (2 rho tau)
/// The result satisfies the update's zero-gradient equation
///   S - Omega^{-1} + (G_k + G_k^T)/2 + rho tau (Omega - Omega_k) = 0
/// to machine precision and is positive definite by the formula.
SpdMatrix omega_update(const SolverState& state, const ProblemSpec& prob,
                       const SolverConfig& cfg);

/// Theta_{k+1} = soft(A Omega_{k+1} B - Gamma_k/rho - C, lambda/rho), with
/// the threshold scaled per entry by penalty_weights when present.
DenseMatrix theta_update(const SpdMatrix& omega_next, const SolverState& state,
                         const ProblemSpec& prob, const SolverConfig& cfg);

/// Gamma_{k+1} = Gamma_k - rho (A Omega_{k+1} B - Theta_{k+1} - C).
DenseMatrix dual_update(const DenseMatrix& gamma, const SpdMatrix& omega_next,
                        const DenseMatrix& theta_next, const ProblemSpec& prob,
                        const SolverConfig& cfg);

/// Runs the updates until the primal residual ||A Omega B - Theta - C||_F
/// and the dual residual rho ||A^T (Theta_k - Theta_{k-1}) B^T||_F fall
/// below
///   eps_pri  = sqrt(a b) eps_abs + eps_rel max(||A Omega B||_F, ||Theta||_F, ||C||_F)
///   eps_dual = p eps_abs + eps_rel ||A^T Gamma B^T||_F
/// or max_iters is reached (converged=false then, not an error). Non-finite
/// iterates throw DivergedError with the iteration index.
Solution solve(const ProblemSpec& prob, const SolverConfig& cfg = SolverConfig(),
               const std::optional<SolverState>& init = std::nullopt);

/// tr(S Omega) - log det(Omega) + lambda |A Omega B - C|_1 (weighted when
/// the problem carries a penalty mask).
double objective(const ProblemSpec& prob, const SpdMatrix& omega);

/// Rebuilds a solver state from a solution, for warm starts along a
/// tuning-parameter path.
SolverState state_from_solution(const Solution& sol);

}  // namespace charshrink
