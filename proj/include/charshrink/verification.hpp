#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "charshrink/admm.hpp"
#include "charshrink/simulation.hpp"

namespace charshrink {

/// First-order optimality certificate for a solution of the penalized
/// problem. `residual` is the Frobenius norm of the symmetrized
/// stationarity map
///   S - Omega^{-1} + lambda (A^T Z B^T + B Z^T A) / 2,
/// with Z the best admissible L1 subgradient at theta_hat.
/// `max_subgradient_violation` reports how far the unconstrained
/// least-squares choice of Z on the zero entries lands outside its
/// admissible box; `support_consistent` is true when the nonzero theta
/// entries agree in sign with A Omega B - C and the violation is at most
/// 1e-6.
struct KktReport {
  double residual = 0.0;
  double max_subgradient_violation = 0.0;
  bool support_consistent = true;
};

/// On the support of theta_hat, Z is pinned to w * sign(theta); on the zero
/// entries Z minimizes the stationarity residual over the box [-w, w]
/// (projected gradient on the convex quadratic; the stationarity is
/// symmetrized because the optimization domain is symmetric matrices).
KktReport kkt_residual(const ProblemSpec& prob, const Solution& sol);

/// A = B = I closed form: xi(p, G) = sqrt(#nonzero entries of Omega*) with
/// an exact-zero test.
double compatibility_constant_identity(const SymmetricMatrix& omega_star);

/// Lower bound on xi(p, G) = sup_{M symmetric, M != 0} |[A M B]_G|_1 / ||M||_F
/// by multi-start ascent over the unit Frobenius sphere (conditional-gradient
/// steps, which are monotone for this positively homogeneous objective).
/// Deterministic per seed; more restarts never decrease the returned value.
double compatibility_constant_estimate(
    const DenseMatrix& A, const DenseMatrix& B,
    const std::vector<std::pair<int, int>>& support, int restarts,
    std::uint64_t seed);

/// Cells (i,j) with mask(i,j) != 0.
std::vector<std::pair<int, int>> support_from_mask(const DenseMatrix& mask);

struct RateRow {
  int n = 0;
  double mean_frob = 0.0;
  double stderr_frob = 0.0;
};

struct RateTable {
  std::vector<RateRow> rows;
  /// Least-squares slope of log(mean_frob) against log(n); defined as 0
  /// when n has no variation.
  double slope = 0.0;
};

/// For each n, draws `replications` mean-zero samples of size n from
/// N(0, Sigma*), forms S_n = X^T X / n (uncentered), solves the A = B = I
/// problem at lambda_n = K (log p / n)^{1/2}, and records the mean Frobenius
/// error against Omega*. Replication r at n-index i uses the derived seed
/// stream (seed, i, r).
RateTable rate_experiment(const TrueParams& params,
                          const std::vector<int>& n_list, int replications,
                          double K, std::uint64_t seed,
                          const SolverConfig& solver = SolverConfig());

void write_rate_csv(const std::filesystem::path& path, const RateTable& table);

}  // namespace charshrink
