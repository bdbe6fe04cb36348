#include <doctest.h>

#include <cmath>

#include "charshrink/admm.hpp"
#include "charshrink/rng.hpp"
#include "helpers.hpp"

using namespace charshrink;
using charshrink::test::random_covariance;
using charshrink::test::random_matrix;
using charshrink::test::random_symmetric;

namespace {

ProblemSpec identity_problem(const SymmetricMatrix& S, double lambda) {
  const Index p = S.dim();
  return ProblemSpec(S, DenseMatrix::identity(p), DenseMatrix::identity(p),
                     DenseMatrix::zero(p, p), lambda);
}

/// Residual of the omega update's zero-gradient equation,
/// S - Omega^{-1} + (G + G^T)/2 + rho tau (Omega - Omega_k).
double gradient_equation_residual(const SolverState& state,
                                  const ProblemSpec& prob,
                                  const SolverConfig& cfg,
                                  const SpdMatrix& omega_next) {
  const double tau = cfg.tau ? *cfg.tau : default_tau(prob.A, prob.B);
  const Eigen::MatrixXd G =
      cfg.rho * prob.A.m().transpose() *
      (prob.A.m() * state.omega.m() * prob.B.m() - state.gamma.m() / cfg.rho -
       state.theta.m() - prob.C.m()) *
      prob.B.m().transpose();
  const Eigen::MatrixXd resid =
      prob.S.m() - omega_next.m().inverse() + 0.5 * (G + G.transpose()) +
      cfg.rho * tau * (omega_next.m() - state.omega.m());
  return resid.norm();
}

}  // namespace

TEST_SUITE("admm_solver") {

TEST_CASE("problem spec validates shapes and lambda") {
  const SymmetricMatrix S = SymmetricMatrix::identity(3);
  CHECK_THROWS_WITH_AS(
      ProblemSpec(S, DenseMatrix::zero(3, 2), DenseMatrix::zero(3, 2),
                  DenseMatrix::zero(3, 2), 1.0),
      doctest::Contains("A.cols (2) != S.dim (3)"), std::invalid_argument);
  CHECK_THROWS_AS(ProblemSpec(S, DenseMatrix::zero(2, 3),
                              DenseMatrix::zero(2, 2), DenseMatrix::zero(2, 2),
                              1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProblemSpec(S, DenseMatrix::zero(2, 3),
                              DenseMatrix::zero(3, 2), DenseMatrix::zero(3, 3),
                              1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(identity_problem(S, -0.5), std::invalid_argument);
}

TEST_CASE("default_tau examples") {
  CHECK(default_tau(DenseMatrix::identity(4), DenseMatrix::identity(4)) ==
        doctest::Approx(1.0 + 1e-8).epsilon(1e-12));

  const DenseMatrix twoI(Eigen::MatrixXd(2.0 *
                                         Eigen::MatrixXd::Identity(2, 2)));
  CHECK(default_tau(twoI, DenseMatrix::identity(2)) ==
        doctest::Approx(4.0 + 1e-8).epsilon(1e-12));

  // A^T A = [[1,1],[1,2]] has largest eigenvalue (3+sqrt(5))/2.
  const DenseMatrix A{{1.0, 1.0}, {0.0, 1.0}};
  CHECK(default_tau(A, DenseMatrix::identity(2)) ==
        doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0 + 1e-8).epsilon(1e-10));
}

TEST_CASE("omega_update solves the scalar instance from a standing start") {
  const ProblemSpec prob(SymmetricMatrix({{1.0}}), DenseMatrix{{1.0}},
                         DenseMatrix{{1.0}}, DenseMatrix{{0.0}}, 0.5);
  SolverConfig cfg;
  cfg.tau = 1.0 + 1e-8;
  SolverState st;
  st.omega = SpdMatrix::identity(1);
  st.theta = DenseMatrix{{1.0}};  // A Omega B - C at Omega = 1
  st.gamma = DenseMatrix{{0.0}};
  const SpdMatrix next = omega_update(st, prob, cfg);
  // G = 0 here, so the update solves 1 - 1/w + tau (w - 1) = 0, i.e. w = 1.
  CHECK(next(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("omega_update matches the hand-solved scalar root to 1e-10") {
  Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const double s = 0.2 + 2.0 * rng.uniform();
    const double a = 0.5 + rng.uniform();
    const double b = 0.5 + rng.uniform();
    const double c = rng.normal();
    const double theta = rng.normal();
    const double gamma = rng.normal();
    const double omega_k = 0.1 + 2.0 * rng.uniform();
    const double rho = 0.5 + rng.uniform();
    const double tau = a * a * b * b + 0.1 + rng.uniform();

    ProblemSpec prob(SymmetricMatrix({{s}}), DenseMatrix{{a}},
                     DenseMatrix{{b}}, DenseMatrix{{c}}, 0.3);
    SolverConfig cfg;
    cfg.rho = rho;
    cfg.tau = tau;
    SolverState st;
    st.omega = SpdMatrix::trusted(SymmetricMatrix({{omega_k}}), omega_k);
    st.theta = DenseMatrix{{theta}};
    st.gamma = DenseMatrix{{gamma}};

    // Scalar gradient equation: s + g - 1/w + rho tau (w - omega_k) = 0 with
    // g = rho a (a omega_k b - gamma/rho - theta - c) b, a quadratic in w
    // whose positive root is (-m + sqrt(m^2 + 4 rho tau)) / (2 rho tau),
    // m = s + g - rho tau omega_k.
    const double g = rho * a * (a * omega_k * b - gamma / rho - theta - c) * b;
    const double m = s + g - rho * tau * omega_k;
    const double root =
        (-m + std::sqrt(m * m + 4.0 * rho * tau)) / (2.0 * rho * tau);

    const SpdMatrix next = omega_update(st, prob, cfg);
    CHECK(std::abs(next(0, 0) - root) <= 1e-10);
  }
}

TEST_CASE("omega_update satisfies the gradient equation on random instances") {
  Rng rng(7);
  const Index p = 5, a = 6, b = 4;
  const ProblemSpec prob(random_covariance(rng, p, 20),
                         DenseMatrix(random_matrix(rng, a, p, 0.5)),
                         DenseMatrix(random_matrix(rng, p, b, 0.5)),
                         DenseMatrix(random_matrix(rng, a, b)), 0.2);
  SolverConfig cfg;
  SolverState st = default_init(prob);
  for (int step = 0; step < 5; ++step) {
    const SpdMatrix next = omega_update(st, prob, cfg);
    CHECK(gradient_equation_residual(st, prob, cfg, next) <= 1e-8 * p);
    CHECK(next.min_eigenvalue() > 1e-14);
    st.theta = theta_update(next, st, prob, cfg);
    st.gamma = dual_update(st.gamma, next, st.theta, prob, cfg);
    st.omega = next;
  }
}

TEST_CASE("theta_update special cases") {
  Rng rng(13);
  const Index p = 3;
  SolverConfig cfg;

  // lambda = 0: theta equals the unthresholded argument exactly.
  ProblemSpec prob0 = identity_problem(random_covariance(rng, p, 12), 0.0);
  SolverState st = default_init(prob0);
  st.gamma = DenseMatrix(random_matrix(rng, p, p));
  const SpdMatrix omega = st.omega;
  const DenseMatrix theta0 = theta_update(omega, st, prob0, cfg);
  const Eigen::MatrixXd expected =
      prob0.A.m() * omega.m() * prob0.B.m() - st.gamma.m() / cfg.rho -
      prob0.C.m();
  CHECK((theta0.m() - expected).norm() == 0.0);

  // Threshold above every |entry|: theta is exactly zero.
  ProblemSpec prob_big(prob0.S, prob0.A, prob0.B, prob0.C,
                       expected.cwiseAbs().maxCoeff() + 1.0);
  const DenseMatrix theta_zero = theta_update(omega, st, prob_big, cfg);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) CHECK(theta_zero(i, j) == 0.0);
  }

  // Scalar arithmetic: argument 2.0, threshold 0.5.
  ProblemSpec prob1(SymmetricMatrix({{1.0}}), DenseMatrix{{1.0}},
                    DenseMatrix{{1.0}}, DenseMatrix{{0.0}}, 0.5);
  SolverState st1;
  st1.omega = SpdMatrix::trusted(SymmetricMatrix({{2.0}}), 2.0);
  st1.theta = DenseMatrix{{0.0}};
  st1.gamma = DenseMatrix{{0.0}};
  CHECK(theta_update(st1.omega, st1, prob1, cfg)(0, 0) == 1.5);
}

TEST_CASE("dual_update examples") {
  SolverConfig cfg;
  const ProblemSpec prob(SymmetricMatrix({{1.0}}), DenseMatrix{{1.0}},
                         DenseMatrix{{1.0}}, DenseMatrix{{0.0}}, 0.1);
  const SpdMatrix omega = SpdMatrix::trusted(SymmetricMatrix({{2.0}}), 2.0);

  // Feasible point: gamma unchanged.
  const DenseMatrix feasible_theta{{2.0}};
  CHECK(dual_update(DenseMatrix{{0.7}}, omega, feasible_theta, prob, cfg)(0, 0)
        == 0.7);

  // Unit violation with gamma = 0, rho = 1.
  const DenseMatrix theta1{{1.0}};
  const DenseMatrix g1 = dual_update(DenseMatrix{{0.0}}, omega, theta1, prob,
                                     cfg);
  CHECK(g1(0, 0) == -1.0);

  // Two updates with a constant violation v decrease gamma by 2 rho v.
  const DenseMatrix g2 = dual_update(g1, omega, theta1, prob, cfg);
  CHECK(g2(0, 0) == -2.0);
}

TEST_CASE("solve with lambda 0 recovers the inverse covariance") {
  Rng rng(19);
  SolverConfig cfg;
  cfg.eps_abs = 1e-10;
  cfg.eps_rel = 1e-10;
  for (Index p : {2, 10, 25}) {
    const SymmetricMatrix S = random_covariance(rng, p, 4 * p);
    const Solution sol = solve(identity_problem(S, 0.0), cfg);
    CHECK(sol.converged);
    CHECK((sol.omega_hat.m() - S.m().inverse()).norm() <= 1e-6);
  }
}

TEST_CASE("solve on a strongly penalized 2x2 zeroes the off-diagonal") {
  const SymmetricMatrix S({{1.0, 0.5}, {0.5, 1.0}});
  const Solution sol = solve(identity_problem(S, 10.0));
  CHECK(sol.converged);
  CHECK(sol.theta_hat(0, 1) == 0.0);
  CHECK(sol.theta_hat(1, 0) == 0.0);
  CHECK(std::abs(sol.omega_hat(0, 1)) <= 1e-6);
}

TEST_CASE("residuals fall below 1e-6 on random instances") {
  Rng rng(23);
  for (Index p : {5, 20, 50}) {
    const Index a = p + 2, b = p + 1;
    const double scale = 1.0 / std::sqrt(static_cast<double>(p));
    const ProblemSpec prob(random_covariance(rng, p, 2 * p),
                           DenseMatrix(random_matrix(rng, a, p, scale)),
                           DenseMatrix(random_matrix(rng, p, b, scale)),
                           DenseMatrix::zero(a, b), 0.1);
    SolverConfig cfg;
    cfg.eps_abs = 1e-9;
    cfg.eps_rel = 1e-9;
    const Solution sol = solve(prob, cfg);
    CHECK(sol.converged);
    CHECK(sol.iters_used <= 5000);
    CHECK(sol.primal_residual <= 1e-6);
    CHECK(sol.dual_residual <= 1e-6);
    CHECK(sol.omega_hat.min_eigenvalue() > 1e-14);

    // Recomputable primal residual.
    const double recomputed =
        (prob.A.m() * sol.omega_hat.m() * prob.B.m() - prob.C.m() -
         sol.theta_hat.m())
            .norm();
    CHECK(recomputed == sol.primal_residual);
  }
}

TEST_CASE("objective examples and descent from the initializer") {
  CHECK(objective(identity_problem(SymmetricMatrix::identity(2), 0.0),
                  SpdMatrix::identity(2)) == doctest::Approx(2.0));

  const ProblemSpec scalar(SymmetricMatrix({{1.0}}), DenseMatrix{{1.0}},
                           DenseMatrix{{1.0}}, DenseMatrix{{0.0}}, 1.0);
  CHECK(objective(scalar, SpdMatrix::trusted(SymmetricMatrix({{2.0}}), 2.0)) ==
        doctest::Approx(2.0 - std::log(2.0) + 2.0).epsilon(1e-12));

  Rng rng(31);
  const ProblemSpec prob = identity_problem(random_covariance(rng, 6, 18),
                                            0.3);
  const Solution sol = solve(prob);
  CHECK(sol.objective <= objective(prob, default_init(prob).omega) + 1e-12);

  // Local optimality probe: random symmetric perturbations only increase
  // the objective.
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd E = random_matrix(rng, 6, 6, 1.0);
    const SymmetricMatrix perturbed(
        Eigen::MatrixXd(sol.omega_hat.m() + 0.01 * (E + E.transpose())));
    SpdMatrix candidate;
    try {
      candidate = SpdMatrix(perturbed);
    } catch (const NotPositiveDefiniteError&) {
      continue;
    }
    CHECK(sol.objective <= objective(prob, candidate) + 1e-9);
  }
}

TEST_CASE("theta zeros are bitwise zeros") {
  Rng rng(37);
  const ProblemSpec prob = identity_problem(random_covariance(rng, 8, 24),
                                            0.4);
  const Solution sol = solve(prob);
  int zeros = 0;
  for (Index j = 0; j < 8; ++j) {
    for (Index i = 0; i < 8; ++i) {
      if (sol.theta_hat(i, j) == 0.0) ++zeros;
      CHECK((sol.theta_hat(i, j) == 0.0 ||
             std::abs(sol.theta_hat(i, j)) > 0.0));
    }
  }
  CHECK(zeros > 0);  // at lambda 0.4 something must be shrunk away
}

TEST_CASE("solve is deterministic") {
  Rng rng(43);
  const ProblemSpec prob = identity_problem(random_covariance(rng, 7, 21),
                                            0.2);
  const Solution s1 = solve(prob);
  const Solution s2 = solve(prob);
  CHECK((s1.omega_hat.m() - s2.omega_hat.m()).norm() == 0.0);
  CHECK(s1.iters_used == s2.iters_used);
  CHECK(s1.objective == s2.objective);
}

TEST_CASE("max_iters exhaustion reports converged = false") {
  Rng rng(47);
  const ProblemSpec prob = identity_problem(random_covariance(rng, 6, 18),
                                            0.2);
  SolverConfig cfg;
  cfg.max_iters = 2;
  const Solution sol = solve(prob, cfg);
  CHECK_FALSE(sol.converged);
  CHECK(sol.iters_used == 2);
}

TEST_CASE("explicit tau below the eigenvalue product is rejected") {
  const ProblemSpec prob(SymmetricMatrix::identity(2),
                         DenseMatrix::identity(2), DenseMatrix::identity(2),
                         DenseMatrix::zero(2, 2), 0.1);
  SolverConfig cfg;
  cfg.tau = 0.5;  // phi1 product is 1
  CHECK_THROWS_AS(solve(prob, cfg), std::invalid_argument);
}

TEST_CASE("non-finite iterates raise DivergedError with the iteration") {
  // A violently non-PSD S makes the first update overflow.
  const ProblemSpec prob(SymmetricMatrix({{-1e307}}), DenseMatrix{{1.0}},
                         DenseMatrix{{1.0}}, DenseMatrix{{0.0}}, 0.0);
  try {
    solve(prob);
    FAIL("expected DivergedError");
  } catch (const DivergedError& e) {
    CHECK(e.iteration() >= 1);
  }
}

TEST_CASE("trace records one row per iteration") {
  Rng rng(51);
  const ProblemSpec prob = identity_problem(random_covariance(rng, 5, 15),
                                            0.3);
  SolverConfig cfg;
  cfg.record_trace = true;
  const Solution sol = solve(prob, cfg);
  CHECK(static_cast<int>(sol.trace.size()) == sol.iters_used);
  CHECK(sol.trace.front().iter == 1);
  CHECK(sol.trace.back().iter == sol.iters_used);
  CHECK(sol.trace.back().primal_residual == sol.primal_residual);
  CHECK(sol.trace.back().dual_residual == sol.dual_residual);
}

TEST_CASE("warm starting from the solution converges immediately") {
  Rng rng(59);
  const ProblemSpec prob = identity_problem(random_covariance(rng, 6, 18),
                                            0.25);
  const Solution cold = solve(prob);
  const Solution warm = solve(prob, SolverConfig(),
                              state_from_solution(cold));
  CHECK(warm.converged);
  CHECK(warm.iters_used <= 5);
}

TEST_CASE("adaptive rho still converges and matches the fixed-rho optimum") {
  Rng rng(67);
  const ProblemSpec prob = identity_problem(random_covariance(rng, 6, 18),
                                            0.3);
  SolverConfig adaptive;
  adaptive.adaptive_rho = true;
  const Solution a = solve(prob, adaptive);
  const Solution b = solve(prob);
  CHECK(a.converged);
  CHECK((a.omega_hat.m() - b.omega_hat.m()).norm() <= 1e-5);
}

}  // TEST_SUITE
