#pragma once

#include <Eigen/Dense>

#include "charshrink/matrix.hpp"
#include "charshrink/rng.hpp"

namespace charshrink::test {

inline Eigen::MatrixXd random_matrix(Rng& rng, Index rows, Index cols,
                                     double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = scale * rng.normal();
  }
  return m;
}

inline SymmetricMatrix random_symmetric(Rng& rng, Index n,
                                        double scale = 1.0) {
  return SymmetricMatrix(random_matrix(rng, n, n, scale));
}

/// Well-conditioned random SPD matrix: Q diag(d) Q^T with eigenvalues in
/// [lo, hi].
inline SpdMatrix random_spd(Rng& rng, Index n, double lo = 0.5,
                            double hi = 2.0) {
  const Eigen::MatrixXd raw = random_matrix(rng, n, n);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  const Eigen::MatrixXd Q = qr.householderQ();
  Eigen::VectorXd d(n);
  for (Index i = 0; i < n; ++i) d(i) = lo + (hi - lo) * rng.uniform();
  return SpdMatrix(SymmetricMatrix(Q * d.asDiagonal() * Q.transpose()));
}

/// Sample covariance of n standard normal rows, positive definite for
/// n > p (almost surely).
inline SymmetricMatrix random_covariance(Rng& rng, Index p, Index n) {
  const Eigen::MatrixXd X = random_matrix(rng, n, p);
  return SymmetricMatrix(Eigen::MatrixXd(X.transpose() * X / double(n)));
}

}  // namespace charshrink::test
