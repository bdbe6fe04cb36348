#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <utility>
#include <vector>

#include "charshrink/errors.hpp"

namespace charshrink {

using Index = Eigen::Index;

/// Dense real matrix. Constructors reject non-finite entries; instances are
/// immutable values after construction and safe to share across threads.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(Eigen::MatrixXd m);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix zero(Index rows, Index cols);
  static DenseMatrix identity(Index n);
  /// Builds from row-major entries; entries.size() must equal rows*cols.
  static DenseMatrix from_row_major(Index rows, Index cols,
                                    const std::vector<double>& entries);

  Index rows() const { return m_.rows(); }
  Index cols() const { return m_.cols(); }
  bool empty() const { return m_.size() == 0; }
  double operator()(Index i, Index j) const { return m_(i, j); }
  const Eigen::MatrixXd& m() const { return m_; }

 private:
  Eigen::MatrixXd m_;
};

/// Square matrix with entries[i][j] == entries[j][i] exactly; constructors
/// symmetrize via (M + M^T)/2, which is bitwise symmetric.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(const Eigen::MatrixXd& m);
  SymmetricMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SymmetricMatrix zero(Index n);
  static SymmetricMatrix identity(Index n);

  Index dim() const { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  const Eigen::MatrixXd& m() const { return m_; }
  DenseMatrix dense() const { return DenseMatrix(m_); }

 private:
  Eigen::MatrixXd m_;
};

/// Symmetric matrix certified positive definite. The checked constructor
/// eigendecomposes and requires the smallest eigenvalue to exceed 1e-12;
/// below that it throws rather than silently regularizing. `trusted` skips
/// the check for callers whose construction formula guarantees positive
/// eigenvalues (the ADMM omega update), and records the known smallest one.
class SpdMatrix {
 public:
  SpdMatrix() = default;
  explicit SpdMatrix(const SymmetricMatrix& s);
  static SpdMatrix trusted(SymmetricMatrix s, double min_eigenvalue);
  static SpdMatrix identity(Index n);

  Index dim() const { return s_.dim(); }
  double operator()(Index i, Index j) const { return s_(i, j); }
  const SymmetricMatrix& sym() const { return s_; }
  const Eigen::MatrixXd& m() const { return s_.m(); }
  double min_eigenvalue() const { return min_eig_; }

 private:
  SymmetricMatrix s_;
  double min_eig_ = 0.0;
};

/// Result of a symmetric eigendecomposition: values sorted descending, and
/// each eigenvector's first nonzero component made nonnegative so the
/// decomposition of a given matrix is unique.
struct EigenPair {
  DenseMatrix vectors;     // columns are eigenvectors, orthogonal
  Eigen::VectorXd values;  // descending
};

/// Elementwise max(|m| - t, 0) * sign(m). Entries at or below the threshold
/// come out exactly zero. Throws std::invalid_argument for t < 0.
DenseMatrix soft_threshold(const DenseMatrix& M, double t);

EigenPair sym_eigen(const SymmetricMatrix& M);

/// Sample covariance of the n x p data matrix X with divisor n (the maximum
/// likelihood convention; no n-1 option). When center is set, column means
/// are subtracted first.
SymmetricMatrix sample_covariance(const DenseMatrix& X, bool center);

/// Inverse and log-determinant via eigendecomposition. Throws
/// NotPositiveDefiniteError if the smallest eigenvalue is <= 1e-12.
std::pair<SpdMatrix, double> spd_inverse_and_logdet(const SpdMatrix& M);

}  // namespace charshrink
