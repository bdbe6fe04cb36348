#include "charshrink/matrix.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace charshrink {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) {
    std::ostringstream os;
    os << what << ": non-finite entry";
    throw std::invalid_argument(os.str());
  }
}

Eigen::MatrixXd from_nested(
    std::initializer_list<std::initializer_list<double>> rows) {
  const Index nr = static_cast<Index>(rows.size());
  const Index nc = nr > 0 ? static_cast<Index>(rows.begin()->size()) : 0;
  Eigen::MatrixXd m(nr, nc);
  Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Index>(row.size()) != nc) {
      throw std::invalid_argument("ragged initializer list");
    }
    Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

DenseMatrix::DenseMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  require_finite(m_, "DenseMatrix");
}

DenseMatrix::DenseMatrix(
    std::initializer_list<std::initializer_list<double>> rows)
    : DenseMatrix(from_nested(rows)) {}

DenseMatrix DenseMatrix::zero(Index rows, Index cols) {
  return DenseMatrix(Eigen::MatrixXd::Zero(rows, cols));
}

DenseMatrix DenseMatrix::identity(Index n) {
  return DenseMatrix(Eigen::MatrixXd::Identity(n, n));
}

DenseMatrix DenseMatrix::from_row_major(Index rows, Index cols,
                                        const std::vector<double>& entries) {
  if (static_cast<Index>(entries.size()) != rows * cols) {
    std::ostringstream os;
    os << "from_row_major: " << entries.size() << " entries for " << rows
       << "x" << cols;
    throw std::invalid_argument(os.str());
  }
  using RowMajorMap = Eigen::Map<const Eigen::Matrix<
      double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  return DenseMatrix(Eigen::MatrixXd(RowMajorMap(entries.data(), rows, cols)));
}

SymmetricMatrix::SymmetricMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << "SymmetricMatrix: " << m.rows() << "x" << m.cols() << " not square";
    throw std::invalid_argument(os.str());
  }
  require_finite(m, "SymmetricMatrix");
  m_ = 0.5 * (m + m.transpose());
}

SymmetricMatrix::SymmetricMatrix(
    std::initializer_list<std::initializer_list<double>> rows)
    : SymmetricMatrix(from_nested(rows)) {}

SymmetricMatrix SymmetricMatrix::zero(Index n) {
  return SymmetricMatrix(Eigen::MatrixXd::Zero(n, n));
}

SymmetricMatrix SymmetricMatrix::identity(Index n) {
  return SymmetricMatrix(Eigen::MatrixXd::Identity(n, n));
}

SpdMatrix::SpdMatrix(const SymmetricMatrix& s) : s_(s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      s.m(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("SpdMatrix: eigendecomposition failed");
  }
  min_eig_ = s.dim() > 0 ? es.eigenvalues().minCoeff() : 1.0;
  if (min_eig_ <= 1e-12) {
    std::ostringstream os;
    os << "SpdMatrix: smallest eigenvalue " << min_eig_ << " <= 1e-12";
    throw NotPositiveDefiniteError(os.str());
  }
}

SpdMatrix SpdMatrix::trusted(SymmetricMatrix s, double min_eigenvalue) {
  SpdMatrix out;
  out.s_ = std::move(s);
  out.min_eig_ = min_eigenvalue;
  return out;
}

SpdMatrix SpdMatrix::identity(Index n) {
  return SpdMatrix::trusted(SymmetricMatrix::identity(n), 1.0);
}

DenseMatrix soft_threshold(const DenseMatrix& M, double t) {
  if (t < 0.0) {
    throw std::invalid_argument("soft_threshold: negative threshold");
  }
  Eigen::MatrixXd out(M.rows(), M.cols());
  for (Index j = 0; j < M.cols(); ++j) {
    for (Index i = 0; i < M.rows(); ++i) {
      const double x = M(i, j);
      const double mag = std::abs(x) - t;
      out(i, j) = mag > 0.0 ? (x > 0.0 ? mag : -mag) : 0.0;
    }
  }
  return DenseMatrix(std::move(out));
}

EigenPair sym_eigen(const SymmetricMatrix& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M.m());
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("sym_eigen: eigendecomposition failed");
  }
  const Index n = M.dim();
  // Eigen returns ascending order; flip to descending.
  Eigen::VectorXd values = es.eigenvalues().reverse();
  Eigen::MatrixXd vectors = es.eigenvectors().rowwise().reverse();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (vectors(i, j) != 0.0) {
        if (vectors(i, j) < 0.0) vectors.col(j) = -vectors.col(j);
        break;
      }
    }
  }
  return EigenPair{DenseMatrix(std::move(vectors)), std::move(values)};
}

SymmetricMatrix sample_covariance(const DenseMatrix& X, bool center) {
  const Index n = X.rows();
  if (n < 1) throw std::invalid_argument("sample_covariance: n = 0");
  if (center) {
    Eigen::MatrixXd centered =
        X.m().rowwise() - X.m().colwise().mean();
    return SymmetricMatrix(centered.transpose() * centered /
                           static_cast<double>(n));
  }
  return SymmetricMatrix(X.m().transpose() * X.m() / static_cast<double>(n));
}

std::pair<SpdMatrix, double> spd_inverse_and_logdet(const SpdMatrix& M) {
  const EigenPair ep = sym_eigen(M.sym());
  const Index n = M.dim();
  const double min_eig = n > 0 ? ep.values(n - 1) : 1.0;
  if (min_eig <= 1e-12) {
    std::ostringstream os;
    os << "spd_inverse_and_logdet: smallest eigenvalue " << min_eig
       << " <= 1e-12";
    throw NotPositiveDefiniteError(os.str());
  }
  const Eigen::VectorXd inv_vals = ep.values.cwiseInverse();
  SymmetricMatrix inv(ep.vectors.m() * inv_vals.asDiagonal() *
                      ep.vectors.m().transpose());
  const double logdet = ep.values.array().log().sum();
  return {SpdMatrix::trusted(std::move(inv), 1.0 / ep.values(0)), logdet};
}

}  // namespace charshrink
