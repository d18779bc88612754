#pragma once

// Small dense symmetric linear algebra shared by every other module.
//
// Symmetric matrices are read from their lower triangle only; the upper
// triangle is ignored on input and mirrored on output.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <string>

#include "mpd/errors.hpp"

namespace mpd {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Observations, one row per period and one column per asset.
template <typename Scalar>
using Sample = Matrix<Scalar>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

/// Copies the lower triangle onto the upper triangle.
template <typename Derived>
Matrix<typename Derived::Scalar> symmetrize_lower(const Eigen::MatrixBase<Derived>& m) {
  Matrix<typename Derived::Scalar> out = m.template triangularView<Eigen::Lower>();
  out.template triangularView<Eigen::StrictlyUpper>() = out.transpose();
  return out;
}

/// Lower Cholesky factor of a symmetric positive-definite matrix.
///
/// A pivot counts as nonpositive when it is at most
/// N * machine-epsilon * max|diag|, which doubles as the library-wide PD test.
template <typename Scalar>
class Cholesky {
 public:
  template <typename Derived>
  explicit Cholesky(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
      raise(ErrorKind::DimensionMismatch, "Cholesky requires a nonempty square matrix");
    }
    const Eigen::Index n = m.rows();
    const Scalar max_diag = m.diagonal().cwiseAbs().maxCoeff();
    const Scalar threshold = Scalar(n) * std::numeric_limits<Scalar>::epsilon() * max_diag;
    if (!m.allFinite()) {
      raise(ErrorKind::NotPositiveDefinite, "matrix has non-finite entries");
    }
    llt_.compute(m.template selfadjointView<Eigen::Lower>());
    if (llt_.info() != Eigen::Success) {
      raise(ErrorKind::NotPositiveDefinite, "nonpositive pivot in Cholesky factorization");
    }
    const auto& l = llt_.matrixLLT();
    for (Eigen::Index j = 0; j < n; ++j) {
      const Scalar pivot = l(j, j) * l(j, j);
      if (!(pivot > threshold)) {
        raise(ErrorKind::NotPositiveDefinite,
              "pivot " + std::to_string(static_cast<double>(pivot)) + " at index " +
                  std::to_string(j) + " below threshold");
      }
    }
  }

  Eigen::Index size() const { return llt_.matrixLLT().rows(); }

  Matrix<Scalar> matrix_l() const { return llt_.matrixL(); }

  /// L^{-1} b, column by column.
  template <typename Derived>
  Matrix<Scalar> whiten(const Eigen::MatrixBase<Derived>& b) const {
    return llt_.matrixL().solve(b);
  }

  /// M^{-1} b.
  template <typename Derived>
  Matrix<Scalar> solve(const Eigen::MatrixBase<Derived>& b) const {
    return llt_.solve(b);
  }

  Matrix<Scalar> inverse() const {
    return llt_.solve(Matrix<Scalar>::Identity(size(), size()));
  }

  /// ln det M.
  Scalar log_det() const {
    return Scalar(2) * llt_.matrixLLT().diagonal().array().log().sum();
  }

 private:
  Eigen::LLT<Matrix<Scalar>, Eigen::Lower> llt_;
};

template <typename Derived>
Cholesky(const Eigen::MatrixBase<Derived>&) -> Cholesky<typename Derived::Scalar>;

/// Lower factor L with M = L L^t.
template <typename Derived>
Matrix<typename Derived::Scalar> cholesky(const Eigen::MatrixBase<Derived>& m) {
  return Cholesky<typename Derived::Scalar>(m).matrix_l();
}

template <typename Scalar, typename DX, typename DM>
Scalar mahalanobis_sq(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DM>& mu,
                      const Cholesky<Scalar>& chol) {
  if (x.size() != mu.size() || x.size() != chol.size()) {
    raise(ErrorKind::DimensionMismatch, "mahalanobis_sq: dimensions disagree");
  }
  const Vector<Scalar> diff = x - mu;
  return chol.whiten(diff).squaredNorm();
}

/// (x - mu)^t sigma^{-1} (x - mu).
template <typename DX, typename DM, typename DS>
typename DX::Scalar mahalanobis_sq(const Eigen::MatrixBase<DX>& x,
                                   const Eigen::MatrixBase<DM>& mu,
                                   const Eigen::MatrixBase<DS>& sigma) {
  return mahalanobis_sq(x, mu, Cholesky<typename DX::Scalar>(sigma));
}

/// Squared Mahalanobis distance of every row of `sample` to `mu`.
template <typename Scalar, typename DX, typename DM>
Vector<Scalar> mahalanobis_sq_rows(const Eigen::MatrixBase<DX>& sample,
                                   const Eigen::MatrixBase<DM>& mu,
                                   const Cholesky<Scalar>& chol) {
  if (sample.cols() != mu.size() || mu.size() != chol.size()) {
    raise(ErrorKind::DimensionMismatch, "mahalanobis_sq_rows: dimensions disagree");
  }
  const Matrix<Scalar> centered = (sample.rowwise() - mu.transpose()).transpose();
  return chol.whiten(centered).colwise().squaredNorm().transpose();
}

inline Eigen::Index vecs_size(Eigen::Index n) { return n + n * (n - 1) / 2; }

/// (s11/sqrt2, ..., sNN/sqrt2, s21, s31, ..., sN1, s32, ..., s_{N,N-1}).
template <typename Derived>
Vector<typename Derived::Scalar> vecs(const Eigen::MatrixBase<Derived>& sigma) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = sigma.rows();
  Vector<Scalar> out(vecs_size(n));
  const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
  for (Eigen::Index i = 0; i < n; ++i) out(i) = sigma(i, i) * inv_sqrt2;
  Eigen::Index k = n;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) out(k++) = sigma(i, j);
  }
  return out;
}

/// Inverse of vecs: rebuilds the full symmetric matrix.
template <typename Derived>
Matrix<typename Derived::Scalar> unvecs(const Eigen::MatrixBase<Derived>& v, Eigen::Index n) {
  using Scalar = typename Derived::Scalar;
  if (v.size() != vecs_size(n)) {
    raise(ErrorKind::DimensionMismatch, "unvecs: vector length does not match dimension");
  }
  Matrix<Scalar> out(n, n);
  const Scalar sqrt2 = std::sqrt(Scalar(2));
  for (Eigen::Index i = 0; i < n; ++i) out(i, i) = v(i) * sqrt2;
  Eigen::Index k = n;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      out(i, j) = v(k);
      out(j, i) = v(k);
      ++k;
    }
  }
  return out;
}

/// Columns of the lower triangle, diagonal included, stacked.
template <typename Derived>
Vector<typename Derived::Scalar> vech(const Eigen::MatrixBase<Derived>& sigma) {
  const Eigen::Index n = sigma.rows();
  Vector<typename Derived::Scalar> out(n * (n + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) out(k++) = sigma(i, j);
  }
  return out;
}

/// Symmetric PSD square root via the spectral decomposition.
template <typename Derived>
Matrix<typename Derived::Scalar> symmetric_sqrt(const Eigen::MatrixBase<Derived>& sigma) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(
      Matrix<Scalar>(sigma.template selfadjointView<Eigen::Lower>()));
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < Scalar(0)) {
    raise(ErrorKind::NotPositiveDefinite, "symmetric_sqrt: negative eigenvalue");
  }
  const Vector<Scalar> root = eig.eigenvalues().cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace mpd
