#pragma once

// The pseudodistance family between Gaussian models, its normalizing
// constant, and the empirical objective maximized by the estimators.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mpd/matrix_core.hpp"

namespace mpd {

/// Tuning parameter; zero selects the maximum-likelihood branch everywhere.
class Alpha {
 public:
  constexpr Alpha() = default;
  explicit Alpha(double value) : value_(value) {
    if (!std::isfinite(value) || value < 0.0) {
      raise(ErrorKind::InvalidArgument, "alpha must be finite and nonnegative");
    }
  }

  constexpr double value() const { return value_; }
  constexpr bool is_mle() const { return value_ == 0.0; }

 private:
  double value_ = 0.0;
};

/// Location and scatter of an N-variate normal model.
template <typename Scalar>
struct ModelParams {
  Vector<Scalar> mu;
  Matrix<Scalar> sigma;

  Eigen::Index dim() const { return mu.size(); }

  void check() const {
    if (mu.size() < 1 || sigma.rows() != mu.size() || sigma.cols() != mu.size()) {
      raise(ErrorKind::DimensionMismatch, "model parameters have inconsistent dimensions");
    }
  }
};

using Params = ModelParams<double>;

template <typename Scalar>
struct FixedPointResidual {
  Vector<Scalar> location;
  Matrix<Scalar> scatter;

  Scalar max_norm() const {
    return std::max(location.cwiseAbs().maxCoeff(), scatter.cwiseAbs().maxCoeff());
  }
};

namespace detail {

template <typename Scalar>
inline constexpr Scalar kLog2Pi = Scalar(1.837877066409345483560659472811235279722794947275566825634L);

template <typename Scalar>
Scalar log_sum_exp(const Vector<Scalar>& v) {
  const Scalar top = v.maxCoeff();
  return top + std::log((v.array() - top).exp().sum());
}

/// ln of the integral of p_a^alpha against the measure with density p_b,
/// alpha > 0. Written so that every term is O(alpha) and the alpha -> 0
/// behaviour survives in floating point.
template <typename Scalar>
Scalar log_power_integral(const ModelParams<Scalar>& a, const ModelParams<Scalar>& b, Scalar alpha) {
  const Eigen::Index n = a.dim();
  const Cholesky<Scalar> chol_a(a.sigma);
  const Matrix<Scalar> whitened = chol_a.whiten(
      chol_a.whiten(Matrix<Scalar>(b.sigma.template selfadjointView<Eigen::Lower>())).transpose());
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(whitened, Eigen::EigenvaluesOnly);
  Scalar log_det_term = 0;
  for (Eigen::Index k = 0; k < n; ++k) log_det_term += std::log1p(alpha * eig.eigenvalues()(k));

  const Matrix<Scalar> mixed = symmetrize_lower(a.sigma) + alpha * symmetrize_lower(b.sigma);
  const Vector<Scalar> diff = a.mu - b.mu;
  const Scalar quad = mahalanobis_sq(diff, Vector<Scalar>::Zero(n), Cholesky<Scalar>(mixed));

  return -Scalar(0.5) * alpha * Scalar(n) * kLog2Pi<Scalar> - Scalar(0.5) * alpha * chol_a.log_det() -
         Scalar(0.5) * log_det_term - Scalar(0.5) * alpha * quad;
}

/// Self-normalized weights exp(-(alpha/2) d_i) / sum_j exp(-(alpha/2) d_j).
template <typename Scalar>
Vector<Scalar> exp_weights(const Vector<Scalar>& dist_sq, Scalar alpha) {
  const Eigen::Index t = dist_sq.size();
  if (alpha == Scalar(0)) return Vector<Scalar>::Constant(t, Scalar(1) / Scalar(t));
  const Scalar d_min = dist_sq.minCoeff();
  Vector<Scalar> w = (-(alpha / Scalar(2)) * (dist_sq.array() - d_min)).exp().matrix();
  const Scalar total = w.sum();
  if (!(total > Scalar(0)) || !std::isfinite(total)) {
    raise(ErrorKind::DegenerateWeights, "observation weights underflowed");
  }
  return w / total;
}

}  // namespace detail

/// R_alpha(P, Q) between two normal models; alpha = 0 gives the modified
/// Kullback-Leibler divergence, the integral of ln(q/p) dQ.
template <typename Scalar>
Scalar r_alpha_normals(const ModelParams<Scalar>& p, const ModelParams<Scalar>& q, Alpha alpha) {
  p.check();
  q.check();
  if (p.dim() != q.dim()) {
    raise(ErrorKind::DimensionMismatch, "r_alpha_normals: models differ in dimension");
  }
  const Eigen::Index n = p.dim();
  if (p.mu == q.mu && symmetrize_lower(p.sigma) == symmetrize_lower(q.sigma)) {
    (void)Cholesky<Scalar>(p.sigma);
    return Scalar(0);
  }

  Scalar value;
  if (alpha.is_mle()) {
    const Cholesky<Scalar> chol_p(p.sigma);
    const Cholesky<Scalar> chol_q(q.sigma);
    const Matrix<Scalar> whitened = chol_p.whiten(Matrix<Scalar>(chol_q.matrix_l()));
    const Scalar trace = whitened.squaredNorm();
    const Scalar quad = mahalanobis_sq(q.mu, p.mu, chol_p);
    value = Scalar(0.5) * (trace + quad - Scalar(n) + chol_p.log_det() - chol_q.log_det());
  } else {
    const Scalar a = Scalar(alpha.value());
    const Scalar pp = detail::log_power_integral(p, p, a);
    const Scalar qq = detail::log_power_integral(q, q, a);
    const Scalar pq = detail::log_power_integral(p, q, a);
    value = pp / (a + 1) + qq / (a * (a + 1)) - pq / a;
  }
  // Nonnegative in exact arithmetic; only rounding can push it below zero.
  return std::max(value, Scalar(0));
}

/// C_alpha(theta) = (integral of p_theta^{alpha+1})^{alpha/(alpha+1)}, alpha > 0.
template <typename Scalar>
Scalar c_alpha(const ModelParams<Scalar>& theta, Alpha alpha) {
  theta.check();
  if (alpha.is_mle()) raise(ErrorKind::InvalidArgument, "c_alpha requires alpha > 0");
  const Scalar a = Scalar(alpha.value());
  const Scalar n = Scalar(theta.dim());
  const Scalar log_det_inv = -Cholesky<Scalar>(theta.sigma).log_det();
  const Scalar log_c = -(n * a * a / (2 * (a + 1))) * detail::kLog2Pi<Scalar> +
                       (a * a / (2 * (a + 1))) * log_det_inv -
                       (n * a / (2 * (a + 1))) * std::log1p(a);
  return std::exp(log_c);
}

/// The empirical criterion maximized over theta. For alpha > 0 this is
/// (det sigma^{-1})^{alpha/(2(alpha+1))} * sum_i exp(-(alpha/2) d_i);
/// for alpha = 0 it is the mean Gaussian log-density.
template <typename Scalar, typename Derived>
Scalar objective(const Eigen::MatrixBase<Derived>& sample, const ModelParams<Scalar>& theta, Alpha alpha) {
  theta.check();
  if (sample.rows() < 1) raise(ErrorKind::InvalidArgument, "objective needs at least one observation");
  const Cholesky<Scalar> chol(theta.sigma);
  const Vector<Scalar> d = mahalanobis_sq_rows(sample, theta.mu, chol);
  if (alpha.is_mle()) {
    const Scalar n = Scalar(theta.dim());
    return -Scalar(0.5) * n * detail::kLog2Pi<Scalar> - Scalar(0.5) * chol.log_det() -
           Scalar(0.5) * d.mean();
  }
  const Scalar a = Scalar(alpha.value());
  const Vector<Scalar> exponents = -(a / 2) * d;
  return std::exp(-(a / (2 * (a + 1))) * chol.log_det() + detail::log_sum_exp(exponents));
}

/// Right-hand sides of the location and scatter estimating equations minus
/// the current parameters. Both parts vanish at a minimum pseudodistance
/// estimate.
template <typename Scalar, typename Derived>
FixedPointResidual<Scalar> fixed_point_residual(const Eigen::MatrixBase<Derived>& sample,
                                                const ModelParams<Scalar>& theta, Alpha alpha) {
  theta.check();
  if (sample.rows() < 2) raise(ErrorKind::InvalidArgument, "fixed_point_residual needs T >= 2");
  if (sample.cols() != theta.dim()) raise(ErrorKind::DimensionMismatch, "sample and parameters differ in dimension");
  const Scalar a = Scalar(alpha.value());
  const Cholesky<Scalar> chol(theta.sigma);
  const Vector<Scalar> d = mahalanobis_sq_rows(sample, theta.mu, chol);
  if (!alpha.is_mle()) {
    const Vector<Scalar> exponents = -(a / 2) * d;
    if (detail::log_sum_exp(exponents) < std::log(Scalar(1e-300))) {
      raise(ErrorKind::DegenerateWeights, "sum of exponential weights below 1e-300");
    }
  }
  const Vector<Scalar> w = detail::exp_weights(d, a);
  const Matrix<Scalar> centered = sample.rowwise() - theta.mu.transpose();

  FixedPointResidual<Scalar> r;
  r.location = sample.transpose() * w - theta.mu;
  Matrix<Scalar> scatter = Matrix<Scalar>::Zero(theta.dim(), theta.dim());
  scatter.template selfadjointView<Eigen::Lower>().rankUpdate(
      (centered.array().colwise() * w.array().sqrt()).matrix().transpose(), a + 1);
  r.scatter = symmetrize_lower(scatter) - symmetrize_lower(theta.sigma);
  return r;
}

}  // namespace mpd
