#pragma once

// Influence functions of the location, scatter and optimal-weight
// functionals at a normal model, and the data influence measure (DIM).

#include <cmath>

#include "mpd/portfolio.hpp"

namespace mpd {

template <typename Scalar>
struct InfluenceContext {
  ModelParams<Scalar> params;
  Alpha alpha;
  /// Risk aversion; only used by if_weights.
  Scalar lambda = 1;
};

namespace detail {

template <typename Scalar>
Scalar sqrt_alpha1_pow(Scalar alpha, Eigen::Index power) {
  return std::pow(std::sqrt(alpha + 1), Scalar(power));
}

}  // namespace detail

/// (sqrt(alpha+1))^{N+2} (x - mu) exp(-(alpha/2) d(x)).
template <typename Scalar, typename Derived>
Vector<Scalar> if_location(const Eigen::MatrixBase<Derived>& x, const InfluenceContext<Scalar>& ctx) {
  ctx.params.check();
  const Eigen::Index n = ctx.params.dim();
  const Scalar a = Scalar(ctx.alpha.value());
  const Scalar d = mahalanobis_sq(x, ctx.params.mu, ctx.params.sigma);
  return detail::sqrt_alpha1_pow(a, n + 2) * std::exp(-a / 2 * d) * (x - ctx.params.mu);
}

/// (sqrt(alpha+1))^{N+4} [(x - mu)(x - mu)^t - sigma/(alpha+1)] exp(-(alpha/2) d(x)).
template <typename Scalar, typename Derived>
Matrix<Scalar> if_covariance(const Eigen::MatrixBase<Derived>& x, const InfluenceContext<Scalar>& ctx) {
  ctx.params.check();
  const Eigen::Index n = ctx.params.dim();
  const Scalar a = Scalar(ctx.alpha.value());
  const Scalar d = mahalanobis_sq(x, ctx.params.mu, ctx.params.sigma);
  const Vector<Scalar> diff = x - ctx.params.mu;
  return detail::sqrt_alpha1_pow(a, n + 4) * std::exp(-a / 2 * d) *
         (diff * diff.transpose() - symmetrize_lower(ctx.params.sigma) / (a + 1));
}

/// Influence of the plug-in optimal weights given the influence of the
/// location (`if_mu`) and scatter (`if_sigma`) estimators. Linear in the
/// pair; derived from p*(mu, sigma) using IF(sigma^{-1}) = -sigma^{-1} IF(sigma) sigma^{-1}.
template <typename Scalar>
Vector<Scalar> assemble_weight_influence(const Vector<Scalar>& if_mu, const Matrix<Scalar>& if_sigma,
                                         const ModelParams<Scalar>& params, Scalar lambda) {
  params.check();
  detail::check_lambda(lambda);
  const Eigen::Index n = params.dim();
  if (if_mu.size() != n || if_sigma.rows() != n || if_sigma.cols() != n) {
    raise(ErrorKind::DimensionMismatch, "influence components differ in dimension");
  }
  const Cholesky<Scalar> chol(params.sigma);
  const Vector<Scalar> ones = Vector<Scalar>::Ones(n);
  const Vector<Scalar> inv_e = chol.solve(ones);
  const Vector<Scalar> inv_mu = chol.solve(params.mu);
  const Scalar e_inv_e = inv_e.sum();
  const Scalar e_inv_mu = inv_mu.sum();
  const Vector<Scalar> p_star = (inv_mu - (e_inv_mu - lambda) / e_inv_e * inv_e) / lambda;

  const Scalar budget_shift = inv_e.dot(if_sigma * inv_mu - if_mu) / e_inv_e;
  const Scalar curvature_shift = inv_e.dot(if_sigma * inv_e) * (e_inv_mu - lambda) / (e_inv_e * e_inv_e);
  const Vector<Scalar> bracket = if_mu + (budget_shift - curvature_shift) * ones;
  return -chol.solve(if_sigma * p_star) + chol.solve(bracket) / lambda;
}

/// Influence function of the optimal portfolio weights at x.
template <typename Scalar, typename Derived>
Vector<Scalar> if_weights(const Eigen::MatrixBase<Derived>& x, const InfluenceContext<Scalar>& ctx) {
  if (ctx.params.dim() < 2) raise(ErrorKind::InvalidArgument, "if_weights needs at least two assets");
  return assemble_weight_influence<Scalar>(if_location(x, ctx), if_covariance(x, ctx), ctx.params, ctx.lambda);
}

/// Euclidean norm of the weight influence function, using the given alpha
/// for the component influence functions.
template <typename Scalar, typename Derived>
Scalar dim_measure(const Eigen::MatrixBase<Derived>& x, const ModelParams<Scalar>& params, Scalar lambda,
                   Alpha alpha) {
  return if_weights(x, InfluenceContext<Scalar>{params, alpha, lambda}).norm();
}

/// DIM of x: the classical (alpha = 0) weight influence evaluated at
/// robustly estimated parameters.
template <typename Scalar, typename Derived>
Scalar dim_measure(const Eigen::MatrixBase<Derived>& x, const ModelParams<Scalar>& robust_params, Scalar lambda) {
  return dim_measure(x, robust_params, lambda, Alpha{});
}

/// DIM of every row of `sample`.
template <typename Scalar, typename Derived>
Vector<Scalar> dim_series(const Eigen::MatrixBase<Derived>& sample, const ModelParams<Scalar>& robust_params,
                          Scalar lambda, Alpha alpha = Alpha{}) {
  Vector<Scalar> out(sample.rows());
  for (Eigen::Index i = 0; i < sample.rows(); ++i) {
    out(i) = dim_measure(Vector<Scalar>(sample.row(i).transpose()), robust_params, lambda, alpha);
  }
  return out;
}

}  // namespace mpd
