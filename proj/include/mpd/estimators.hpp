#pragma once

// Maximum-likelihood and minimum pseudodistance estimation of (mu, sigma)
// under the multivariate normal model. The robust estimate is computed by
// the exponential reweighting iteration started from the MLE.

#include <algorithm>
#include <cmath>
#include <optional>

#include "mpd/pseudodistance.hpp"

namespace mpd {

template <typename Scalar>
struct EstimatorConfig {
  Alpha alpha;
  Scalar tol = Scalar(1e-8);
  int max_iter = 500;
  /// Starting point of the iteration; the MLE when empty.
  std::optional<ModelParams<Scalar>> init;

  void check() const {
    if (!(tol > Scalar(0))) raise(ErrorKind::InvalidArgument, "tol must be positive");
    if (max_iter < 1) raise(ErrorKind::InvalidArgument, "max_iter must be at least 1");
  }
};

template <typename Scalar>
struct Estimate {
  Vector<Scalar> mu;
  Matrix<Scalar> sigma;
  /// One weight per observation, summing to one.
  Vector<Scalar> weights;
  int iterations = 0;
  bool converged = false;
  Scalar objective_value = 0;

  ModelParams<Scalar> params() const { return {mu, sigma}; }
};

namespace detail {

template <typename Scalar>
void check_sample(const Eigen::Ref<const Matrix<Scalar>>& sample) {
  if (sample.cols() < 1) raise(ErrorKind::DimensionMismatch, "sample has no columns");
  if (!sample.allFinite()) raise(ErrorKind::NonFiniteValue, "sample contains non-finite values");
}

/// Weighted scatter factor * sum_i w_i (x_i - center)(x_i - center)^t, full
/// symmetric storage.
template <typename Scalar>
Matrix<Scalar> weighted_scatter(const Eigen::Ref<const Matrix<Scalar>>& sample, const Vector<Scalar>& w,
                                const Vector<Scalar>& center, Scalar factor) {
  const Matrix<Scalar> scaled =
      ((sample.rowwise() - center.transpose()).array().colwise() * w.array().sqrt()).matrix();
  Matrix<Scalar> scatter = Matrix<Scalar>::Zero(sample.cols(), sample.cols());
  scatter.template selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose(), factor);
  return symmetrize_lower(scatter);
}

}  // namespace detail

/// Sample mean and the 1/T scatter matrix.
template <typename Derived>
Estimate<typename Derived::Scalar> mle(const Eigen::MatrixBase<Derived>& sample) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> x = sample;
  detail::check_sample<Scalar>(x);
  const Eigen::Index t = x.rows();
  if (t < 2) raise(ErrorKind::SingularScatter, "at least two observations are needed");

  Estimate<Scalar> est;
  est.weights = Vector<Scalar>::Constant(t, Scalar(1) / Scalar(t));
  est.mu = x.colwise().mean().transpose();
  est.sigma = detail::weighted_scatter<Scalar>(x, est.weights, est.mu, Scalar(1));
  try {
    Cholesky<Scalar> check(est.sigma);
  } catch (const Error&) {
    raise(ErrorKind::SingularScatter, "sample scatter matrix is not positive definite");
  }
  est.converged = true;
  est.iterations = 0;
  est.objective_value = objective(x, est.params(), Alpha{});
  return est;
}

/// w_i proportional to exp(-(alpha/2) d_i) with d_i the squared Mahalanobis
/// distance of observation i under theta.
template <typename Scalar, typename Derived>
Vector<Scalar> observation_weights(const Eigen::MatrixBase<Derived>& sample, const ModelParams<Scalar>& theta,
                                   Alpha alpha) {
  theta.check();
  const Cholesky<Scalar> chol(theta.sigma);
  return detail::exp_weights<Scalar>(mahalanobis_sq_rows(sample, theta.mu, chol), Scalar(alpha.value()));
}

/// One pass of the reweighting iteration. Weights come from the input theta;
/// the updated location is used as the center of the updated scatter.
template <typename Scalar, typename Derived>
ModelParams<Scalar> reweight_step(const Eigen::MatrixBase<Derived>& sample, const ModelParams<Scalar>& theta,
                                  Alpha alpha) {
  const Matrix<Scalar> x = sample;
  const Vector<Scalar> w = observation_weights(x, theta, alpha);
  ModelParams<Scalar> next;
  next.mu = x.transpose() * w;
  next.sigma = detail::weighted_scatter<Scalar>(x, w, next.mu, Scalar(alpha.value()) + 1);

  try {
    Cholesky<Scalar> check(next.sigma);
  } catch (const Error&) {
    const Eigen::Index n = next.sigma.rows();
    const Scalar jitter = Scalar(1e-12) * next.sigma.trace() / Scalar(n);
    next.sigma.diagonal().array() += jitter;
    try {
      Cholesky<Scalar> retry(next.sigma);
    } catch (const Error&) {
      raise(ErrorKind::SingularScatter, "reweighted scatter matrix lost positive definiteness");
    }
  }
  return next;
}

namespace detail {

template <typename Scalar>
Scalar relative_change(const ModelParams<Scalar>& prev, const ModelParams<Scalar>& next) {
  const auto scaled = [](const Vector<Scalar>& a, const Vector<Scalar>& b) {
    return ((b - a).array().abs() / (b.array().abs() + Scalar(1))).maxCoeff();
  };
  return std::max(scaled(prev.mu, next.mu), scaled(vech(prev.sigma), vech(next.sigma)));
}

}  // namespace detail

/// Minimum pseudodistance estimate. Iterates reweight_step until the
/// largest scaled parameter change and the fixed-point residual both drop
/// below config.tol, or config.max_iter passes have run. Running out of
/// iterations is reported through `converged`, not thrown.
template <typename Derived>
Estimate<typename Derived::Scalar> mpd_estimate(const Eigen::MatrixBase<Derived>& sample,
                                                const EstimatorConfig<typename Derived::Scalar>& config) {
  using Scalar = typename Derived::Scalar;
  config.check();
  const Matrix<Scalar> x = sample;
  if (config.alpha.is_mle()) return mle(x);
  detail::check_sample<Scalar>(x);
  if (x.rows() < 2) raise(ErrorKind::SingularScatter, "at least two observations are needed");

  ModelParams<Scalar> theta;
  if (config.init) {
    theta = *config.init;
    theta.check();
    if (theta.dim() != x.cols()) raise(ErrorKind::DimensionMismatch, "initial parameters differ in dimension");
    theta.sigma = symmetrize_lower(theta.sigma);
  } else {
    theta = mle(x).params();
  }

  Estimate<Scalar> est;
  for (int s = 1; s <= config.max_iter; ++s) {
    ModelParams<Scalar> next = reweight_step(x, theta, config.alpha);
    const Scalar change = detail::relative_change(theta, next);
    theta = std::move(next);
    est.iterations = s;
    if (change < config.tol &&
        fixed_point_residual(x, theta, config.alpha).max_norm() < config.tol) {
      est.converged = true;
      break;
    }
  }
  est.mu = theta.mu;
  est.sigma = theta.sigma;
  est.weights = observation_weights(x, theta, config.alpha);
  est.objective_value = objective(x, theta, config.alpha);
  return est;
}

}  // namespace mpd
