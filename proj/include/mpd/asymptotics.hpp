#pragma once

// Asymptotic covariances of the minimum pseudodistance estimators at the
// normal model, their efficiency relative to the MLE, and the delta-method
// covariance of the plug-in optimal weights.

#include <cmath>

#include "mpd/portfolio.hpp"

namespace mpd {

template <typename Scalar>
struct WeightFunctions {
  Scalar w_mu;
  Scalar w_eta;
  Scalar w_delta;
  Scalar w_tau;
};

template <typename Scalar>
struct AsymptoticReport {
  Matrix<Scalar> v_mu;
  /// On vecs coordinates.
  Matrix<Scalar> v_sigma;
  Scalar are;
  Scalar d_mu;
  Scalar d_eta;
  Scalar d_tau;
};

namespace detail {

inline void check_dimension(Eigen::Index n) {
  if (n < 1) raise(ErrorKind::InvalidArgument, "dimension must be at least 1");
}

/// (alpha+1) / sqrt(2 alpha + 1), the ratio every coefficient is built on.
inline double efficiency_ratio(Alpha alpha) {
  const double a = alpha.value();
  return (a + 1) / std::sqrt(2 * a + 1);
}

}  // namespace detail

/// Weight functions of the M-estimator form of the estimators, at radius t.
template <typename Scalar = double>
WeightFunctions<Scalar> weight_funcs(Scalar t, Alpha alpha, Eigen::Index n) {
  detail::check_dimension(n);
  if (!(t >= Scalar(0))) raise(ErrorKind::InvalidArgument, "radius must be nonnegative");
  const Scalar a = Scalar(alpha.value());
  const Scalar root = std::sqrt(a + 1);
  const Scalar decay = std::exp(-a / 2 * t * t);
  WeightFunctions<Scalar> w;
  w.w_mu = std::pow(root, Scalar(n + 2)) * decay;
  w.w_eta = std::pow(root, Scalar(n + 4)) * decay;
  w.w_delta = w.w_mu;
  w.w_tau = w.w_eta * (t * t - Scalar(n) / (a + 1));
  return w;
}

inline double d_mu(Alpha alpha, Eigen::Index n) {
  return std::pow(detail::efficiency_ratio(alpha), double(n + 2));
}

inline double d_eta(Alpha alpha, Eigen::Index n) {
  return std::pow(detail::efficiency_ratio(alpha), double(n + 4));
}

inline double d_tau(Alpha alpha, Eigen::Index n) {
  const double a = alpha.value();
  return double(n) * a * a * std::pow(a + 1, double(n + 2)) / (2 * std::pow(std::sqrt(2 * a + 1), double(n + 4))) +
         d_eta(alpha, n);
}

/// d_mu * sigma.
template <typename Derived>
Matrix<typename Derived::Scalar> v_location(Alpha alpha, Eigen::Index n, const Eigen::MatrixBase<Derived>& sigma) {
  using Scalar = typename Derived::Scalar;
  detail::check_dimension(n);
  if (sigma.rows() != n || sigma.cols() != n) raise(ErrorKind::DimensionMismatch, "sigma does not match dimension");
  return Scalar(d_mu(alpha, n)) * symmetrize_lower(sigma);
}

/// Asymptotic covariance of vecs(sigma-hat) at the standard normal model.
template <typename Scalar = double>
Matrix<Scalar> v_covariance_standard(Alpha alpha, Eigen::Index n) {
  detail::check_dimension(n);
  const Scalar a = Scalar(alpha.value());
  const Eigen::Index d = vecs_size(n);
  const Scalar diag_coef = Scalar(d_eta(alpha, n));
  const Scalar rank_one_coef =
      a * a * std::pow(a + 1, Scalar(n + 2)) / (2 * std::pow(std::sqrt(2 * a + 1), Scalar(n + 4)));
  Vector<Scalar> w = Vector<Scalar>::Zero(d);
  w.head(n).setOnes();
  return diag_coef * Matrix<Scalar>::Identity(d, d) + rank_one_coef * w * w.transpose();
}

/// Matrix of the linear map vecs(S) -> vecs(R S R) with R the symmetric
/// square root of sigma, built column by column on the vecs basis.
template <typename Derived>
Matrix<typename Derived::Scalar> vecs_transport(const Eigen::MatrixBase<Derived>& sigma) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = sigma.rows();
  const Matrix<Scalar> root = symmetric_sqrt(sigma);
  const Eigen::Index d = vecs_size(n);
  Matrix<Scalar> k(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const Matrix<Scalar> basis = unvecs(Vector<Scalar>(Vector<Scalar>::Unit(d, j)), n);
    k.col(j) = vecs(root * basis * root);
  }
  return k;
}

/// Asymptotic covariance of vecs(sigma-hat) at N(mu, sigma):
/// d_eta K K^t + (alpha^2 (alpha+1)^{N+2} / sqrt(2 alpha + 1)^{N+4}) vecs(sigma) vecs(sigma)^t,
/// which equals K V0 K^t for the standard-model covariance V0.
template <typename Derived>
Matrix<typename Derived::Scalar> v_covariance(Alpha alpha, Eigen::Index n, const Eigen::MatrixBase<Derived>& sigma) {
  using Scalar = typename Derived::Scalar;
  detail::check_dimension(n);
  if (sigma.rows() != n || sigma.cols() != n) raise(ErrorKind::DimensionMismatch, "sigma does not match dimension");
  (void)Cholesky<Scalar>(sigma);
  const Scalar a = Scalar(alpha.value());
  const Matrix<Scalar> full = symmetrize_lower(sigma);
  const Matrix<Scalar> k = vecs_transport(full);
  const Vector<Scalar> vs = vecs(full);
  const Scalar rank_one_coef = a * a * std::pow(a + 1, Scalar(n + 2)) / std::pow(std::sqrt(2 * a + 1), Scalar(n + 4));
  const Matrix<Scalar> v = Scalar(d_eta(alpha, n)) * k * k.transpose() + rank_one_coef * vs * vs.transpose();
  return Scalar(0.5) * (v + v.transpose());
}

/// Asymptotic relative efficiency of (mu-hat, vecs(sigma-hat)) with respect
/// to the MLE; depends only on alpha and N.
inline double are(Alpha alpha, Eigen::Index n) {
  detail::check_dimension(n);
  const double a = alpha.value();
  const double nn = double(n);
  const double log_ratio = std::log(detail::efficiency_ratio(alpha));
  const double first = (nn * nn + 7 * nn + 8) / (nn + 3) * log_ratio;
  const double second = 2 / (nn * (nn + 3)) * std::log1p(nn * a * a / (2 * (a + 1) * (a + 1)));
  return std::exp(-(first + second));
}

template <typename Scalar>
AsymptoticReport<Scalar> asymptotic_report(Alpha alpha, const Matrix<Scalar>& sigma) {
  const Eigen::Index n = sigma.rows();
  return {v_location(alpha, n, sigma), v_covariance(alpha, n, sigma), Scalar(are(alpha, n)),
          Scalar(d_mu(alpha, n)),      Scalar(d_eta(alpha, n)),        Scalar(d_tau(alpha, n))};
}

/// Jacobian of theta = (mu, vecs sigma) -> optimal weights, by central
/// differences with step 1e-6 (1 + |theta_k|).
template <typename Scalar>
Matrix<Scalar> weights_jacobian(const ModelParams<Scalar>& params, Scalar lambda) {
  params.check();
  const Eigen::Index n = params.dim();
  const Eigen::Index d = n + vecs_size(n);
  Vector<Scalar> theta(d);
  theta.head(n) = params.mu;
  theta.tail(vecs_size(n)) = vecs(symmetrize_lower(params.sigma));
  const auto h_of = [&](const Vector<Scalar>& th) {
    const ModelParams<Scalar> p{th.head(n), unvecs(Vector<Scalar>(th.tail(vecs_size(n))), n)};
    return optimal_weights(p, lambda);
  };
  Matrix<Scalar> jac(n, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Scalar step = Scalar(1e-6) * (1 + std::abs(theta(k)));
    Vector<Scalar> up = theta;
    Vector<Scalar> down = theta;
    up(k) += step;
    down(k) -= step;
    jac.col(k) = (h_of(up) - h_of(down)) / (2 * step);
  }
  return jac;
}

/// Delta-method asymptotic covariance of the plug-in optimal weights.
template <typename Scalar>
Matrix<Scalar> v_weights(const ModelParams<Scalar>& params, Scalar lambda, Alpha alpha) {
  params.check();
  detail::check_lambda(lambda);
  const Eigen::Index n = params.dim();
  if (n < 2) raise(ErrorKind::InvalidArgument, "v_weights needs at least two assets");
  const Eigen::Index ds = vecs_size(n);
  Matrix<Scalar> v_theta = Matrix<Scalar>::Zero(n + ds, n + ds);
  v_theta.topLeftCorner(n, n) = v_location(alpha, n, params.sigma);
  v_theta.bottomRightCorner(ds, ds) = v_covariance(alpha, n, params.sigma);
  const Matrix<Scalar> jac = weights_jacobian(params, lambda);
  const Matrix<Scalar> v = jac * v_theta * jac.transpose();
  return Scalar(0.5) * (v + v.transpose());
}

}  // namespace mpd
