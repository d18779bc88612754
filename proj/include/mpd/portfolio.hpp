#pragma once

// Markowitz mean-variance optimization: maximize p^t mu - (lambda/2) p^t sigma p
// subject to p^t e = 1, optionally with p >= 0.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mpd/pseudodistance.hpp"

namespace mpd {

template <typename Scalar>
struct PortfolioProblem {
  ModelParams<Scalar> params;
  Scalar lambda = 1;
  bool allow_short = true;
};

template <typename Scalar>
struct FrontierPoint {
  Scalar lambda = 0;
  Vector<Scalar> weights;
  Scalar expected_return = 0;
  Scalar variance = 0;
};

template <typename Scalar>
struct PortfolioStats {
  Scalar expected_return;
  Scalar variance;
};

namespace detail {

template <typename Scalar>
void check_lambda(Scalar lambda) {
  if (!(lambda > Scalar(0)) || !std::isfinite(lambda)) {
    raise(ErrorKind::InvalidArgument, "risk aversion lambda must be positive and finite");
  }
}

/// Closed-form optimum restricted to the given asset subset; also returns
/// the budget multiplier eta.
template <typename Scalar>
Vector<Scalar> closed_form_weights(const Vector<Scalar>& mu, const Matrix<Scalar>& sigma, Scalar lambda,
                                   Scalar* eta_out = nullptr) {
  const Cholesky<Scalar> chol(sigma);
  const Eigen::Index n = mu.size();
  const Vector<Scalar> inv_mu = chol.solve(mu);
  const Vector<Scalar> inv_e = chol.solve(Vector<Scalar>::Ones(n));
  const Scalar eta = (inv_mu.sum() - lambda) / inv_e.sum();
  if (eta_out) *eta_out = eta;
  return (inv_mu - eta * inv_e) / lambda;
}

}  // namespace detail

/// p* = (1/lambda) sigma^{-1} (mu - eta e), eta = (e^t sigma^{-1} mu - lambda) / (e^t sigma^{-1} e).
template <typename Scalar>
Vector<Scalar> optimal_weights(const ModelParams<Scalar>& params, Scalar lambda) {
  params.check();
  detail::check_lambda(lambda);
  return detail::closed_form_weights<Scalar>(params.mu, symmetrize_lower(params.sigma), lambda);
}

/// Long-only optimum by active-set iteration on the closed form: clamp the
/// most negative weight to zero, re-solve on the remaining assets, and
/// release a clamped asset whose reduced gradient exceeds the multiplier.
template <typename Scalar>
Vector<Scalar> optimal_weights_no_short(const ModelParams<Scalar>& params, Scalar lambda) {
  params.check();
  detail::check_lambda(lambda);
  const Eigen::Index n = params.dim();
  const Matrix<Scalar> sigma = symmetrize_lower(params.sigma);
  (void)Cholesky<Scalar>(sigma);
  const Scalar kkt_tol = Scalar(1e-9);

  std::vector<bool> is_free(static_cast<std::size_t>(n), true);
  Vector<Scalar> p = Vector<Scalar>::Zero(n);
  const int max_passes = 4 * static_cast<int>(n) + 8;
  for (int pass = 0; pass < max_passes; ++pass) {
    std::vector<Eigen::Index> free_idx;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (is_free[static_cast<std::size_t>(i)]) free_idx.push_back(i);
    }
    const auto k = static_cast<Eigen::Index>(free_idx.size());
    Vector<Scalar> mu_f(k);
    Matrix<Scalar> sigma_f(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
      mu_f(a) = params.mu(free_idx[a]);
      for (Eigen::Index b = 0; b < k; ++b) sigma_f(a, b) = sigma(free_idx[a], free_idx[b]);
    }
    Scalar eta = 0;
    const Vector<Scalar> p_f = detail::closed_form_weights<Scalar>(mu_f, sigma_f, lambda, &eta);

    Eigen::Index most_negative = -1;
    for (Eigen::Index a = 0; a < k; ++a) {
      if (p_f(a) < Scalar(0) && (most_negative < 0 || p_f(a) < p_f(most_negative))) most_negative = a;
    }
    if (most_negative >= 0) {
      is_free[static_cast<std::size_t>(free_idx[most_negative])] = false;
      continue;
    }

    p.setZero();
    for (Eigen::Index a = 0; a < k; ++a) p(free_idx[a]) = p_f(a);

    // eta is the budget multiplier: free assets satisfy mu_i - lambda (sigma p)_i = eta.
    const Vector<Scalar> gradient = params.mu - lambda * (sigma * p);
    Eigen::Index worst = -1;
    Scalar worst_excess = kkt_tol;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (is_free[static_cast<std::size_t>(i)]) continue;
      const Scalar excess = gradient(i) - eta;
      if (excess > worst_excess) {
        worst_excess = excess;
        worst = i;
      }
    }
    if (worst < 0) return p;
    is_free[static_cast<std::size_t>(worst)] = true;
  }
  raise(ErrorKind::InfeasibleKKT, "active-set iteration did not reach a KKT point");
}

template <typename Scalar>
Vector<Scalar> optimal_weights(const PortfolioProblem<Scalar>& problem) {
  return problem.allow_short ? optimal_weights(problem.params, problem.lambda)
                             : optimal_weights_no_short(problem.params, problem.lambda);
}

/// (p^t mu, p^t sigma p).
template <typename Scalar, typename Derived>
PortfolioStats<Scalar> portfolio_stats(const Eigen::MatrixBase<Derived>& weights, const ModelParams<Scalar>& params) {
  params.check();
  if (weights.size() != params.dim()) raise(ErrorKind::DimensionMismatch, "weights and parameters differ in dimension");
  const Vector<Scalar> p = weights;
  return {p.dot(params.mu), p.dot(symmetrize_lower(params.sigma) * p)};
}

template <typename Scalar>
FrontierPoint<Scalar> frontier_point(const ModelParams<Scalar>& params, Scalar lambda, bool allow_short) {
  FrontierPoint<Scalar> pt;
  pt.lambda = lambda;
  pt.weights = optimal_weights(PortfolioProblem<Scalar>{params, lambda, allow_short});
  const auto stats = portfolio_stats(pt.weights, params);
  pt.expected_return = stats.expected_return;
  pt.variance = stats.variance;
  return pt;
}

/// One optimal portfolio per risk aversion, sorted by lambda ascending.
template <typename Scalar>
std::vector<FrontierPoint<Scalar>> efficient_frontier(const ModelParams<Scalar>& params,
                                                      std::vector<Scalar> lambda_grid, bool allow_short) {
  if (lambda_grid.empty()) raise(ErrorKind::InvalidArgument, "lambda grid is empty");
  for (Scalar l : lambda_grid) detail::check_lambda(l);
  std::sort(lambda_grid.begin(), lambda_grid.end());
  std::vector<FrontierPoint<Scalar>> out;
  out.reserve(lambda_grid.size());
  for (Scalar l : lambda_grid) out.push_back(frontier_point(params, l, allow_short));
  return out;
}

/// `points` log-spaced values from lo to hi inclusive.
template <typename Scalar>
std::vector<Scalar> log_spaced(Scalar lo, Scalar hi, int points) {
  if (points < 1 || !(lo > 0) || !(hi >= lo)) raise(ErrorKind::InvalidArgument, "invalid log-spaced grid");
  std::vector<Scalar> out(static_cast<std::size_t>(points));
  if (points == 1) {
    out[0] = lo;
    return out;
  }
  const Scalar step = std::log(hi / lo) / Scalar(points - 1);
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(step * Scalar(i));
  out.back() = hi;
  return out;
}

/// Variance of the minimum-variance portfolio, with or without short sales.
template <typename Scalar>
Scalar minimum_variance(const ModelParams<Scalar>& params, bool allow_short) {
  const ModelParams<Scalar> flat{Vector<Scalar>::Zero(params.dim()), params.sigma};
  const Vector<Scalar> p = optimal_weights(PortfolioProblem<Scalar>{flat, Scalar(1), allow_short});
  return portfolio_stats(p, params).variance;
}

/// Frontier portfolio whose variance matches `target_variance` to 1e-6
/// relative, found by bisection on log(lambda) over [1e-4, 1e6].
template <typename Scalar>
FrontierPoint<Scalar> portfolio_for_variance(const ModelParams<Scalar>& params, Scalar target_variance,
                                             bool allow_short) {
  params.check();
  if (!(target_variance > Scalar(0))) raise(ErrorKind::InvalidArgument, "target variance must be positive");
  const Scalar min_var = minimum_variance(params, allow_short);
  if (!(target_variance > min_var)) {
    raise(ErrorKind::TargetBelowMinimumVariance,
          "target " + std::to_string(double(target_variance)) + " not above minimum variance " +
              std::to_string(double(min_var)));
  }
  const Scalar rel_tol = Scalar(1e-6);
  Scalar lo = std::log(Scalar(1e-4));
  Scalar hi = std::log(Scalar(1e6));
  FrontierPoint<Scalar> at_lo = frontier_point(params, std::exp(lo), allow_short);
  FrontierPoint<Scalar> at_hi = frontier_point(params, std::exp(hi), allow_short);
  if (at_lo.variance < target_variance * (1 - rel_tol) || at_hi.variance > target_variance * (1 + rel_tol)) {
    raise(ErrorKind::BisectionRangeExhausted, "target variance outside the frontier for lambda in [1e-4, 1e6]");
  }
  if (std::abs(at_lo.variance - target_variance) <= rel_tol * target_variance) return at_lo;
  if (std::abs(at_hi.variance - target_variance) <= rel_tol * target_variance) return at_hi;
  for (int iter = 0; iter < 400; ++iter) {
    const Scalar mid = Scalar(0.5) * (lo + hi);
    FrontierPoint<Scalar> pt = frontier_point(params, std::exp(mid), allow_short);
    if (std::abs(pt.variance - target_variance) <= rel_tol * target_variance) return pt;
    // Variance is nonincreasing in lambda.
    if (pt.variance > target_variance) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  raise(ErrorKind::BisectionRangeExhausted, "bisection did not reach the variance tolerance");
}

}  // namespace mpd
