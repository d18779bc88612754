#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "mpd/portfolio.hpp"
#include "oracles.hpp"

using namespace mpd;

namespace {

double utility(const VectorXd& p, const Params& th, double lambda) {
  return p.dot(th.mu) - 0.5 * lambda * p.dot(th.sigma * p);
}

Params two_asset(double m1, double m2) {
  VectorXd mu(2);
  mu << m1, m2;
  return {mu, MatrixXd::Identity(2, 2)};
}

void expect_kind(ErrorKind kind, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "no exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace

TEST(OptimalWeights, Examples) {
  EXPECT_LT((optimal_weights(two_asset(0.1, 0.1), 3.0) - VectorXd::Constant(2, 0.5)).norm(), 1e-15);
  const VectorXd p = optimal_weights(two_asset(0.2, 0.1), 1.0);
  EXPECT_NEAR(p(0), 0.55, 1e-15);
  EXPECT_NEAR(p(1), 0.45, 1e-15);
}

TEST(OptimalWeights, MatchesExplicitInverse) {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 2 + rep % 6;
    const Params th{oracle::random_vector(rng, n, 0.1), oracle::random_pd(rng, n) * 0.01};
    const double lambda = 0.5 + rep;
    const VectorXd p = optimal_weights(th, lambda);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_LT((p - oracle::markowitz_weights(th.mu, th.sigma, lambda)).norm(), 1e-9 * (1 + p.norm()));
  }
}

TEST(OptimalWeights, BeatsPerturbationsOnBudgetPlane) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = rep % 2 ? 5 : 2;
    const Params th{oracle::random_vector(rng, n, 0.1), oracle::random_pd(rng, n) * 0.02};
    const double lambda = std::exp(normal(rng));
    const VectorXd p = optimal_weights(th, lambda);
    const double best = utility(p, th, lambda);
    for (int k = 0; k < 40; ++k) {
      VectorXd d = oracle::random_vector(rng, n);
      d.array() -= d.mean();
      d *= 1e-3 / d.norm();
      EXPECT_LE(utility(p + d, th, lambda), best);
    }
  }
}

TEST(NoShort, MatchesClosedFormWhenInterior) {
  const VectorXd p = optimal_weights_no_short(two_asset(0.2, 0.1), 1.0);
  EXPECT_NEAR(p(0), 0.55, 1e-14);
}

TEST(NoShort, CornerSolution) {
  // Unconstrained weights (1.5, -0.5) at lambda = 0.1.
  const VectorXd p = optimal_weights_no_short(two_asset(0.2, 0.1), 0.1);
  EXPECT_NEAR(p(0), 1.0, 1e-14);
  EXPECT_NEAR(p(1), 0.0, 1e-14);
}

TEST(NoShort, KktConditions) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = rep % 2 ? 5 : 2;
    const Params th{oracle::random_vector(rng, n, 0.2), oracle::random_pd(rng, n) * 0.02};
    const double lambda = 0.05 + 0.2 * rep;
    const VectorXd p = optimal_weights_no_short(th, lambda);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_GE(p.minCoeff(), 0.0);
    const VectorXd g = th.mu - lambda * th.sigma * p;
    // The multiplier is the gradient on any strictly positive weight.
    Eigen::Index k;
    p.maxCoeff(&k);
    const double eta = g(k);
    for (int i = 0; i < n; ++i) {
      if (p(i) > 1e-12) {
        EXPECT_NEAR(g(i), eta, 1e-9);
      } else {
        EXPECT_LE(g(i), eta + 1e-9);
      }
    }
  }
}

TEST(NoShort, SimplexBruteForceTwoAssets) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 100; ++rep) {
    const Params th{oracle::random_vector(rng, 2, 0.2), oracle::random_pd(rng, 2) * 0.02};
    const double lambda = 0.05 + 0.1 * rep;
    double best = -INFINITY;
    double best_w = 0;
    for (int i = 0; i <= 200000; ++i) {
      VectorXd p(2);
      p << i / 200000.0, 1 - i / 200000.0;
      const double u = utility(p, th, lambda);
      if (u > best) {
        best = u;
        best_w = p(0);
      }
    }
    EXPECT_NEAR(optimal_weights_no_short(th, lambda)(0), best_w, 1e-4);
  }
}

TEST(NoShort, SimplexBruteForceThreeAssets) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const Params th{oracle::random_vector(rng, 3, 0.2), oracle::random_pd(rng, 3) * 0.02};
    const double lambda = 0.3 + rep;
    const VectorXd p = optimal_weights_no_short(th, lambda);
    const double got = utility(p, th, lambda);
    const int m = 400;
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; i + j <= m; ++j) {
        VectorXd q(3);
        q << double(i) / m, double(j) / m, double(m - i - j) / m;
        EXPECT_LE(utility(q, th, lambda), got + 1e-12);
      }
    }
  }
}

TEST(Frontier, MonotoneInLambda) {
  std::mt19937_64 rng(6);
  const Params th{oracle::random_vector(rng, 4, 0.05), oracle::random_pd(rng, 4) * 0.01};
  for (bool allow_short : {true, false}) {
    auto grid = log_spaced(0.5, 500.0, 50);
    std::reverse(grid.begin(), grid.end());
    const auto pts = efficient_frontier(th, grid, allow_short);
    ASSERT_EQ(pts.size(), 50u);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      EXPECT_GT(pts[i].lambda, pts[i - 1].lambda);
      EXPECT_LE(pts[i].variance, pts[i - 1].variance + 1e-15);
      EXPECT_LE(pts[i].expected_return, pts[i - 1].expected_return + 1e-15);
    }
  }
}

TEST(Frontier, LogSpacedGrid) {
  const auto g = log_spaced(0.5, 500.0, 4);
  EXPECT_DOUBLE_EQ(g.front(), 0.5);
  EXPECT_DOUBLE_EQ(g.back(), 500.0);
  EXPECT_NEAR(g[1], 5.0, 1e-12);
  EXPECT_THROW(log_spaced(0.0, 1.0, 3), Error);
}

TEST(VarianceTarget, TwoAssetExample) {
  const auto pt = portfolio_for_variance(two_asset(0.2, 0.1), 0.6, true);
  EXPECT_NEAR(pt.lambda, std::sqrt(0.05), 1e-6);
  EXPECT_NEAR(pt.variance, 0.6, 0.6e-6);
}

TEST(VarianceTarget, RandomTargets) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const Params th{oracle::random_vector(rng, 3, 0.05), oracle::random_pd(rng, 3) * 0.01};
    for (bool allow_short : {true, false}) {
      const double vmin = minimum_variance(th, allow_short);
      const double target = vmin * 1.3;
      try {
        const auto pt = portfolio_for_variance(th, target, allow_short);
        EXPECT_NEAR(pt.variance, target, 1e-6 * target);
      } catch (const Error& e) {
        // Long-only frontiers stop at the highest-return asset.
        EXPECT_FALSE(allow_short);
        EXPECT_EQ(e.kind(), ErrorKind::BisectionRangeExhausted);
      }
    }
  }
}

TEST(VarianceTarget, Errors) {
  expect_kind(ErrorKind::TargetBelowMinimumVariance, [] { portfolio_for_variance(two_asset(0.2, 0.1), 0.4, true); });
  expect_kind(ErrorKind::BisectionRangeExhausted, [] { portfolio_for_variance(two_asset(0.2, 0.1), 1e7, true); });
  expect_kind(ErrorKind::InvalidArgument, [] { optimal_weights(two_asset(0.2, 0.1), 0.0); });
  expect_kind(ErrorKind::InvalidArgument, [] { optimal_weights(two_asset(0.2, 0.1), std::nan("")); });
  expect_kind(ErrorKind::DimensionMismatch, [] { portfolio_stats(VectorXd(VectorXd::Ones(3)), two_asset(0.2, 0.1)); });
}

TEST(LongDouble, Weights) {
  ModelParams<long double> th{Vector<long double>(2), Matrix<long double>::Identity(2, 2)};
  th.mu << 0.2L, 0.1L;
  const auto p = optimal_weights(th, 1.0L);
  EXPECT_NEAR(double(p(0)), 0.55, 1e-18);
}
