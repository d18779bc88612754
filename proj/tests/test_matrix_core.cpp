#include <gtest/gtest.h>

#include <random>

#include "mpd/matrix_core.hpp"
#include "mpd/errors.hpp"
#include "oracles.hpp"

using namespace mpd;

TEST(Cholesky, IdentityAndDiagonal) {
  EXPECT_TRUE(cholesky(MatrixXd::Identity(3, 3)).isApprox(MatrixXd::Identity(3, 3)));
  MatrixXd d = MatrixXd::Zero(2, 2);
  d.diagonal() << 4, 9;
  MatrixXd l = cholesky(d);
  EXPECT_DOUBLE_EQ(l(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(l(1, 1), 3.0);
  EXPECT_DOUBLE_EQ(l(0, 1), 0.0);
}

TEST(Cholesky, TwoByTwoExample) {
  MatrixXd s(2, 2);
  s << 1, 0.2, 0.2, 1;
  MatrixXd l = cholesky(s);
  EXPECT_NEAR(l(1, 0), 0.2, 1e-15);
  EXPECT_NEAR(l(1, 1), std::sqrt(0.96), 1e-15);
  EXPECT_LT((l * l.transpose() - s).norm(), 1e-14);
}

TEST(Cholesky, RejectsIndefiniteAndSingular) {
  MatrixXd s(2, 2);
  s << 1, 2, 2, 1;
  try {
    Cholesky<double> c(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPositiveDefinite);
  }
  MatrixXd singular(2, 2);
  singular << 1, 1, 1, 1;
  EXPECT_THROW(Cholesky<double>{singular}, Error);
  EXPECT_THROW(Cholesky<double>{MatrixXd(2, 3)}, Error);
}

TEST(Cholesky, UsesLowerTriangleOnly) {
  MatrixXd s(2, 2);
  s << 2, 99, 0.5, 1;
  Cholesky<double> c(s);
  MatrixXd sym(2, 2);
  sym << 2, 0.5, 0.5, 1;
  EXPECT_LT((c.matrix_l() * c.matrix_l().transpose() - sym).norm(), 1e-14);
}

TEST(Cholesky, RoundTripRandom) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + rep % 6;
    const MatrixXd s = oracle::random_pd(rng, n);
    const Cholesky<double> c(s);
    const MatrixXd l = c.matrix_l();
    EXPECT_LT((l * l.transpose() - s).norm(), 1e-12 * s.norm());
    EXPECT_TRUE(l.isLowerTriangular());
    EXPECT_GT(l.diagonal().minCoeff(), 0.0);
    EXPECT_NEAR(c.log_det(), std::log(s.determinant()), 1e-10);
    EXPECT_LT((c.inverse() * s - MatrixXd::Identity(n, n)).norm(), 1e-10);
    const VectorXd b = oracle::random_vector(rng, n);
    EXPECT_LT((s * c.solve(b) - b).norm(), 1e-10);
  }
}

TEST(Mahalanobis, Examples) {
  VectorXd x(2), mu(2);
  x << 3, 4;
  mu << 0, 0;
  EXPECT_DOUBLE_EQ(mahalanobis_sq(x, mu, MatrixXd::Identity(2, 2)), 25.0);
  MatrixXd s = MatrixXd::Identity(2, 2) * 4.0;
  EXPECT_DOUBLE_EQ(mahalanobis_sq(x, mu, s), 6.25);
  EXPECT_DOUBLE_EQ(mahalanobis_sq(mu, mu, s), 0.0);
}

TEST(Mahalanobis, MatchesExplicitInverse) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + rep % 5;
    const MatrixXd s = oracle::random_pd(rng, n);
    const VectorXd x = oracle::random_vector(rng, n, 3.0);
    const VectorXd mu = oracle::random_vector(rng, n);
    const double expect = (x - mu).dot(s.inverse() * (x - mu));
    const double got = mahalanobis_sq(x, mu, s);
    EXPECT_NEAR(got, expect, 1e-10 * (1 + expect));
    EXPECT_GE(got, 0.0);
  }
}

TEST(Mahalanobis, AffineInvariance) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 2 + rep % 3;
    const MatrixXd s = oracle::random_pd(rng, n);
    const MatrixXd a = oracle::random_nonsingular(rng, n);
    const VectorXd b = oracle::random_vector(rng, n);
    const VectorXd x = oracle::random_vector(rng, n, 2.0);
    const VectorXd mu = oracle::random_vector(rng, n);
    const double d0 = mahalanobis_sq(x, mu, s);
    const MatrixXd as = a * s * a.transpose();
    const double d1 = mahalanobis_sq(VectorXd(a * x + b), VectorXd(a * mu + b), as);
    EXPECT_NEAR(d0, d1, 1e-9 * (1 + d0));
  }
}

TEST(Mahalanobis, Rows) {
  MatrixXd x(3, 2);
  x << 1, 0, 0, 2, 3, 4;
  const VectorXd mu = VectorXd::Zero(2);
  const Cholesky<double> c(MatrixXd::Identity(2, 2));
  const VectorXd d = mahalanobis_sq_rows(x, mu, c);
  EXPECT_DOUBLE_EQ(d(0), 1.0);
  EXPECT_DOUBLE_EQ(d(1), 4.0);
  EXPECT_DOUBLE_EQ(d(2), 25.0);
}

TEST(Vectorization, Examples) {
  MatrixXd s(2, 2);
  s << 1, 2, 2, 3;
  const VectorXd vs = vecs(s);
  ASSERT_EQ(vs.size(), 3);
  EXPECT_NEAR(vs(0), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(vs(1), 3 / std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(vs(2), 2.0);
  const VectorXd vh = vech(s);
  ASSERT_EQ(vh.size(), 3);
  EXPECT_DOUBLE_EQ(vh(0), 1.0);
  EXPECT_DOUBLE_EQ(vh(1), 2.0);
  EXPECT_DOUBLE_EQ(vh(2), 3.0);
  EXPECT_EQ(vecs_size(1), 1);
  EXPECT_EQ(vecs_size(10), 55);
}

TEST(Vectorization, NormAndInverse) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 1 + rep % 5;
    const MatrixXd a = oracle::random_pd(rng, n);
    const MatrixXd b = oracle::random_pd(rng, n);
    // vecs(A).vecs(B) = tr(AB)/2 for symmetric A, B.
    EXPECT_NEAR(vecs(a).dot(vecs(b)), 0.5 * (a * b).trace(), 1e-9 * (1 + (a * b).trace()));
    EXPECT_LT((unvecs(vecs(a), n) - a).norm(), 1e-12 * a.norm());
    const double c = 0.7;
    EXPECT_LT((vecs(MatrixXd(a + c * b)) - vecs(a) - c * vecs(b)).norm(), 1e-12 * (a.norm() + b.norm()));
    EXPECT_LT((vech(MatrixXd(a + c * b)) - vech(a) - c * vech(b)).norm(), 1e-12 * (a.norm() + b.norm()));
  }
}

TEST(SymmetricSqrt, SquaresBack) {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    const MatrixXd s = oracle::random_pd(rng, 1 + rep % 4);
    const MatrixXd r = symmetric_sqrt(s);
    EXPECT_LT((r * r - s).norm(), 1e-10 * s.norm());
    EXPECT_LT((r - r.transpose()).norm(), 1e-12 * s.norm());
  }
}

TEST(LongDouble, CholeskyAndDistances) {
  Matrix<long double> s(2, 2);
  s << 4.0L, 1.0L, 1.0L, 3.0L;
  const Cholesky<long double> c(s);
  const Matrix<long double> l = c.matrix_l();
  EXPECT_LT(double((l * l.transpose() - s).norm()), 1e-17);
  Vector<long double> x(2), mu(2);
  x << 1.0L, 2.0L;
  mu << 0.0L, 0.0L;
  const long double expect = (x.transpose() * s.inverse() * x)(0);
  EXPECT_NEAR(double(mahalanobis_sq(x, mu, c)), double(expect), 1e-17);
}
