#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mpd/montecarlo.hpp"
#include "oracles.hpp"

using namespace mpd;

namespace {

std::vector<Alpha> alphas(std::initializer_list<double> values) {
  std::vector<Alpha> out;
  for (double v : values) out.emplace_back(v);
  return out;
}

}  // namespace

TEST(Scenario, StandardParameters) {
  const auto s = SimulationScenario::standard(3, 20, 0.1, alphas({0}), 10, 1);
  EXPECT_DOUBLE_EQ(s.core.sigma(0, 1), 0.2);
  EXPECT_DOUBLE_EQ(s.core.sigma(2, 2), 1.0);
  EXPECT_DOUBLE_EQ(s.contaminant.mu(1), -4.0);
  EXPECT_DOUBLE_EQ(s.contaminant.sigma(0, 2), 0.8);
  EXPECT_DOUBLE_EQ(s.contaminant.sigma(1, 1), 4.0);
  EXPECT_THROW(SimulationScenario::standard(2, 20, 1.0, alphas({0}), 10, 1).check(), Error);
  EXPECT_THROW(SimulationScenario::standard(2, 2, 0.0, alphas({0}), 10, 1).check(), Error);
}

TEST(Sampling, DeterministicPerReplicate) {
  const auto s = SimulationScenario::standard(2, 50, 0.1, alphas({0}), 10, 42);
  EXPECT_EQ(sample_contaminated(s, 3), sample_contaminated(s, 3));
  EXPECT_NE(sample_contaminated(s, 3), sample_contaminated(s, 4));
  auto other = s;
  other.seed = 43;
  EXPECT_NE(sample_contaminated(s, 3), sample_contaminated(other, 3));
  EXPECT_NE(replicate_seed(1, 0), replicate_seed(0, 1));
}

TEST(Sampling, ContaminantCount) {
  // With the contaminant moved far away its rows are easy to count.
  auto s = SimulationScenario::standard(2, 200, 0.05, alphas({0}), 10, 7);
  s.contaminant = {VectorXd::Constant(2, -50.0), MatrixXd::Identity(2, 2)};
  for (int r = 0; r < 5; ++r) {
    const MatrixXd x = sample_contaminated(s, r);
    int far = 0;
    for (int i = 0; i < x.rows(); ++i) far += x(i, 0) < -25 ? 1 : 0;
    EXPECT_EQ(far, 10);
  }
  s.eps = 0.0;
  const MatrixXd clean = sample_contaminated(s, 0);
  EXPECT_GT(clean.minCoeff(), -25.0);
}

TEST(Sampling, LawOfLargeNumbers) {
  const auto s = SimulationScenario::standard(2, 200000, 0.0, alphas({0}), 1, 5);
  const MatrixXd x = sample_contaminated(s, 0);
  const VectorXd mu = x.colwise().mean().transpose();
  const MatrixXd c = x.rowwise() - mu.transpose();
  const MatrixXd cov = c.transpose() * c / double(x.rows());
  EXPECT_LT(mu.cwiseAbs().maxCoeff(), 0.01);
  EXPECT_NEAR(cov(0, 0), 1.0, 0.015);
  EXPECT_NEAR(cov(0, 1), 0.2, 0.015);
}

TEST(MseHat, Cases) {
  const Params truth{VectorXd::Zero(2), MatrixXd::Identity(2, 2)};
  EXPECT_EQ(mse_hat({truth, truth}, truth), 0.0);
  Params shifted = truth;
  shifted.mu(0) = 1.0;
  shifted.sigma(1, 0) = shifted.sigma(0, 1) = 2.0;
  // (1)^2 + (2)^2 from mu and the single off-diagonal vech entry.
  EXPECT_DOUBLE_EQ(mse_hat({shifted}, truth), 5.0);
  EXPECT_DOUBLE_EQ(mse_hat({shifted, truth}, truth), 2.5);
  EXPECT_THROW(mse_hat({}, truth), Error);
  EXPECT_THROW(mse_hat({Params{VectorXd::Zero(1), MatrixXd::Identity(1, 1)}}, truth), Error);
}

TEST(RunStudy, ThreadCountDoesNotChangeResults) {
  const auto s = SimulationScenario::standard(2, 30, 0.1, alphas({0, 0.2, 0.5}), 40, 9);
  EstimatorConfig<double> config;
  const auto one = run_study(s, config, 1);
  const auto three = run_study(s, config, 3);
  ASSERT_EQ(one.cells.size(), 3u);
  for (std::size_t i = 0; i < one.cells.size(); ++i) {
    EXPECT_EQ(one.cells[i].mse, three.cells[i].mse);
    EXPECT_EQ(one.cells[i].failures, three.cells[i].failures);
    EXPECT_EQ(one.cells[i].replicates + one.cells[i].failures, 40);
  }
}

TEST(RunStudy, MatchesManualLoop) {
  const auto s = SimulationScenario::standard(2, 25, 0.1, alphas({0.5}), 15, 3);
  EstimatorConfig<double> config;
  config.alpha = Alpha(0.5);
  std::vector<Params> est;
  for (int r = 0; r < 15; ++r) est.push_back(mpd_estimate(sample_contaminated(s, r), config).params());
  const auto table = run_study(s, config, 2);
  EXPECT_DOUBLE_EQ(table.cells[0].mse, mse_hat(est, s.core));
}

TEST(RunStudy, RobustBeatsMleUnderContamination) {
  const auto s = SimulationScenario::standard(2, 50, 0.1, alphas({0, 0.5}), 100, 11);
  const auto table = run_study(s, EstimatorConfig<double>{}, 1);
  EXPECT_LT(table.cells[1].mse, 0.3 * table.cells[0].mse);
}

TEST(RunStudy, NonConvergedReplicatesAreExcludedAndCounted) {
  const auto s = SimulationScenario::standard(2, 30, 0.1, alphas({0, 0.5}), 12, 5);
  EstimatorConfig<double> config;
  config.max_iter = 1;
  const auto table = run_study(s, config, 1);
  EXPECT_EQ(table.cells[0].failures, 0);
  EXPECT_EQ(table.cells[0].replicates, 12);
  EXPECT_EQ(table.cells[1].failures, 12);
  EXPECT_EQ(table.cells[1].non_converged, 12);
  EXPECT_EQ(table.cells[1].replicates, 0);
  EXPECT_TRUE(std::isnan(table.cells[1].mse));
}
