#pragma once

// Contaminated-normal sampling and the mean-square-error simulation study.

#include <cstdint>
#include <vector>

#include "mpd/estimators.hpp"

namespace mpd {

struct SimulationScenario {
  Eigen::Index n = 2;
  Eigen::Index t = 20;
  /// Fraction of rows drawn from the contaminant, in [0, 1).
  double eps = 0.0;
  Params core;
  Params contaminant;
  std::vector<Alpha> alphas;
  int n_s = 1000;
  std::uint64_t seed = 0;

  void check() const;

  /// Core N(0, S0) with unit variances and 0.2 covariances; contaminant
  /// N(-4 e, 4 S0).
  static SimulationScenario standard(Eigen::Index n, Eigen::Index t, double eps, std::vector<Alpha> alphas,
                                     int n_s, std::uint64_t seed);
};

/// Unit variances and equal off-diagonal covariances.
MatrixXd equicorrelated(Eigen::Index n, double covariance);

struct MseCell {
  Eigen::Index n = 0;
  Eigen::Index t = 0;
  double eps = 0.0;
  double alpha = 0.0;
  double mse = 0.0;
  /// Replicates left out of `mse`: estimation raised or hit max_iter.
  int failures = 0;
  /// The part of `failures` that hit max_iter without raising.
  int non_converged = 0;
  int replicates = 0;
};

struct MseTable {
  std::vector<MseCell> cells;
};

/// Deterministic 64-bit stream seed for one replicate.
std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t replicate_index);

/// round(eps T) rows from the contaminant and the rest from the core, in
/// shuffled order; fully determined by (scenario.seed, replicate_index).
MatrixXd sample_contaminated(const SimulationScenario& scenario, std::uint64_t replicate_index);

/// Mean of ||(mu-hat, vech sigma-hat) - (mu0, vech sigma0)||^2.
double mse_hat(const std::vector<Params>& estimates, const Params& truth);

/// Runs every alpha on the same n_s samples. The alpha = 0 cells use the MLE;
/// all others run mpd_estimate with `config_template` and the cell's alpha.
/// `threads` = 0 uses the hardware concurrency. Results do not depend on it.
MseTable run_study(const SimulationScenario& scenario, const EstimatorConfig<double>& config_template,
                   unsigned threads = 0);

}  // namespace mpd
