#include "mpd/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <random>
#include <thread>

namespace mpd {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Neumaier compensated summation, applied in replicate order.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

VectorXd stack(const Params& p) {
  const VectorXd h = vech(p.sigma);
  VectorXd out(p.mu.size() + h.size());
  out << p.mu, h;
  return out;
}

MatrixXd draw_normal(std::mt19937_64& rng, const Params& params, const MatrixXd& chol_l, Eigen::Index rows) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd z(params.dim(), rows);
  for (Eigen::Index j = 0; j < rows; ++j) {
    for (Eigen::Index i = 0; i < params.dim(); ++i) z(i, j) = normal(rng);
  }
  return ((chol_l * z).colwise() + params.mu).transpose();
}

struct ReplicateResult {
  std::optional<Params> estimate;
  bool converged = true;
};

}  // namespace

void SimulationScenario::check() const {
  if (n < 1) raise(ErrorKind::InvalidArgument, "scenario dimension must be at least 1");
  if (!(eps >= 0.0 && eps < 1.0)) raise(ErrorKind::InvalidArgument, "eps must lie in [0, 1)");
  if (n_s < 1) raise(ErrorKind::InvalidArgument, "replicate count must be at least 1");
  if (t < n + 1) raise(ErrorKind::InvalidArgument, "sample size must be at least n + 1");
  core.check();
  contaminant.check();
  if (core.dim() != n || contaminant.dim() != n) {
    raise(ErrorKind::DimensionMismatch, "scenario parameters do not match n");
  }
}

MatrixXd equicorrelated(Eigen::Index n, double covariance) {
  MatrixXd m = MatrixXd::Constant(n, n, covariance);
  m.diagonal().setOnes();
  return m;
}

SimulationScenario SimulationScenario::standard(Eigen::Index n, Eigen::Index t, double eps, std::vector<Alpha> alphas,
                                                int n_s, std::uint64_t seed) {
  SimulationScenario s;
  s.n = n;
  s.t = t;
  s.eps = eps;
  s.core = {VectorXd::Zero(n), equicorrelated(n, 0.2)};
  s.contaminant = {VectorXd::Constant(n, -4.0), 4.0 * equicorrelated(n, 0.2)};
  s.alphas = std::move(alphas);
  s.n_s = n_s;
  s.seed = seed;
  return s;
}

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t replicate_index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(replicate_index + 0x632BE59BD9B4E019ULL));
}

MatrixXd sample_contaminated(const SimulationScenario& scenario, std::uint64_t replicate_index) {
  scenario.check();
  const auto n_contaminated = static_cast<Eigen::Index>(std::llround(scenario.eps * double(scenario.t)));
  const Eigen::Index n_core = scenario.t - n_contaminated;
  std::mt19937_64 rng(replicate_seed(scenario.seed, replicate_index));

  MatrixXd rows(scenario.t, scenario.n);
  rows.topRows(n_core) = draw_normal(rng, scenario.core, cholesky(scenario.core.sigma), n_core);
  if (n_contaminated > 0) {
    rows.bottomRows(n_contaminated) =
        draw_normal(rng, scenario.contaminant, cholesky(scenario.contaminant.sigma), n_contaminated);
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(scenario.t));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  std::shuffle(order.begin(), order.end(), rng);
  MatrixXd shuffled(scenario.t, scenario.n);
  for (Eigen::Index i = 0; i < scenario.t; ++i) shuffled.row(i) = rows.row(order[static_cast<std::size_t>(i)]);
  return shuffled;
}

double mse_hat(const std::vector<Params>& estimates, const Params& truth) {
  if (estimates.empty()) raise(ErrorKind::InvalidArgument, "mse_hat needs at least one estimate");
  truth.check();
  const VectorXd target = stack(truth);
  CompensatedSum total;
  for (const auto& e : estimates) {
    e.check();
    if (e.dim() != truth.dim()) raise(ErrorKind::DimensionMismatch, "estimate and truth differ in dimension");
    total.add((stack(e) - target).squaredNorm());
  }
  return total.value() / double(estimates.size());
}

MseTable run_study(const SimulationScenario& scenario, const EstimatorConfig<double>& config_template,
                   unsigned threads) {
  scenario.check();
  config_template.check();
  const std::size_t n_alpha = scenario.alphas.size();
  const auto n_rep = static_cast<std::size_t>(scenario.n_s);
  std::vector<ReplicateResult> results(n_alpha * n_rep);

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t r = next++; r < n_rep; r = next++) {
      const MatrixXd sample = sample_contaminated(scenario, r);
      for (std::size_t a = 0; a < n_alpha; ++a) {
        ReplicateResult& slot = results[a * n_rep + r];
        try {
          EstimatorConfig<double> config = config_template;
          config.alpha = scenario.alphas[a];
          const Estimate<double> est = config.alpha.is_mle() ? mle(sample) : mpd_estimate(sample, config);
          slot.estimate = est.params();
          slot.converged = est.converged;
        } catch (const Error&) {
          slot.estimate.reset();
        }
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_rep));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  MseTable table;
  for (std::size_t a = 0; a < n_alpha; ++a) {
    MseCell cell;
    cell.n = scenario.n;
    cell.t = scenario.t;
    cell.eps = scenario.eps;
    cell.alpha = scenario.alphas[a].value();
    std::vector<Params> kept;
    for (std::size_t r = 0; r < n_rep; ++r) {
      const ReplicateResult& slot = results[a * n_rep + r];
      if (slot.estimate && !slot.converged) ++cell.non_converged;
      if (!slot.estimate || !slot.converged) {
        ++cell.failures;
        continue;
      }
      kept.push_back(*slot.estimate);
    }
    cell.replicates = static_cast<int>(kept.size());
    cell.mse = kept.empty() ? std::nan("") : mse_hat(kept, scenario.core);
    table.cells.push_back(cell);
  }
  return table;
}

}  // namespace mpd
