// Command-line front end: robust estimation, frontiers, DIM diagnostics,
// efficiency tables and contamination simulations.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mpd/asymptotics.hpp"
#include "mpd/influence.hpp"
#include "mpd/io.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct InputOptions {
  std::string input;
  bool prices = false;
};

struct FitOptions {
  double alpha = 0.0;
  double tol = 1e-8;
  int max_iter = 500;
};

mpd::ReportFormat parse_format(const std::string& s) {
  return s == "csv" ? mpd::ReportFormat::Csv : mpd::ReportFormat::Json;
}

mpd::ReturnsFile read_input(const InputOptions& in) {
  return mpd::load_returns(in.input, in.prices ? mpd::ReturnsMode::Prices : mpd::ReturnsMode::Returns);
}

mpd::Estimate<double> fit(const mpd::MatrixXd& sample, const FitOptions& opts) {
  mpd::EstimatorConfig<double> config;
  config.alpha = mpd::Alpha(opts.alpha);
  config.tol = opts.tol;
  config.max_iter = opts.max_iter;
  return mpd::mpd_estimate(sample, config);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw CLI::ValidationError("list", "not a number: '" + item + "'");
    }
    if (used != item.size()) throw CLI::ValidationError("list", "not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("list", "empty list");
  return out;
}

std::vector<mpd::Alpha> to_alphas(const std::vector<double>& values) {
  std::vector<mpd::Alpha> out;
  for (double v : values) out.emplace_back(v);
  return out;
}

void add_input(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--input", in.input, "CSV of returns (or prices with --prices)")->required();
  cmd->add_flag("--prices", in.prices, "Input holds prices; convert to log-returns");
}

void add_fit(CLI::App* cmd, FitOptions& fit_opts, bool alpha_required) {
  auto* opt = cmd->add_option("--alpha", fit_opts.alpha, "Tuning parameter (0 gives the MLE)")
                  ->check(CLI::NonNegativeNumber);
  if (alpha_required) opt->required();
  cmd->add_option("--tol", fit_opts.tol, "Convergence tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", fit_opts.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust mean-variance portfolios by minimum pseudodistance estimation"};
  app.require_subcommand(1);

  InputOptions input;
  FitOptions fit_opts;
  std::string output;
  std::string format;

  auto* estimate_cmd = app.add_subcommand("estimate", "Estimate mean vector and covariance matrix");
  add_input(estimate_cmd, input);
  add_fit(estimate_cmd, fit_opts, true);
  estimate_cmd->add_option("--output", output, "Output path ('-' for stdout)")->required();
  estimate_cmd->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  double lambda_min = 0.5;
  double lambda_max = 500.0;
  int points = 50;
  bool no_short = false;
  bool use_mle = false;
  auto* frontier_cmd = app.add_subcommand("frontier", "Efficient frontier from estimated parameters");
  add_input(frontier_cmd, input);
  auto* frontier_alpha = frontier_cmd->add_option("--alpha", fit_opts.alpha, "Tuning parameter")
                             ->check(CLI::NonNegativeNumber);
  auto* mle_flag = frontier_cmd->add_flag("--mle", use_mle, "Use the MLE (alpha = 0)");
  frontier_alpha->excludes(mle_flag);
  frontier_cmd->add_option("--tol", fit_opts.tol)->check(CLI::PositiveNumber);
  frontier_cmd->add_option("--max-iter", fit_opts.max_iter)->check(CLI::PositiveNumber);
  frontier_cmd->add_option("--lambda-min", lambda_min)->check(CLI::PositiveNumber);
  frontier_cmd->add_option("--lambda-max", lambda_max)->check(CLI::PositiveNumber);
  frontier_cmd->add_option("--points", points)->check(CLI::PositiveNumber);
  frontier_cmd->add_flag("--no-short", no_short, "Forbid short selling");
  frontier_cmd->add_option("--output", output)->required();
  frontier_cmd->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

  double target_variance = 0.005;
  bool robust_if = false;
  auto* dim_cmd = app.add_subcommand("dim", "Per-observation data influence measure");
  add_input(dim_cmd, input);
  add_fit(dim_cmd, fit_opts, true);
  dim_cmd->add_option("--target-variance", target_variance, "Portfolio variance on the frontier")
      ->check(CLI::PositiveNumber);
  dim_cmd->add_flag("--robust-if", robust_if, "Use the alpha influence functions instead of the classical ones");
  dim_cmd->add_option("--output", output)->required();
  dim_cmd->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

  std::string alphas_text = "0,0.1,0.2,0.5,0.75,1";
  int n_max = 10;
  auto* are_cmd = app.add_subcommand("are-table", "Asymptotic relative efficiency table");
  are_cmd->add_option("--alphas", alphas_text, "Comma-separated alpha values");
  are_cmd->add_option("--n-max", n_max)->check(CLI::PositiveNumber);
  are_cmd->add_option("--output", output)->required();
  are_cmd->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

  int sim_n = 2;
  int sim_t = 20;
  double sim_eps = 0.0;
  std::string sim_alphas = "0,0.1,0.2,0.5,0.75,1";
  int replicates = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Contaminated-normal mean-square-error study");
  sim_cmd->add_option("--n", sim_n)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--t", sim_t)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--eps", sim_eps)->check(CLI::Range(0.0, 0.999999));
  sim_cmd->add_option("--alphas", sim_alphas);
  sim_cmd->add_option("--replicates", replicates)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", seed);
  sim_cmd->add_option("--tol", fit_opts.tol)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--max-iter", fit_opts.max_iter)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
  sim_cmd->add_option("--output", output)->required();
  sim_cmd->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

  std::vector<double> alpha_list;
  try {
    app.parse(argc, argv);
    if (*are_cmd) alpha_list = parse_list(alphas_text);
    if (*sim_cmd) alpha_list = parse_list(sim_alphas);
    if (*frontier_cmd && !use_mle && frontier_alpha->count() == 0) {
      throw CLI::RequiredError("--alpha or --mle");
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (format.empty()) format = *estimate_cmd ? "json" : "csv";
    const auto fmt = parse_format(format);
    if (*estimate_cmd) {
      const auto data = read_input(input);
      const auto est = fit(data.rows, fit_opts);
      mpd::emit_report(mpd::EstimateReport{est, mpd::Alpha(fit_opts.alpha), data.asset_names}, fmt, output);
    } else if (*frontier_cmd) {
      if (use_mle) fit_opts.alpha = 0.0;
      if (lambda_max < lambda_min) throw mpd::Error(mpd::ErrorKind::InvalidArgument, "lambda-max below lambda-min");
      const auto data = read_input(input);
      const auto est = fit(data.rows, fit_opts);
      const auto grid = mpd::log_spaced(lambda_min, lambda_max, points);
      mpd::FrontierReport report{mpd::efficient_frontier(est.params(), grid, !no_short), data.asset_names};
      mpd::emit_report(report, fmt, output);
    } else if (*dim_cmd) {
      const auto data = read_input(input);
      const auto est = fit(data.rows, fit_opts);
      const auto point = mpd::portfolio_for_variance(est.params(), target_variance, true);
      const mpd::Alpha if_alpha = robust_if ? mpd::Alpha(fit_opts.alpha) : mpd::Alpha{};
      mpd::DimReport report{mpd::dim_series(data.rows, est.params(), point.lambda, if_alpha), point.lambda,
                            target_variance, data.period_labels};
      mpd::emit_report(report, fmt, output);
    } else if (*are_cmd) {
      for (double a : alpha_list) (void)mpd::Alpha(a);
      mpd::emit_report(mpd::make_are_table(alpha_list, n_max), fmt, output);
    } else if (*sim_cmd) {
      auto scenario = mpd::SimulationScenario::standard(sim_n, sim_t, sim_eps, to_alphas(alpha_list), replicates, seed);
      mpd::EstimatorConfig<double> config;
      config.tol = fit_opts.tol;
      config.max_iter = fit_opts.max_iter;
      mpd::emit_report(mpd::run_study(scenario, config, threads), fmt, output);
    }
  } catch (const mpd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mpd::is_data_error(e.kind()) ? kData : kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}
