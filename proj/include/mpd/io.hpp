#pragma once

// Returns-file ingestion and CSV/JSON report emission.

#include <iosfwd>
#include <string>
#include <vector>

#include "mpd/estimators.hpp"
#include "mpd/montecarlo.hpp"
#include "mpd/portfolio.hpp"

namespace mpd {

enum class ReturnsMode { Returns, Prices };
enum class ReportFormat { Csv, Json };

struct ReturnsFile {
  std::vector<std::string> asset_names;
  /// T x N decimal-fraction log-returns.
  MatrixXd rows;
  /// Optional first-column labels (dates); empty when the file has none.
  std::vector<std::string> period_labels;
};

/// Comma-separated, header row first, optional leading "date" column. In
/// Prices mode each column is converted to ln(P_t / P_{t-1}).
ReturnsFile parse_returns(std::istream& in, ReturnsMode mode);
ReturnsFile load_returns(const std::string& path, ReturnsMode mode);

void write_returns(std::ostream& out, const ReturnsFile& file);

/// %.17g; round-trips every finite double.
std::string format_double(double v);

struct EstimateReport {
  Estimate<double> estimate;
  Alpha alpha;
  std::vector<std::string> asset_names;
};

struct FrontierReport {
  std::vector<FrontierPoint<double>> points;
  std::vector<std::string> asset_names;
};

struct DimReport {
  VectorXd dim;
  double lambda = 0.0;
  double target_variance = 0.0;
  std::vector<std::string> period_labels;
};

struct AreTable {
  std::vector<double> alphas;
  Eigen::Index n_max = 10;
  /// Row N-1, column per alpha.
  MatrixXd values;
};

AreTable make_are_table(const std::vector<double>& alphas, Eigen::Index n_max);

std::string to_csv(const EstimateReport& r);
std::string to_json(const EstimateReport& r);
std::string to_csv(const FrontierReport& r);
std::string to_json(const FrontierReport& r);
std::string to_csv(const DimReport& r);
std::string to_json(const DimReport& r);
std::string to_csv(const AreTable& r);
std::string to_json(const AreTable& r);
std::string to_csv(const MseTable& r);
std::string to_json(const MseTable& r);

/// Writes `text` to `path` ("-" is stdout).
void write_text(const std::string& path, const std::string& text);

template <typename Report>
void emit_report(const Report& report, ReportFormat format, const std::string& path) {
  write_text(path, format == ReportFormat::Csv ? to_csv(report) : to_json(report));
}

}  // namespace mpd
