#include "mpd/io.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "mpd/asymptotics.hpp"

namespace mpd {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string where(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

double parse_cell(const std::string& raw, std::size_t line, std::size_t column) {
  const std::string cell = trim(raw);
  if (cell.empty()) raise(ErrorKind::ParseError, "empty cell at " + where(line, column));
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size()) {
    raise(ErrorKind::ParseError, "not a number '" + cell + "' at " + where(line, column));
  }
  if (!std::isfinite(v)) raise(ErrorKind::NonFiniteValue, "non-finite value at " + where(line, column));
  return v;
}

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string format_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ReturnsFile parse_returns(std::istream& in, ReturnsMode mode) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) raise(ErrorKind::ParseError, "missing header row");
  for (auto& h : header) h = trim(h);

  const bool has_date = lower(header.front()) == "date";
  ReturnsFile file;
  file.asset_names.assign(header.begin() + (has_date ? 1 : 0), header.end());
  if (file.asset_names.empty()) raise(ErrorKind::ParseError, "header names no asset columns");
  const std::size_t n = file.asset_names.size();

  std::vector<std::vector<double>> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      raise(ErrorKind::ParseError, "line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                                       " fields, header has " + std::to_string(header.size()));
    }
    if (has_date) file.period_labels.push_back(trim(fields.front()));
    std::vector<double> row(n);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t col = j + (has_date ? 1 : 0);
      row[j] = parse_cell(fields[col], line_no, col + 1);
    }
    values.push_back(std::move(row));
  }

  if (mode == ReturnsMode::Prices) {
    if (values.size() < 2) raise(ErrorKind::TooFewRows, "prices need at least two rows");
    std::vector<std::vector<double>> returns(values.size() - 1, std::vector<double>(n));
    for (std::size_t i = 1; i < values.size(); ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!(values[i][j] > 0.0) || !(values[i - 1][j] > 0.0)) {
          raise(ErrorKind::NonFiniteValue, "nonpositive price in column " + std::to_string(j + 1));
        }
        returns[i - 1][j] = std::log(values[i][j] / values[i - 1][j]);
      }
    }
    values = std::move(returns);
    if (!file.period_labels.empty()) file.period_labels.erase(file.period_labels.begin());
  }
  if (values.size() < 2) raise(ErrorKind::TooFewRows, "at least two return rows are required");

  file.rows.resize(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) file.rows(Eigen::Index(i), Eigen::Index(j)) = values[i][j];
  }
  return file;
}

ReturnsFile load_returns(const std::string& path, ReturnsMode mode) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::IoError, "cannot open '" + path + "'");
  return parse_returns(in, mode);
}

void write_returns(std::ostream& out, const ReturnsFile& file) {
  const bool has_date = !file.period_labels.empty();
  if (has_date) out << "date,";
  for (std::size_t j = 0; j < file.asset_names.size(); ++j) out << (j ? "," : "") << file.asset_names[j];
  out << "\n";
  for (Eigen::Index i = 0; i < file.rows.rows(); ++i) {
    if (has_date) out << file.period_labels[std::size_t(i)] << ",";
    for (Eigen::Index j = 0; j < file.rows.cols(); ++j) out << (j ? "," : "") << format_double(file.rows(i, j));
    out << "\n";
  }
}

AreTable make_are_table(const std::vector<double>& alphas, Eigen::Index n_max) {
  if (alphas.empty() || n_max < 1) raise(ErrorKind::InvalidArgument, "ARE table needs alphas and n_max >= 1");
  AreTable t;
  t.alphas = alphas;
  t.n_max = n_max;
  t.values.resize(n_max, static_cast<Eigen::Index>(alphas.size()));
  for (Eigen::Index n = 1; n <= n_max; ++n) {
    for (std::size_t a = 0; a < alphas.size(); ++a) t.values(n - 1, Eigen::Index(a)) = are(Alpha(alphas[a]), n);
  }
  return t;
}

// Estimate CSV is long-format: field,row,col,value with 1-based indices.
std::string to_csv(const EstimateReport& r) {
  const auto& e = r.estimate;
  std::ostringstream out;
  out << "field,row,col,value\n";
  out << "alpha,,," << format_double(r.alpha.value()) << "\n";
  out << "iterations,,," << e.iterations << "\n";
  out << "converged,,," << (e.converged ? 1 : 0) << "\n";
  out << "objective,,," << format_double(e.objective_value) << "\n";
  for (Eigen::Index i = 0; i < e.mu.size(); ++i) out << "mu," << i + 1 << ",," << format_double(e.mu(i)) << "\n";
  for (Eigen::Index i = 0; i < e.sigma.rows(); ++i) {
    for (Eigen::Index j = 0; j < e.sigma.cols(); ++j) {
      out << "sigma," << i + 1 << "," << j + 1 << "," << format_double(e.sigma(i, j)) << "\n";
    }
  }
  for (Eigen::Index i = 0; i < e.weights.size(); ++i) {
    out << "weight," << i + 1 << ",," << format_double(e.weights(i)) << "\n";
  }
  return out.str();
}

std::string to_json(const EstimateReport& r) {
  const auto& e = r.estimate;
  json j;
  j["assets"] = r.asset_names;
  j["alpha"] = r.alpha.value();
  j["iterations"] = e.iterations;
  j["converged"] = e.converged;
  j["objective"] = e.objective_value;
  j["mu"] = vector_json(e.mu);
  j["sigma"] = matrix_json(e.sigma);
  j["weights"] = vector_json(e.weights);
  return dump(j);
}

std::string to_csv(const FrontierReport& r) {
  std::ostringstream out;
  out << "lambda,return,variance";
  const std::size_t n = r.points.empty() ? 0 : std::size_t(r.points.front().weights.size());
  for (std::size_t i = 0; i < n; ++i) out << ",w_" << i + 1;
  out << "\n";
  for (const auto& p : r.points) {
    out << format_double(p.lambda) << "," << format_double(p.expected_return) << "," << format_double(p.variance);
    for (Eigen::Index i = 0; i < p.weights.size(); ++i) out << "," << format_double(p.weights(i));
    out << "\n";
  }
  return out.str();
}

std::string to_json(const FrontierReport& r) {
  json points = json::array();
  for (const auto& p : r.points) {
    points.push_back({{"lambda", p.lambda},
                      {"return", p.expected_return},
                      {"variance", p.variance},
                      {"weights", vector_json(p.weights)}});
  }
  return dump(json{{"assets", r.asset_names}, {"points", points}});
}

std::string to_csv(const DimReport& r) {
  std::ostringstream out;
  out << "index,dim\n";
  for (Eigen::Index i = 0; i < r.dim.size(); ++i) out << i + 1 << "," << format_double(r.dim(i)) << "\n";
  return out.str();
}

std::string to_json(const DimReport& r) {
  json j;
  j["lambda"] = r.lambda;
  j["target_variance"] = r.target_variance;
  j["dim"] = vector_json(r.dim);
  if (!r.period_labels.empty()) j["periods"] = r.period_labels;
  return dump(j);
}

std::string to_csv(const AreTable& r) {
  std::ostringstream out;
  out << "N";
  for (double a : r.alphas) out << "," << format_label(a);
  out << "\n";
  for (Eigen::Index n = 0; n < r.values.rows(); ++n) {
    out << n + 1;
    for (Eigen::Index a = 0; a < r.values.cols(); ++a) out << "," << format_double(r.values(n, a));
    out << "\n";
  }
  return out.str();
}

std::string to_json(const AreTable& r) {
  return dump(json{{"alphas", r.alphas}, {"are", matrix_json(r.values)}});
}

std::string to_csv(const MseTable& r) {
  std::ostringstream out;
  out << "n,t,eps,alpha,mse,failures\n";
  for (const auto& c : r.cells) {
    out << c.n << "," << c.t << "," << format_double(c.eps) << "," << format_double(c.alpha) << ","
        << format_double(c.mse) << "," << c.failures << "\n";
  }
  return out.str();
}

std::string to_json(const MseTable& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"n", c.n},
                     {"t", c.t},
                     {"eps", c.eps},
                     {"alpha", c.alpha},
                     {"mse", c.mse},
                     {"failures", c.failures},
                     {"non_converged", c.non_converged},
                     {"replicates", c.replicates}});
  }
  return dump(json{{"cells", cells}});
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) raise(ErrorKind::IoError, "failed writing to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) raise(ErrorKind::IoError, "failed writing '" + path + "'");
}

}  // namespace mpd
