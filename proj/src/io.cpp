#include "levsample/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

#include "levsample/error.hpp"

namespace levsample {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t column) {
  const std::string_view t = trim(cell);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value)) {
    throw ParseError(ErrorCode::NonNumeric, row, column,
                     "row " + std::to_string(row) + ", column " + std::to_string(column) +
                         ": '" + std::string(t) + "' is not a finite number");
  }
  return value;
}

}  // namespace

std::pair<DesignMatrix, ResponseVector> parse_csv(std::istream& in, Index response_column,
                                                  const CsvOptions& options) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool skipped_header = !options.header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    std::vector<double> values;
    std::string_view rest(line);
    std::size_t column = 1;
    for (;;) {
      const auto comma = rest.find(',');
      values.push_back(parse_cell(rest.substr(0, comma), line_no, column));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
      ++column;
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw ParseError(ErrorCode::ParseError, line_no, values.size(),
                       "row " + std::to_string(line_no) + " has " +
                           std::to_string(values.size()) + " columns, expected " +
                           std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyFile, "no data rows");

  const auto width = static_cast<Index>(rows.front().size());
  if (response_column < 0 || response_column >= width) {
    throw ParseError(ErrorCode::ParseError, 1, static_cast<std::size_t>(response_column + 1),
                     "response column " + std::to_string(response_column) +
                         " out of range for " + std::to_string(width) + " columns");
  }
  if (width < 2) {
    throw ParseError(ErrorCode::ParseError, 1, 1, "need at least one predictor column");
  }
  const auto n = static_cast<Index>(rows.size());
  Eigen::MatrixXd x(n, width - 1);
  Eigen::VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    Index out = 0;
    for (Index j = 0; j < width; ++j) {
      if (j == response_column) {
        y[i] = rows[i][j];
      } else {
        x(i, out++) = rows[i][j];
      }
    }
  }
  if (options.expand) x = expand_features(x);
  if (options.intercept) {
    Eigen::MatrixXd with_ones(n, x.cols() + 1);
    with_ones << Eigen::VectorXd::Ones(n), x;
    x = std::move(with_ones);
  }
  return {DesignMatrix(std::move(x)), ResponseVector(std::move(y))};
}

std::pair<DesignMatrix, ResponseVector> load_csv(const std::string& path, Index response_column,
                                                 const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return parse_csv(in, response_column, options);
}

Eigen::MatrixXd expand_features(const Eigen::MatrixXd& x) {
  const Index n = x.rows();
  const Index q = x.cols();
  Eigen::MatrixXd out(n, 2 * q + q * (q - 1) / 2);
  out.leftCols(q) = x;
  out.middleCols(q, q) = x.cwiseAbs2();
  Index col = 2 * q;
  for (Index j = 0; j < q; ++j) {
    for (Index k = j + 1; k < q; ++k) out.col(col++) = x.col(j).cwiseProduct(x.col(k));
  }
  return out;
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_report_csv(const ExperimentReport& report, std::ostream& out) {
  out << "scheme,r,squared_bias,variance,mse,failed\n";
  for (const auto& c : report.cells) {
    out << c.scheme << ',' << c.r << ',' << format_double(c.squared_bias) << ','
        << format_double(c.variance) << ',' << format_double(c.mse) << ','
        << c.failed_replicates << '\n';
  }
}

void write_report_json(const ExperimentReport& report, std::ostream& out, bool include_timing) {
  out << report_to_json(report, include_timing).dump(2) << '\n';
}

void write_report(const ExperimentReport& report, const std::string& path, ReportFormat format,
                  bool include_timing) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  if (format == ReportFormat::CSV) {
    write_report_csv(report, out);
  } else {
    write_report_json(report, out, include_timing);
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, what);
}

json scheme_to_json(const SchemeSpec& s) {
  return {{"kind", scheme_name(s.kind)}, {"lambda", s.slev_lambda}, {"floor", s.floor}};
}

SchemeSpec scheme_from_json(const json& j) {
  SchemeSpec s;
  const std::string name = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
  const auto kind = parse_scheme(name);
  if (!kind) config_error("unknown scheme '" + name + "'");
  s.kind = *kind;
  if (j.is_object()) {
    s.slev_lambda = j.value("lambda", s.slev_lambda);
    s.floor = j.value("floor", s.floor);
  }
  return s;
}

json vector_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
}

json data_to_json(const DataSource& data) {
  return std::visit(
      [](const auto& source) -> json {
        using T = std::decay_t<decltype(source)>;
        if constexpr (std::is_same_v<T, DataSpec>) {
          return {{"dist", distribution_name(source.dist)},
                  {"n", source.n},
                  {"p", source.p},
                  {"seed", source.seed},
                  {"rho", source.rho},
                  {"sigma", source.sigma},
                  {"t_construction", source.t_construction == TConstruction::LocationShift
                                         ? "location_shift"
                                         : "noncentral"}};
        } else if constexpr (std::is_same_v<T, CsvSource>) {
          return {{"csv", source.path},
                  {"response", source.response_column},
                  {"header", source.options.header},
                  {"intercept", source.options.intercept},
                  {"expand", source.options.expand}};
        } else {
          json rows = json::array();
          for (Index i = 0; i < source.x.rows(); ++i) {
            rows.push_back(vector_to_json(source.x.row(i).transpose()));
          }
          return {{"x", rows}, {"y", vector_to_json(source.y)}};
        }
      },
      data);
}

DataSource data_from_json(const json& j) {
  if (j.contains("csv")) {
    CsvSource src;
    src.path = j.at("csv").get<std::string>();
    src.response_column = j.value("response", Index{0});
    src.options.header = j.value("header", false);
    src.options.intercept = j.value("intercept", false);
    src.options.expand = j.value("expand", false);
    return src;
  }
  if (j.contains("x")) {
    FixedDataset fixed;
    const auto& rows = j.at("x");
    const auto n = static_cast<Index>(rows.size());
    const Index p = n > 0 ? static_cast<Index>(rows.at(0).size()) : 0;
    fixed.x.resize(n, p);
    for (Index i = 0; i < n; ++i) {
      if (static_cast<Index>(rows.at(i).size()) != p) config_error("ragged inline design");
      fixed.x.row(i) = vector_from_json(rows.at(i)).transpose();
    }
    fixed.y = vector_from_json(j.at("y"));
    return fixed;
  }
  DataSpec spec;
  const std::string dist = j.value("dist", std::string("mn"));
  const auto parsed = parse_distribution(dist);
  if (!parsed) config_error("unknown distribution '" + dist + "'");
  spec.dist = *parsed;
  spec.n = j.value("n", spec.n);
  spec.p = j.value("p", spec.p);
  spec.seed = j.value("seed", spec.seed);
  spec.rho = j.value("rho", spec.rho);
  spec.sigma = j.value("sigma", spec.sigma);
  const std::string construction = j.value("t_construction", std::string("location_shift"));
  if (construction == "location_shift") {
    spec.t_construction = TConstruction::LocationShift;
  } else if (construction == "noncentral") {
    spec.t_construction = TConstruction::Noncentral;
  } else {
    config_error("unknown t_construction '" + construction + "'");
  }
  return spec;
}

}  // namespace

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["mode"] = mode_name(cfg.mode);
  j["data"] = data_to_json(cfg.data);
  if (cfg.beta0) j["beta0"] = vector_to_json(*cfg.beta0);
  j["schemes"] = json::array();
  for (const auto& s : cfg.schemes) j["schemes"].push_back(scheme_to_json(s));
  j["target"] = target_name(cfg.target);
  j["sample_sizes"] = cfg.sample_sizes;
  j["replicates"] = cfg.replicates;
  j["master_seed"] = cfg.master_seed;
  j["floor"] = cfg.floor;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  try {
    ExperimentConfig cfg;
    const std::string mode = j.value("mode", std::string("conditional"));
    const auto parsed_mode = parse_mode(mode);
    if (!parsed_mode) config_error("unknown mode '" + mode + "'");
    cfg.mode = *parsed_mode;
    if (j.contains("data")) cfg.data = data_from_json(j.at("data"));
    if (j.contains("beta0")) cfg.beta0 = vector_from_json(j.at("beta0"));
    for (const auto& s : j.at("schemes")) cfg.schemes.push_back(scheme_from_json(s));
    const std::string target = j.value("target", std::string("coef"));
    const auto parsed_target = parse_target(target);
    if (!parsed_target) config_error("unknown target '" + target + "'");
    cfg.target = *parsed_target;
    cfg.sample_sizes = j.at("sample_sizes").get<std::vector<std::int64_t>>();
    cfg.replicates = j.value("replicates", cfg.replicates);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.floor = j.value("floor", cfg.floor);
    return cfg;
  } catch (const json::exception& e) {
    config_error(e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  try {
    return config_from_json(json::parse(in));
  } catch (const json::exception& e) {
    config_error(e.what());
  }
}

json report_to_json(const ExperimentReport& report, bool include_timing) {
  json j;
  j["config"] = config_to_json(report.config);
  const Index dimension = report.cells.empty() ? 0 : report.cells.front().dimension;
  j["metadata"] = {
      {"variance_definition", "trace: sum over target coordinates"},
      {"per_coordinate_alternative", "divide squared_bias and variance by target_dimension"},
      {"bias_definition", "squared norm of the mean deviation from the target"},
      {"target_dimension", dimension},
      {"master_seed", report.config.master_seed},
      {"max_redraws", kMaxRedraws},
  };
  j["cells"] = json::array();
  for (const auto& c : report.cells) {
    j["cells"].push_back({{"scheme", c.scheme},
                          {"spec", scheme_to_json(c.spec)},
                          {"r", c.r},
                          {"squared_bias", c.squared_bias},
                          {"variance", c.variance},
                          {"mse", c.mse},
                          {"failed", c.failed_replicates},
                          {"used", c.used_replicates},
                          {"dimension", c.dimension}});
  }
  if (include_timing) j["wall_time_seconds"] = report.wall_time_seconds;
  return j;
}

ExperimentReport report_from_json(const json& j) {
  try {
    ExperimentReport report;
    report.config = config_from_json(j.at("config"));
    for (const auto& c : j.at("cells")) {
      ReportCell cell;
      cell.scheme = c.at("scheme").get<std::string>();
      cell.spec = scheme_from_json(c.at("spec"));
      cell.r = c.at("r").get<std::int64_t>();
      cell.squared_bias = c.at("squared_bias").get<double>();
      cell.variance = c.at("variance").get<double>();
      cell.mse = c.at("mse").get<double>();
      cell.failed_replicates = c.at("failed").get<int>();
      cell.used_replicates = c.at("used").get<int>();
      cell.dimension = c.at("dimension").get<Index>();
      report.cells.push_back(std::move(cell));
    }
    report.wall_time_seconds = j.value("wall_time_seconds", 0.0);
    return report;
  } catch (const json::exception& e) {
    config_error(e.what());
  }
}

void write_dataset_csv(const DesignMatrix& x, const ResponseVector& y, std::ostream& out,
                       bool header) {
  if (header) {
    out << "y";
    for (Index j = 0; j < x.cols(); ++j) out << ",x" << (j + 1);
    out << '\n';
  }
  for (Index i = 0; i < x.rows(); ++i) {
    out << format_double(y.values()[i]);
    for (Index j = 0; j < x.cols(); ++j) out << ',' << format_double(x.values()(i, j));
    out << '\n';
  }
}

}  // namespace levsample
