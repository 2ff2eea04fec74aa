#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <json.hpp>
#include <string>
#include <utility>

#include "levsample/harness.hpp"
#include "levsample/linalg.hpp"

namespace levsample {

/// Parse comma-separated numeric rows. Column `response_column` becomes Y and
/// the remaining columns form X in file order.
///
/// Throws EmptyFile, NonNumeric (a ParseError naming the offending cell),
/// ParseError for ragged rows or a bad response column, IoError if unreadable.
std::pair<DesignMatrix, ResponseVector> load_csv(const std::string& path, Index response_column,
                                                 const CsvOptions& options = {});
std::pair<DesignMatrix, ResponseVector> parse_csv(std::istream& in, Index response_column,
                                                  const CsvOptions& options = {});

/// [X, X.^2, x_j x_k for j < k]: 4 predictors become 14.
Eigen::MatrixXd expand_features(const Eigen::MatrixXd& x);

/// %.17g: round-trips every double exactly.
std::string format_double(double value);

enum class ReportFormat { CSV, JSON };

/// CSV columns: scheme,r,squared_bias,variance,mse,failed.
void write_report_csv(const ExperimentReport& report, std::ostream& out);
void write_report_json(const ExperimentReport& report, std::ostream& out,
                       bool include_timing = false);
/// Throws IoError when the file cannot be written.
void write_report(const ExperimentReport& report, const std::string& path, ReportFormat format,
                  bool include_timing = false);

nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Throws InvalidConfig on unknown names or missing fields.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

nlohmann::json report_to_json(const ExperimentReport& report, bool include_timing = false);
ExperimentReport report_from_json(const nlohmann::json& j);

/// Writes Y in column 0 followed by the predictors, optionally with a header.
void write_dataset_csv(const DesignMatrix& x, const ResponseVector& y, std::ostream& out,
                       bool header = true);

}  // namespace levsample
