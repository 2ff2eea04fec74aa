#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "levsample/asymptotics.hpp"
#include "levsample/datagen.hpp"
#include "levsample/linalg.hpp"
#include "levsample/probs.hpp"

namespace levsample {

struct CsvOptions {
  bool header = false;     // skip the first line
  bool intercept = false;  // prepend a column of ones to X
  bool expand = false;     // append squares and pairwise products of the predictors

  bool operator==(const CsvOptions&) const = default;
};

struct CsvSource {
  std::string path;
  Index response_column = 0;
  CsvOptions options;

  bool operator==(const CsvSource&) const = default;
};

/// Data held in memory; serialized inline in configs.
struct FixedDataset {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

using DataSource = std::variant<DataSpec, CsvSource, FixedDataset>;

struct ExperimentConfig {
  InferenceMode mode = InferenceMode::CONDITIONAL;
  DataSource data = DataSpec{};
  // Model coefficients for synthetic responses; default_beta0(p) when unset.
  std::optional<Eigen::VectorXd> beta0;
  std::vector<SchemeSpec> schemes;
  TargetKind target = TargetKind::COEF;
  std::vector<std::int64_t> sample_sizes;
  int replicates = 100;
  std::uint64_t master_seed = 0;
  // Lower bound on every scheme's floor.
  double floor = 0.0;
};

struct RunOptions {
  int threads = 1;  // 0 = one per hardware thread
};

/// Bias and variance are sums over the coordinates of the target vector
/// (p for COEF/GRAM, n for FIT): the trace of the empirical covariance.
struct ReportCell {
  std::string scheme;
  SchemeSpec spec;
  std::int64_t r = 0;
  double squared_bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;
  int failed_replicates = 0;
  int used_replicates = 0;
  Index dimension = 0;

  bool operator==(const ReportCell&) const = default;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ReportCell> cells;  // schemes outer, sample sizes inner
  double wall_time_seconds = 0.0;
};

inline constexpr int kMaxRedraws = 100;

/// Throws InvalidConfig on B < 2, empty or non-positive sample sizes, and
/// unconditional runs on data that cannot be regenerated.
void validate(const ExperimentConfig& cfg);

/// Seed of the subsample drawn for (scheme, size, replicate, attempt).
std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t scheme_index,
                             std::size_t size_index, int replicate, int attempt) noexcept;

/// Seed of the synthetic dataset for one unconditional replicate.
std::uint64_t replicate_data_seed(std::uint64_t data_seed, int replicate) noexcept;

/// Response seed used for a synthetic dataset generated from `data_seed`.
std::uint64_t response_seed(std::uint64_t data_seed) noexcept;

/// Monte Carlo squared bias and variance per (scheme, sample size).
///
/// UNCONDITIONAL: each replicate b draws a fresh (X_b, Y_b) and one subsample
/// per cell; deviations L_b (beta_tilde - beta0) with L_b = I, X_b or X_b'X_b.
/// CONDITIONAL: one fixed (X, Y); B subsamples per cell, deviations
/// L (beta_tilde - beta_hat). Singular subsamples are redrawn up to
/// kMaxRedraws times, then the replicate is counted as failed. Replicates are
/// reduced in index order, so the report does not depend on `threads`.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

}  // namespace levsample
