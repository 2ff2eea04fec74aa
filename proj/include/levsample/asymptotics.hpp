#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "levsample/linalg.hpp"
#include "levsample/probs.hpp"
#include "levsample/sampler.hpp"

namespace levsample {

/// UNCONDITIONAL targets the model coefficients over data and sampling noise;
/// CONDITIONAL targets the full-sample OLS solution over sampling noise only.
enum class InferenceMode { UNCONDITIONAL, CONDITIONAL };

/// What is being estimated: beta itself, X beta, or X'X beta.
enum class TargetKind { COEF, FIT, GRAM };

std::string_view mode_name(InferenceMode mode) noexcept;
std::string_view target_name(TargetKind target) noexcept;
std::optional<InferenceMode> parse_mode(std::string_view name) noexcept;
std::optional<TargetKind> parse_target(std::string_view name) noexcept;

struct AsymptoticCovariance {
  Eigen::MatrixXd matrix;
  InferenceMode mode = InferenceMode::UNCONDITIONAL;
};

/// Per-row quantities shared by every AMSE/EAMSE evaluation on one design.
struct DesignStatistics {
  Eigen::VectorXd leverage;      // h_i
  Eigen::VectorXd ic_norm_sq;    // ||(X'X)^{-1} x_i||^2
  Eigen::VectorXd row_norm_sq;   // ||x_i||^2
  double trace_gram_inverse = 0.0;
  double trace_gram = 0.0;
  Index p = 0;
};

DesignStatistics design_statistics(const DesignMatrix& x, const OlsFit& fit);
DesignStatistics design_statistics(const DesignMatrix& x);

/// sigma2 [ (X'X)^{-1} + (X'X)^{-1} X' Omega X (X'X)^{-1} ], Omega = diag(1/(r pi_i)).
/// Throws ZeroProbability if some pi_i == 0, RankDeficient for a singular design.
AsymptoticCovariance sigma0(const DesignMatrix& x, const Eigen::VectorXd& pi, std::int64_t r,
                            double sigma2);

/// (1/r) (X'X)^{-1} (sum_i e_i^2 / pi_i x_i x_i') (X'X)^{-1}.
///
/// The squared residuals already carry the noise scale, so this matrix is the
/// conditional covariance of the subsample estimate around the OLS solution
/// without a further sigma^2 factor.
AsymptoticCovariance sigma_c(const DesignMatrix& x, const Eigen::VectorXd& residuals,
                             const Eigen::VectorXd& pi, std::int64_t r);

/// Closed-form AMSE of the target under unconditional inference.
double amse(const DesignStatistics& stats, const Eigen::VectorXd& pi, std::int64_t r,
            double sigma2, TargetKind target);
double amse(const DesignMatrix& x, const Eigen::VectorXd& pi, std::int64_t r, double sigma2,
            TargetKind target);

/// (1/r) sum_i (1 - h_i) sigma2 / pi_i * s_i with s_i chosen by the target.
double eamse(const DesignStatistics& stats, const Eigen::VectorXd& pi, std::int64_t r,
             double sigma2, TargetKind target);
/// Uses fit.sigma2_hat unless sigma2_override is given.
double eamse(const DesignMatrix& x, const OlsFit& fit, const Eigen::VectorXd& pi,
             std::int64_t r, TargetKind target,
             std::optional<double> sigma2_override = std::nullopt);

/// Scheme whose probabilities minimize the objective for (target, mode).
SchemeKind optimal_scheme(TargetKind target, InferenceMode mode) noexcept;

struct OptimalityReport {
  SchemeKind scheme = SchemeKind::UNIF;
  double optimal_objective = 0.0;
  double min_perturbed_objective = 0.0;
  double min_gap = 0.0;  // min over trials of (perturbed - optimal)
  int trials = 0;
  int strict_wins = 0;   // trials with perturbed > optimal
  bool optimal_dominates = false;
};

/// Compares the objective at the closed-form optimum with `trials` random
/// points pi = (1 - t) pi_opt + t u, u ~ Dirichlet(1, ..., 1), t ~ U(0, 1).
OptimalityReport optimal_probs_verify(const DesignMatrix& x, const OlsFit& fit, std::int64_t r,
                                      double sigma2, TargetKind target, InferenceMode mode,
                                      int trials, std::uint64_t seed);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// beta_j +- z_{(1+level)/2} sqrt(cov_jj). Throws InvalidLevel unless 0 < level < 1.
std::vector<Interval> confidence_intervals(const SubsampleEstimate& estimate,
                                           const AsymptoticCovariance& cov, double level);

struct RegularityDiagnostics {
  double lambda_min = 0.0;  // eigenvalues of X'X / n
  double lambda_max = 0.0;
  double pi_min = 0.0;
  double pi_max = 0.0;
  double r_over_n = 0.0;
  std::vector<std::string> flags;
};

RegularityDiagnostics check_regularity(const DesignMatrix& x, const Eigen::VectorXd& pi,
                                       std::int64_t r);

}  // namespace levsample
