#include "levsample/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levsample/error.hpp"
#include "levsample/rng.hpp"
#include "levsample/stats.hpp"

namespace levsample {

std::string_view mode_name(InferenceMode mode) noexcept {
  return mode == InferenceMode::UNCONDITIONAL ? "unconditional" : "conditional";
}

std::string_view target_name(TargetKind target) noexcept {
  switch (target) {
    case TargetKind::COEF: return "coef";
    case TargetKind::FIT: return "fit";
    case TargetKind::GRAM: return "gram";
  }
  return "unknown";
}

std::optional<InferenceMode> parse_mode(std::string_view name) noexcept {
  if (name == "unconditional") return InferenceMode::UNCONDITIONAL;
  if (name == "conditional") return InferenceMode::CONDITIONAL;
  return std::nullopt;
}

std::optional<TargetKind> parse_target(std::string_view name) noexcept {
  if (name == "coef") return TargetKind::COEF;
  if (name == "fit") return TargetKind::FIT;
  if (name == "gram") return TargetKind::GRAM;
  return std::nullopt;
}

namespace {

void require_positive(const Eigen::VectorXd& pi, Index n) {
  if (pi.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "probability vector length differs from n");
  }
  for (Index i = 0; i < n; ++i) {
    if (!(pi[i] > 0.0)) {
      throw Error(ErrorCode::ZeroProbability,
                  "pi_" + std::to_string(i) + " = " + std::to_string(pi[i]));
    }
  }
}

void require_size(std::int64_t r) {
  if (r < 1) throw Error(ErrorCode::InvalidSize, "subsample size must be >= 1");
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

DesignStatistics design_statistics(const DesignMatrix& x, const OlsFit& fit) {
  DesignStatistics s;
  s.leverage = fit.leverage;
  s.ic_norm_sq = (x.values() * fit.gram_inverse).rowwise().squaredNorm();
  s.row_norm_sq = x.values().rowwise().squaredNorm();
  s.trace_gram_inverse = fit.gram_inverse.trace();
  s.trace_gram = x.values().squaredNorm();
  s.p = x.cols();
  return s;
}

DesignStatistics design_statistics(const DesignMatrix& x) {
  OlsFit fit;
  fit.gram_inverse = gram_inverse(x);
  fit.leverage = leverage_scores(x);
  return design_statistics(x, fit);
}

AsymptoticCovariance sigma0(const DesignMatrix& x, const Eigen::VectorXd& pi, std::int64_t r,
                            double sigma2) {
  require_size(r);
  require_positive(pi, x.rows());
  const Eigen::MatrixXd g = gram_inverse(x);
  const Eigen::VectorXd omega = (static_cast<double>(r) * pi).cwiseInverse();
  const Eigen::MatrixXd meat = x.values().transpose() * omega.asDiagonal() * x.values();
  return {symmetrized(sigma2 * (g + g * meat * g)), InferenceMode::UNCONDITIONAL};
}

AsymptoticCovariance sigma_c(const DesignMatrix& x, const Eigen::VectorXd& residuals,
                             const Eigen::VectorXd& pi, std::int64_t r) {
  require_size(r);
  require_positive(pi, x.rows());
  if (residuals.size() != x.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "residual vector length differs from n");
  }
  const Eigen::MatrixXd g = gram_inverse(x);
  const Eigen::VectorXd weights = residuals.cwiseAbs2().cwiseQuotient(pi);
  const Eigen::MatrixXd meat = x.values().transpose() * weights.asDiagonal() * x.values();
  return {symmetrized(g * meat * g / static_cast<double>(r)), InferenceMode::CONDITIONAL};
}

namespace {

const Eigen::VectorXd& target_row_weights(const DesignStatistics& s, TargetKind target) {
  switch (target) {
    case TargetKind::COEF: return s.ic_norm_sq;
    case TargetKind::FIT: return s.leverage;
    case TargetKind::GRAM: return s.row_norm_sq;
  }
  return s.ic_norm_sq;
}

}  // namespace

double amse(const DesignStatistics& stats, const Eigen::VectorXd& pi, std::int64_t r,
            double sigma2, TargetKind target) {
  require_size(r);
  require_positive(pi, stats.leverage.size());
  double full_sample = 0.0;
  switch (target) {
    case TargetKind::COEF: full_sample = stats.trace_gram_inverse; break;
    case TargetKind::FIT: full_sample = static_cast<double>(stats.p); break;
    case TargetKind::GRAM: full_sample = stats.trace_gram; break;
  }
  const double sampling = target_row_weights(stats, target).cwiseQuotient(pi).sum();
  return sigma2 * full_sample + sigma2 * sampling / static_cast<double>(r);
}

double amse(const DesignMatrix& x, const Eigen::VectorXd& pi, std::int64_t r, double sigma2,
            TargetKind target) {
  return amse(design_statistics(x), pi, r, sigma2, target);
}

double eamse(const DesignStatistics& stats, const Eigen::VectorXd& pi, std::int64_t r,
             double sigma2, TargetKind target) {
  require_size(r);
  require_positive(pi, stats.leverage.size());
  const Eigen::ArrayXd residual_share = (1.0 - stats.leverage.array()).max(0.0);
  const double total =
      (residual_share * target_row_weights(stats, target).array() / pi.array()).sum();
  return sigma2 * total / static_cast<double>(r);
}

double eamse(const DesignMatrix& x, const OlsFit& fit, const Eigen::VectorXd& pi,
             std::int64_t r, TargetKind target, std::optional<double> sigma2_override) {
  return eamse(design_statistics(x, fit), pi, r, sigma2_override.value_or(fit.sigma2_hat),
               target);
}

SchemeKind optimal_scheme(TargetKind target, InferenceMode mode) noexcept {
  const bool conditional = mode == InferenceMode::CONDITIONAL;
  switch (target) {
    case TargetKind::COEF: return conditional ? SchemeKind::ICNLEV : SchemeKind::IC;
    case TargetKind::FIT: return conditional ? SchemeKind::RLNLEV : SchemeKind::RL;
    case TargetKind::GRAM: return conditional ? SchemeKind::PLNLEV : SchemeKind::PL;
  }
  return SchemeKind::UNIF;
}

OptimalityReport optimal_probs_verify(const DesignMatrix& x, const OlsFit& fit, std::int64_t r,
                                      double sigma2, TargetKind target, InferenceMode mode,
                                      int trials, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::InvalidSize, "trials must be >= 1");
  const DesignStatistics stats = design_statistics(x, fit);
  const auto objective = [&](const Eigen::VectorXd& pi) {
    return mode == InferenceMode::UNCONDITIONAL ? amse(stats, pi, r, sigma2, target)
                                                : eamse(stats, pi, r, sigma2, target);
  };

  OptimalityReport report;
  report.scheme = optimal_scheme(target, mode);
  const Eigen::VectorXd best = build_probs(x, fit, {report.scheme}).pi;
  report.optimal_objective = objective(best);
  report.min_perturbed_objective = std::numeric_limits<double>::infinity();
  report.min_gap = std::numeric_limits<double>::infinity();
  report.trials = trials;

  const Index n = x.rows();
  Eigen::VectorXd u(n);
  // Rounding slack for "optimal <= perturbed".
  const double tolerance = 1e-12 * std::abs(report.optimal_objective);
  bool dominates = true;
  for (int t = 0; t < trials; ++t) {
    Xoshiro256 rng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::Perturbation),
                                      static_cast<std::uint64_t>(t)}));
    for (Index i = 0; i < n; ++i) u[i] = -std::log(uniform_open(rng));
    u /= u.sum();
    const double mix = uniform_open(rng);
    const Eigen::VectorXd pi = (1.0 - mix) * best + mix * u;
    const double value = objective(pi);
    const double gap = value - report.optimal_objective;
    report.min_perturbed_objective = std::min(report.min_perturbed_objective, value);
    report.min_gap = std::min(report.min_gap, gap);
    if (gap > 0.0) ++report.strict_wins;
    if (gap < -tolerance) dominates = false;
  }
  report.optimal_dominates = dominates;
  return report;
}

std::vector<Interval> confidence_intervals(const SubsampleEstimate& estimate,
                                           const AsymptoticCovariance& cov, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::InvalidLevel, "level must lie in (0, 1), got " + std::to_string(level));
  }
  const Index p = estimate.beta_tilde.size();
  if (cov.matrix.rows() != p || cov.matrix.cols() != p) {
    throw Error(ErrorCode::DimensionMismatch, "covariance does not match estimate dimension");
  }
  const double z = normal_quantile(0.5 * (1.0 + level));
  std::vector<Interval> out;
  out.reserve(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    const double half = z * std::sqrt(std::max(cov.matrix(j, j), 0.0));
    out.push_back({estimate.beta_tilde[j] - half, estimate.beta_tilde[j] + half});
  }
  return out;
}

RegularityDiagnostics check_regularity(const DesignMatrix& x, const Eigen::VectorXd& pi,
                                       std::int64_t r) {
  if (pi.size() != x.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "probability vector length differs from n");
  }
  const auto n = static_cast<double>(x.rows());
  const Eigen::MatrixXd scaled_gram = x.values().transpose() * x.values() / n;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled_gram,
                                                           Eigen::EigenvaluesOnly);
  RegularityDiagnostics d;
  d.lambda_min = eig.eigenvalues().minCoeff();
  d.lambda_max = eig.eigenvalues().maxCoeff();
  d.pi_min = pi.minCoeff();
  d.pi_max = pi.maxCoeff();
  d.r_over_n = static_cast<double>(r) / n;

  if (!(d.pi_min > 0.0)) d.flags.emplace_back("NonzeroProbability");
  // Heuristic proxy: the minimum probability should not be small next to 1/(r n).
  else if (d.pi_min * static_cast<double>(r) * n < 1.0) d.flags.emplace_back("SmallMinProbability");
  if (!(d.lambda_min > 1e-12 * d.lambda_max)) d.flags.emplace_back("IllConditionedDesign");
  if (r > x.rows()) d.flags.emplace_back("SampleExceedsData");
  return d;
}

}  // namespace levsample
