#include "levsample/probs.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "levsample/error.hpp"

namespace levsample {

std::string_view scheme_name(SchemeKind kind) noexcept {
  switch (kind) {
    case SchemeKind::UNIF: return "unif";
    case SchemeKind::BLEV: return "blev";
    case SchemeKind::SLEV: return "slev";
    case SchemeKind::IC: return "ic";
    case SchemeKind::RL: return "rl";
    case SchemeKind::PL: return "pl";
    case SchemeKind::ICNLEV: return "icnlev";
    case SchemeKind::RLNLEV: return "rlnlev";
    case SchemeKind::PLNLEV: return "plnlev";
  }
  return "unknown";
}

std::optional<SchemeKind> parse_scheme(std::string_view name) noexcept {
  std::string lower(name);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "alev") return SchemeKind::BLEV;
  for (SchemeKind kind : kAllSchemes) {
    if (scheme_name(kind) == lower) return kind;
  }
  return std::nullopt;
}

namespace {

Eigen::VectorXd negative_leverage_factor(const Eigen::VectorXd& h) {
  return (1.0 - h.array()).max(0.0).sqrt().matrix();
}

}  // namespace

Eigen::VectorXd scheme_scores(const DesignMatrix& x, const OlsFit& fit,
                              const SchemeSpec& spec) {
  const Index n = x.rows();
  const Eigen::VectorXd& h = fit.leverage;
  switch (spec.kind) {
    case SchemeKind::UNIF:
      return Eigen::VectorXd::Ones(n);
    case SchemeKind::BLEV:
      return h.cwiseMax(0.0);
    case SchemeKind::SLEV: {
      const double lambda = spec.slev_lambda;
      return (lambda * h.cwiseMax(0.0) / h.sum()).array() + (1.0 - lambda) / n;
    }
    case SchemeKind::IC:
      return gram_inverse_row_norms(x, fit.gram_inverse);
    case SchemeKind::RL:
      return h.cwiseMax(0.0).cwiseSqrt();
    case SchemeKind::PL:
      return row_norms(x.values());
    case SchemeKind::ICNLEV:
      return gram_inverse_row_norms(x, fit.gram_inverse).cwiseProduct(
          negative_leverage_factor(h));
    case SchemeKind::RLNLEV:
      return h.cwiseMax(0.0).cwiseSqrt().cwiseProduct(negative_leverage_factor(h));
    case SchemeKind::PLNLEV:
      return row_norms(x.values()).cwiseProduct(negative_leverage_factor(h));
  }
  throw Error(ErrorCode::InvalidSpec, "unknown scheme");
}

Eigen::VectorXd apply_floor(Eigen::VectorXd pi, double floor) {
  const Index n = pi.size();
  if (floor <= 0.0 || n == 0) return pi;
  const double lower = floor / static_cast<double>(n);
  std::vector<bool> clamped(static_cast<std::size_t>(n), false);
  Index num_clamped = 0;
  // Water-filling: clamp, rescale the rest, repeat until nothing new drops
  // below the bound. Terminates in at most n passes.
  for (;;) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      if (!clamped[i] && pi[i] < lower) {
        clamped[i] = true;
        ++num_clamped;
        changed = true;
      }
    }
    if (num_clamped == n) return Eigen::VectorXd::Constant(n, 1.0 / n);
    double free_sum = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (!clamped[i]) free_sum += pi[i];
    }
    const double scale = (1.0 - num_clamped * lower) / free_sum;
    for (Index i = 0; i < n; ++i) pi[i] = clamped[i] ? lower : pi[i] * scale;
    if (!changed) return pi;
  }
}

ProbabilityVector build_probs(const DesignMatrix& x, const OlsFit& fit,
                              const SchemeSpec& spec) {
  const Index n = x.rows();
  if (fit.leverage.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "fit does not belong to this design");
  }
  if (spec.kind == SchemeKind::SLEV && !(spec.slev_lambda > 0.0 && spec.slev_lambda < 1.0)) {
    throw Error(ErrorCode::InvalidLambda,
                "SLEV lambda must lie in (0, 1), got " + std::to_string(spec.slev_lambda));
  }
  if (!(spec.floor >= 0.0 && spec.floor < 1.0)) {
    throw Error(ErrorCode::InvalidFloor,
                "floor must lie in [0, 1), got " + std::to_string(spec.floor));
  }

  Eigen::VectorXd scores = scheme_scores(x, fit, spec);
  const double total = scores.sum();
  ProbabilityVector out{Eigen::VectorXd::Zero(n), spec};
  if (!(total > 0.0)) {
    if (spec.floor == 0.0) {
      throw Error(ErrorCode::DegenerateScheme,
                  std::string("all ") + std::string(scheme_name(spec.kind)) +
                      " scores are zero; set a probability floor");
    }
    out.pi = Eigen::VectorXd::Constant(n, 1.0 / n);
    return out;
  }
  out.pi = apply_floor(scores / total, spec.floor);
  return out;
}

std::vector<ShrinkageRow> shrinkage_report(const DesignMatrix& x, const OlsFit& fit,
                                           double slev_lambda) {
  const Index n = x.rows();
  const double p_over_n = static_cast<double>(x.cols()) / static_cast<double>(n);
  std::vector<ShrinkageRow> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double h = std::clamp(fit.leverage[i], 0.0, 1.0);
    rows.push_back({h, h, std::sqrt(h), std::sqrt((1.0 - h) * h),
                    slev_lambda * h + (1.0 - slev_lambda) * p_over_n});
  }
  return rows;
}

}  // namespace levsample
