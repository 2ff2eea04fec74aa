#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "levsample/linalg.hpp"

namespace levsample {

enum class SchemeKind { UNIF, BLEV, SLEV, IC, RL, PL, ICNLEV, RLNLEV, PLNLEV };

inline constexpr std::array<SchemeKind, 9> kAllSchemes = {
    SchemeKind::UNIF, SchemeKind::BLEV, SchemeKind::SLEV,
    SchemeKind::IC,   SchemeKind::RL,   SchemeKind::PL,
    SchemeKind::ICNLEV, SchemeKind::RLNLEV, SchemeKind::PLNLEV};

/// Lower-case name used on the command line and in reports ("icnlev").
std::string_view scheme_name(SchemeKind kind) noexcept;
std::optional<SchemeKind> parse_scheme(std::string_view name) noexcept;

struct SchemeSpec {
  SchemeKind kind = SchemeKind::UNIF;
  double slev_lambda = 0.9;
  // Minimum probability as a fraction of 1/n, in [0, 1).
  double floor = 0.0;

  bool operator==(const SchemeSpec&) const = default;
};

struct ProbabilityVector {
  Eigen::VectorXd pi;
  SchemeSpec scheme;
};

/// Unnormalized scores for a scheme (the numerators of the probabilities).
Eigen::VectorXd scheme_scores(const DesignMatrix& x, const OlsFit& fit,
                              const SchemeSpec& spec);

/// Sampling distribution for the given scheme.
///
/// Scores are divided by their sum. With floor > 0, entries below floor/n are
/// raised to exactly floor/n and the remaining mass is rescaled to keep the
/// total at one; floored vectors therefore deviate from the plain formulas.
///
/// Throws DegenerateScheme when every score is zero and floor == 0,
/// InvalidLambda for SLEV with lambda outside (0, 1), InvalidFloor for a floor
/// outside [0, 1).
ProbabilityVector build_probs(const DesignMatrix& x, const OlsFit& fit,
                              const SchemeSpec& spec);

/// Raise entries of a probability vector to at least floor/n.
Eigen::VectorXd apply_floor(Eigen::VectorXd pi, double floor);

struct ShrinkageRow {
  double leverage;
  double blev_score;
  double rl_score;
  double rlnlev_score;
  double slev_score;  // lambda h + (1 - lambda) p / n
};

std::vector<ShrinkageRow> shrinkage_report(const DesignMatrix& x, const OlsFit& fit,
                                           double slev_lambda = 0.9);

}  // namespace levsample
