#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "levsample/linalg.hpp"
#include "levsample/probs.hpp"

namespace levsample {

/// Row multiplicities K_i of one with-replacement draw of r rows.
struct SubsampleDraw {
  std::vector<std::int64_t> counts;
  std::int64_t r = 0;
  std::uint64_t seed = 0;

  Index distinct_rows() const noexcept;
};

struct SubsampleEstimate {
  Eigen::VectorXd beta_tilde;
  SubsampleDraw draw;
  SchemeSpec scheme;
};

/// Walker/Vose alias table over a finite distribution; O(1) per draw.
class AliasTable {
 public:
  explicit AliasTable(const Eigen::VectorXd& pi);
  Index sample(double u_column, double u_coin) const noexcept;

 private:
  std::vector<double> accept_;
  std::vector<Index> alias_;
};

/// Multinomial(r, pi) counts from r independent categorical draws.
///
/// The draws come from a Xoshiro256 stream seeded with `seed`. When r >= n an
/// alias table is used, otherwise a binary search over the cumulative sums;
/// both are exact and the choice depends only on (n, r). Throws InvalidSize
/// for r < 1.
SubsampleDraw draw_subsample(const Eigen::VectorXd& pi, std::int64_t r, std::uint64_t seed);
SubsampleDraw draw_subsample(const ProbabilityVector& pi, std::int64_t r, std::uint64_t seed);

/// Weighted subsample least squares: each drawn row enters once, scaled by
/// sqrt(K_i / (r pi_i)), and the scaled problem is solved by pivoted QR.
/// Throws SingularSubsample when the scaled rows are rank deficient.
SubsampleEstimate weighted_ls(const DesignMatrix& x, const ResponseVector& y,
                              const SubsampleDraw& draw, const ProbabilityVector& pi);

/// (X'WX)^{-1} X'WY with W = diag(K_i / (r pi_i)) over all n rows, solved by
/// LDL'. Kept as an independent route to the same estimate.
SubsampleEstimate weighted_ls_matrix_form(const DesignMatrix& x, const ResponseVector& y,
                                          const SubsampleDraw& draw,
                                          const ProbabilityVector& pi);

/// Exact Multinomial(r, pi) probability of the given counts.
double multinomial_pmf(std::span<const std::int64_t> counts, const Eigen::VectorXd& pi);

}  // namespace levsample
