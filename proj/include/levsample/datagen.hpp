#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string_view>

#include "levsample/linalg.hpp"

namespace levsample {

/// Synthetic predictor families: multivariate normal, multivariate t with 3
/// or 1 degrees of freedom, and entrywise log-normal. All share the location
/// vector of ones and the scale matrix D_ij = rho^|i-j|.
enum class Distribution { MN, T3, LN, T1 };

/// How the t families place the location:
///  LocationShift: 1 + Z / sqrt(S / nu)      (multivariate t shifted to 1)
///  Noncentral:    (1 + Z) / sqrt(S / nu)    (noncentral t, shift before scaling)
/// with Z ~ N(0, D) and S ~ chi^2_nu shared across a row.
enum class TConstruction { LocationShift, Noncentral };

std::string_view distribution_name(Distribution dist) noexcept;
std::optional<Distribution> parse_distribution(std::string_view name) noexcept;

struct DataSpec {
  Distribution dist = Distribution::MN;
  Index n = 5000;
  Index p = 10;
  std::uint64_t seed = 0;
  double rho = 0.7;
  double sigma = 1.0;
  TConstruction t_construction = TConstruction::LocationShift;

  bool operator==(const DataSpec&) const = default;
};

/// Throws InvalidSpec unless n > p >= 1, |rho| < 1 and sigma > 0.
void validate(const DataSpec& spec);

/// Row i is drawn from its own stream derived from (seed, i), so the result
/// does not depend on generation order.
DesignMatrix gen_design(const DataSpec& spec);

/// 1 for entries 1, 2, p-1, p and 0.1 elsewhere. Throws TooSmall if p < 4.
Eigen::VectorXd default_beta0(Index p);

/// Y = X beta0 + eps, eps_i iid N(0, sigma^2). Throws DimensionMismatch.
ResponseVector gen_response(const DesignMatrix& x, const Eigen::VectorXd& beta0, double sigma,
                            std::uint64_t seed);

}  // namespace levsample
