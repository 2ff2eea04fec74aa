#pragma once

#include <span>

namespace levsample {

double normal_cdf(double x) noexcept;

/// Standard normal quantile.
///
/// Acklam's rational approximation (relative error below 1.15e-9 on (0, 1))
/// followed by one Halley correction step against erfc, which brings the
/// result to near machine precision. Returns +-infinity at 0 and 1, NaN
/// outside [0, 1].
double normal_quantile(double p) noexcept;

struct KsResult {
  double statistic = 0.0;  // sup |F_n - Phi|
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against N(0, 1). The p-value uses the
/// asymptotic Kolmogorov distribution with Stephens' small-sample correction.
KsResult ks_test_standard_normal(std::span<const double> sample);

/// P(K > t) for the Kolmogorov distribution.
double kolmogorov_survival(double t) noexcept;

}  // namespace levsample
