#include "levsample/datagen.hpp"

#include <cmath>
#include <string>

#include "levsample/error.hpp"
#include "levsample/rng.hpp"

namespace levsample {

std::string_view distribution_name(Distribution dist) noexcept {
  switch (dist) {
    case Distribution::MN: return "mn";
    case Distribution::T3: return "t3";
    case Distribution::LN: return "ln";
    case Distribution::T1: return "t1";
  }
  return "unknown";
}

std::optional<Distribution> parse_distribution(std::string_view name) noexcept {
  for (Distribution d : {Distribution::MN, Distribution::T3, Distribution::LN, Distribution::T1}) {
    if (distribution_name(d) == name) return d;
  }
  return std::nullopt;
}

void validate(const DataSpec& spec) {
  if (spec.p < 1 || spec.n <= spec.p) {
    throw Error(ErrorCode::InvalidSpec, "need n > p >= 1, got n=" + std::to_string(spec.n) +
                                            " p=" + std::to_string(spec.p));
  }
  if (!(std::abs(spec.rho) < 1.0)) {
    throw Error(ErrorCode::InvalidSpec, "rho must lie in (-1, 1)");
  }
  if (!(spec.sigma > 0.0)) throw Error(ErrorCode::InvalidSpec, "sigma must be positive");
}

namespace {

Eigen::MatrixXd ar1_cholesky(Index p, double rho) {
  Eigen::MatrixXd d(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) d(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
  }
  return Eigen::LLT<Eigen::MatrixXd>(d).matrixL();
}

int degrees_of_freedom(Distribution dist) {
  return dist == Distribution::T3 ? 3 : 1;
}

}  // namespace

DesignMatrix gen_design(const DataSpec& spec) {
  validate(spec);
  const Index n = spec.n;
  const Index p = spec.p;
  const Eigen::MatrixXd lower = ar1_cholesky(p, spec.rho);

  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd z(p);
  for (Index i = 0; i < n; ++i) {
    GaussianSource gauss(derive_seed(spec.seed, {static_cast<std::uint64_t>(Stream::Design),
                                                 static_cast<std::uint64_t>(i)}));
    for (Index j = 0; j < p; ++j) z[j] = gauss();
    const Eigen::VectorXd correlated = lower * z;

    switch (spec.dist) {
      case Distribution::MN:
        x.row(i) = (correlated.array() + 1.0).matrix().transpose();
        break;
      case Distribution::LN:
        x.row(i) = (correlated.array() + 1.0).exp().matrix().transpose();
        break;
      case Distribution::T3:
      case Distribution::T1: {
        const int nu = degrees_of_freedom(spec.dist);
        double chi2 = 0.0;
        for (int k = 0; k < nu; ++k) {
          const double g = gauss();
          chi2 += g * g;
        }
        const double scale = 1.0 / std::sqrt(chi2 / nu);
        if (spec.t_construction == TConstruction::LocationShift) {
          x.row(i) = (correlated.array() * scale + 1.0).matrix().transpose();
        } else {
          x.row(i) = ((correlated.array() + 1.0) * scale).matrix().transpose();
        }
        break;
      }
    }
  }
  return DesignMatrix(std::move(x));
}

Eigen::VectorXd default_beta0(Index p) {
  if (p < 4) {
    throw Error(ErrorCode::TooSmall, "default coefficients need p >= 4, got " + std::to_string(p));
  }
  Eigen::VectorXd beta = Eigen::VectorXd::Constant(p, 0.1);
  beta[0] = beta[1] = beta[p - 2] = beta[p - 1] = 1.0;
  return beta;
}

ResponseVector gen_response(const DesignMatrix& x, const Eigen::VectorXd& beta0, double sigma,
                            std::uint64_t seed) {
  if (beta0.size() != x.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "beta0 has " + std::to_string(beta0.size()) + " entries for " +
                    std::to_string(x.cols()) + " predictors");
  }
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidSpec, "sigma must be nonnegative");
  Eigen::VectorXd y = x.values() * beta0;
  if (sigma > 0.0) {
    GaussianSource gauss(derive_seed(seed, {static_cast<std::uint64_t>(Stream::Response)}));
    for (Index i = 0; i < y.size(); ++i) y[i] += sigma * gauss();
  }
  return ResponseVector(std::move(y));
}

}  // namespace levsample
