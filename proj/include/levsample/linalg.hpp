#pragma once

#include <Eigen/Dense>

namespace levsample {

using Index = Eigen::Index;

/// Regression design X (n observations by p predictors). Construction checks
/// n >= p >= 1 and that every entry is finite; rank is checked by the solvers.
class DesignMatrix {
 public:
  explicit DesignMatrix(Eigen::MatrixXd values);

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }

 private:
  Eigen::MatrixXd values_;
};

class ResponseVector {
 public:
  explicit ResponseVector(Eigen::VectorXd values);

  const Eigen::VectorXd& values() const noexcept { return values_; }
  Index size() const noexcept { return values_.size(); }

 private:
  Eigen::VectorXd values_;
};

/// Full-sample least-squares solution and the row statistics derived from it.
///
/// gram_inverse holds (X'X)^{-1} explicitly (O(p^2) memory); it is never used to
/// compute beta_hat, only by the probability and covariance formulas.
struct OlsFit {
  Eigen::VectorXd beta_hat;
  Eigen::VectorXd residuals;
  Eigen::VectorXd leverage;
  double sigma2_hat = 0.0;  // ||e||^2 / (n - p); zero when n == p
  Eigen::MatrixXd gram_inverse;
};

/// Relative threshold on |R_pp| / |R_11| of the pivoted QR factor.
inline constexpr double kRankTolerance = 1e-10;

/// Throws RankDeficient, or DimensionMismatch when Y has the wrong length.
OlsFit ols_fit(const DesignMatrix& x, const ResponseVector& y);

/// h_i = squared row norms of the thin orthogonal factor of X.
Eigen::VectorXd leverage_scores(const DesignMatrix& x);

Eigen::MatrixXd gram_inverse(const DesignMatrix& x);

/// ||(X'X)^{-1} x_i|| for every row.
Eigen::VectorXd gram_inverse_row_norms(const DesignMatrix& x);
Eigen::VectorXd gram_inverse_row_norms(const DesignMatrix& x,
                                       const Eigen::MatrixXd& gram_inv);

/// Euclidean norm of each row. Accepts any finite matrix shape.
Eigen::VectorXd row_norms(const Eigen::MatrixXd& x);

}  // namespace levsample
