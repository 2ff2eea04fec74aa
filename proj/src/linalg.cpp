#include "levsample/linalg.hpp"

#include <string>
#include <utility>

#include "levsample/error.hpp"
#include "qr_util.hpp"

namespace levsample {

namespace {

using Qr = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>;

Eigen::MatrixXd thin_q(const Qr& qr, Index n, Index p) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, p);
  q.applyOnTheLeft(qr.householderQ());
  return q;
}

// X P = Q R  =>  (X'X)^{-1} = P R^{-1} R^{-T} P'
Eigen::MatrixXd gram_inverse_from_qr(const Qr& qr, Index p) {
  const Eigen::MatrixXd r_inv =
      qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>().solve(
          Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd permuted = r_inv * r_inv.transpose();
  Eigen::MatrixXd g = qr.colsPermutation() * permuted * qr.colsPermutation().transpose();
  return 0.5 * (g + g.transpose());
}

}  // namespace

DesignMatrix::DesignMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.cols() < 1 || values_.rows() < values_.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "design must satisfy n >= p >= 1, got " + std::to_string(values_.rows()) +
                    "x" + std::to_string(values_.cols()));
  }
  if (!values_.allFinite()) {
    throw Error(ErrorCode::InvalidSpec, "design contains non-finite entries");
  }
}

ResponseVector::ResponseVector(Eigen::VectorXd values) : values_(std::move(values)) {
  if (!values_.allFinite()) {
    throw Error(ErrorCode::InvalidSpec, "response contains non-finite entries");
  }
}

OlsFit ols_fit(const DesignMatrix& x, const ResponseVector& y) {
  const Index n = x.rows();
  const Index p = x.cols();
  if (y.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "response has " + std::to_string(y.size()) + " entries, design has " +
                    std::to_string(n) + " rows");
  }
  const Qr qr = detail::checked_qr(x.values(), ErrorCode::RankDeficient);

  OlsFit fit;
  fit.beta_hat = qr.solve(y.values());
  fit.residuals = y.values() - x.values() * fit.beta_hat;
  fit.leverage = thin_q(qr, n, p).rowwise().squaredNorm();
  fit.sigma2_hat = n > p ? fit.residuals.squaredNorm() / static_cast<double>(n - p) : 0.0;
  fit.gram_inverse = gram_inverse_from_qr(qr, p);
  return fit;
}

Eigen::VectorXd leverage_scores(const DesignMatrix& x) {
  const Qr qr = detail::checked_qr(x.values(), ErrorCode::RankDeficient);
  return thin_q(qr, x.rows(), x.cols()).rowwise().squaredNorm();
}

Eigen::MatrixXd gram_inverse(const DesignMatrix& x) {
  const Qr qr = detail::checked_qr(x.values(), ErrorCode::RankDeficient);
  return gram_inverse_from_qr(qr, x.cols());
}

Eigen::VectorXd gram_inverse_row_norms(const DesignMatrix& x) {
  return gram_inverse_row_norms(x, gram_inverse(x));
}

Eigen::VectorXd gram_inverse_row_norms(const DesignMatrix& x,
                                       const Eigen::MatrixXd& gram_inv) {
  // G symmetric, so row i of X G is (G x_i)'.
  return (x.values() * gram_inv).rowwise().norm();
}

Eigen::VectorXd row_norms(const Eigen::MatrixXd& x) { return x.rowwise().norm(); }

}  // namespace levsample
