#pragma once

#include <Eigen/Dense>
#include <string>

#include "levsample/error.hpp"
#include "levsample/linalg.hpp"

namespace levsample::detail {

/// Pivoted Householder QR that refuses numerically rank-deficient input.
inline Eigen::ColPivHouseholderQR<Eigen::MatrixXd> checked_qr(
    const Eigen::MatrixXd& a, ErrorCode on_failure) {
  const Index p = a.cols();
  if (a.rows() < p) {
    throw Error(on_failure, "fewer rows (" + std::to_string(a.rows()) +
                                ") than columns (" + std::to_string(p) + ")");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const auto& packed = qr.matrixQR();
  const double largest = std::abs(packed(0, 0));
  const double smallest = std::abs(packed(p - 1, p - 1));
  if (!(largest > 0.0) || smallest <= kRankTolerance * largest) {
    throw Error(on_failure, "numerical rank below " + std::to_string(p) +
                                " (|R_pp|/|R_11| = " +
                                std::to_string(largest > 0.0 ? smallest / largest : 0.0) +
                                ")");
  }
  return qr;
}

}  // namespace levsample::detail
