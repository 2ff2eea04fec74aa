#include <doctest.h>

#include <cmath>
#include <random>

#include "levsample/error.hpp"
#include "levsample/linalg.hpp"
#include "oracles.hpp"

using namespace levsample;

namespace {

DesignMatrix design(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Index>(rows.size());
  const auto p = static_cast<Index>(rows.begin()->size());
  Eigen::MatrixXd x(n, p);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (double v : row) x(i, j++) = v;
    ++i;
  }
  return DesignMatrix(x);
}

ResponseVector response(std::initializer_list<double> values) {
  Eigen::VectorXd y(static_cast<Index>(values.size()));
  Index i = 0;
  for (double v : values) y[i++] = v;
  return ResponseVector(y);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected levsample::Error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("ols_fit on a one-predictor mean fit") {
  const OlsFit fit = ols_fit(design({{1}, {1}}), response({1, 3}));
  CHECK(fit.beta_hat[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(fit.residuals[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(fit.residuals[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fit.leverage[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(fit.leverage[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(fit.sigma2_hat == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(fit.gram_inverse(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("ols_fit interpolates an identity design") {
  const OlsFit fit = ols_fit(design({{1, 0}, {0, 1}}), response({2.5, -7}));
  CHECK(fit.beta_hat[0] == doctest::Approx(2.5));
  CHECK(fit.beta_hat[1] == doctest::Approx(-7));
  CHECK(fit.residuals.norm() < 1e-14);
  CHECK(fit.leverage[0] == doctest::Approx(1.0));
  CHECK(fit.leverage[1] == doctest::Approx(1.0));
  CHECK(fit.sigma2_hat == 0.0);
}

TEST_CASE("leverage of the 3x2 design matches the pseudo-inverse oracle") {
  const DesignMatrix x = design({{1, 0}, {0, 1}, {1, 1}});
  const OlsFit fit = ols_fit(x, response({0.3, -1, 2}));
  const Eigen::VectorXd expected = oracle::leverage(x.values());
  for (Index i = 0; i < 3; ++i) {
    CHECK(expected[i] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(fit.leverage[i] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
  CHECK(fit.leverage.sum() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("leverage_scores on simple designs") {
  const Eigen::VectorXd h_identity = leverage_scores(DesignMatrix(Eigen::MatrixXd::Identity(4, 4)));
  for (Index i = 0; i < 4; ++i) CHECK(h_identity[i] == doctest::Approx(1.0).epsilon(1e-14));

  const Eigen::VectorXd h_intercept = leverage_scores(DesignMatrix(Eigen::MatrixXd::Ones(4, 1)));
  for (Index i = 0; i < 4; ++i) CHECK(h_intercept[i] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("gram_inverse_row_norms") {
  const Eigen::VectorXd id = gram_inverse_row_norms(DesignMatrix(Eigen::MatrixXd::Identity(2, 2)));
  CHECK(id[0] == doctest::Approx(1.0));
  CHECK(id[1] == doctest::Approx(1.0));

  // (X'X)^{-1} = (1/3)[[2,-1],[-1,2]]
  const Eigen::VectorXd v = gram_inverse_row_norms(design({{1, 0}, {0, 1}, {1, 1}}));
  CHECK(v[0] == doctest::Approx(std::sqrt(5.0) / 3.0).epsilon(1e-13));
  CHECK(v[1] == doctest::Approx(std::sqrt(5.0) / 3.0).epsilon(1e-13));
  CHECK(v[2] == doctest::Approx(std::sqrt(2.0) / 3.0).epsilon(1e-13));

  const Eigen::VectorXd s = gram_inverse_row_norms(design({{2}, {0}}));
  CHECK(s[0] == doctest::Approx(0.5));
  CHECK(s[1] == 0.0);
}

TEST_CASE("row_norms") {
  Eigen::MatrixXd wide(1, 2);
  wide << 3, 4;
  CHECK(row_norms(wide)[0] == doctest::Approx(5.0));

  const Eigen::VectorXd v = row_norms(design({{1, 0}, {0, 1}, {1, 1}}).values());
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 1.0);
  CHECK(v[2] == doctest::Approx(std::sqrt(2.0)));

  Eigen::MatrixXd with_zero = Eigen::MatrixXd::Ones(3, 2);
  with_zero.row(1).setZero();
  CHECK(row_norms(with_zero)[1] == 0.0);
}

TEST_CASE("error paths") {
  CHECK(code_of([] { ols_fit(design({{1, 2}, {2, 4}, {3, 6}}), response({1, 2, 3})); }) ==
        ErrorCode::RankDeficient);
  CHECK(code_of([] { ols_fit(design({{1}, {1}}), response({1, 2, 3})); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(code_of([] { leverage_scores(DesignMatrix(Eigen::MatrixXd::Zero(3, 1))); }) ==
        ErrorCode::RankDeficient);
  CHECK(code_of([] { DesignMatrix(Eigen::MatrixXd::Ones(1, 2)); }) ==
        ErrorCode::DimensionMismatch);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(2, 1);
  bad(0, 0) = std::nan("");
  CHECK(code_of([&] { DesignMatrix{bad}; }) == ErrorCode::InvalidSpec);
}

TEST_CASE("property: factorization leverage agrees with the brute-force oracle") {
  std::mt19937_64 gen(20240611);
  std::uniform_int_distribution<int> pick_p(1, 3);
  for (int trial = 0; trial < 500; ++trial) {
    const int p = pick_p(gen);
    const int n = std::uniform_int_distribution<int>(p, 8)(gen);
    const Eigen::MatrixXd raw = oracle::random_matrix(gen, n, p);
    const DesignMatrix x(raw);
    const ResponseVector y(oracle::random_vector(gen, n));
    const OlsFit fit = ols_fit(x, y);
    const Eigen::VectorXd h = oracle::leverage(raw);

    CHECK((fit.leverage - h).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(fit.leverage.sum() - p) <= 1e-9 * p);
    CHECK(fit.leverage.minCoeff() >= 0.0);
    CHECK(fit.leverage.maxCoeff() <= 1.0 + 1e-12);
    CHECK((raw.transpose() * fit.residuals).norm() <= 1e-8 * raw.norm() * y.values().norm());
    CHECK((fit.gram_inverse - oracle::gram_inverse(raw)).norm() <=
          1e-8 * oracle::gram_inverse(raw).norm());
    if (n > p) {
      CHECK(fit.sigma2_hat ==
            doctest::Approx(fit.residuals.squaredNorm() / (n - p)).epsilon(1e-14));
    }
  }
}
