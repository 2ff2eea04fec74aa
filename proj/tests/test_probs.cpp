#include <doctest.h>

#include <cmath>
#include <random>

#include "levsample/error.hpp"
#include "levsample/linalg.hpp"
#include "levsample/probs.hpp"
#include "oracles.hpp"

using namespace levsample;

namespace {

OlsFit fit_of(const DesignMatrix& x) {
  return ols_fit(x, ResponseVector(Eigen::VectorXd::LinSpaced(x.rows(), -1.0, 1.0)));
}

Eigen::VectorXd probs(const DesignMatrix& x, SchemeKind kind, double floor = 0.0) {
  return build_probs(x, fit_of(x), SchemeSpec{kind, 0.9, floor}).pi;
}

DesignMatrix three_by_two() {
  Eigen::MatrixXd x(3, 2);
  x << 1, 0, 0, 1, 1, 1;
  return DesignMatrix(x);
}

// Rows +-1 in two columns: X'X = 4I and every leverage is 1/2.
DesignMatrix balanced_design() {
  Eigen::MatrixXd x(4, 2);
  x << 1, 1, 1, -1, -1, 1, -1, -1;
  return DesignMatrix(x);
}

// A random n x p matrix with orthonormal columns.
DesignMatrix orthonormal_design(std::mt19937_64& gen, Index n, Index p) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(oracle::random_matrix(gen, n, p));
  return DesignMatrix(qr.householderQ() * Eigen::MatrixXd::Identity(n, p));
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

TEST_CASE("scheme names round-trip") {
  for (SchemeKind kind : kAllSchemes) {
    CHECK(parse_scheme(scheme_name(kind)) == kind);
  }
  CHECK(parse_scheme("ICNLEV") == SchemeKind::ICNLEV);
  CHECK(parse_scheme("alev") == SchemeKind::BLEV);
  CHECK_FALSE(parse_scheme("lev").has_value());
}

TEST_CASE("uniform scheme") {
  const Eigen::VectorXd pi = probs(DesignMatrix(Eigen::MatrixXd::Ones(4, 1)), SchemeKind::UNIF);
  for (Index i = 0; i < 4; ++i) CHECK(pi[i] == 0.25);
}

TEST_CASE("hand-derived probabilities on the 3x2 design") {
  const DesignMatrix x = three_by_two();
  const double s5 = std::sqrt(5.0);
  const double s2 = std::sqrt(2.0);

  const Eigen::VectorXd ic = probs(x, SchemeKind::IC);
  CHECK(ic[0] == doctest::Approx(s5 / (2 * s5 + s2)).epsilon(1e-13));
  CHECK(ic[2] == doctest::Approx(s2 / (2 * s5 + s2)).epsilon(1e-13));

  const Eigen::VectorXd rl = probs(x, SchemeKind::RL);
  for (Index i = 0; i < 3; ++i) CHECK(rl[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

  const Eigen::VectorXd pl = probs(x, SchemeKind::PL);
  CHECK(pl[0] == doctest::Approx(1.0 / (2 + s2)).epsilon(1e-13));
  CHECK(pl[1] == doctest::Approx(1.0 / (2 + s2)).epsilon(1e-13));
  CHECK(pl[2] == doctest::Approx(s2 / (2 + s2)).epsilon(1e-13));

  // Equal leverage: the sqrt(1-h) factor cancels.
  const Eigen::VectorXd icnlev = probs(x, SchemeKind::ICNLEV);
  CHECK((icnlev - ic).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("shrinkage report values") {
  const auto rows = shrinkage_report(DesignMatrix(Eigen::MatrixXd::Ones(4, 1)),
                                     fit_of(DesignMatrix(Eigen::MatrixXd::Ones(4, 1))));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].leverage == doctest::Approx(0.25));
  CHECK(rows[0].rl_score == doctest::Approx(0.5));
  CHECK(rows[0].rlnlev_score == doctest::Approx(std::sqrt(0.75 * 0.25)).epsilon(1e-14));
  CHECK(rows[0].rlnlev_score == doctest::Approx(0.4330).epsilon(1e-4));

  const DesignMatrix id(Eigen::MatrixXd::Identity(2, 2));
  const auto full = shrinkage_report(id, fit_of(id));
  CHECK(full[0].rl_score == doctest::Approx(1.0));
  CHECK(full[0].rlnlev_score == 0.0);

  // h = (1, 0, 0, 0, 0), p/n = 0.2: SLEV gives 0.1 * 0.2 on the zero-leverage rows.
  Eigen::MatrixXd spike = Eigen::MatrixXd::Zero(5, 1);
  spike(0, 0) = 1.0;
  const DesignMatrix xs(spike);
  const auto srows = shrinkage_report(xs, fit_of(xs));
  CHECK(srows[1].leverage == doctest::Approx(0.0));
  CHECK(srows[1].slev_score == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(srows[0].slev_score == doctest::Approx(0.92).epsilon(1e-14));
}

TEST_CASE("degenerate schemes and the floor") {
  const DesignMatrix id(Eigen::MatrixXd::Identity(2, 2));
  CHECK(code_of([&] { probs(id, SchemeKind::RLNLEV); }) == ErrorCode::DegenerateScheme);
  const Eigen::VectorXd floored = probs(id, SchemeKind::RLNLEV, 0.5);
  CHECK(floored[0] == doctest::Approx(0.5));
  CHECK(floored[1] == doctest::Approx(0.5));

  CHECK(code_of([&] { build_probs(id, fit_of(id), SchemeSpec{SchemeKind::SLEV, 1.5, 0.0}); }) ==
        ErrorCode::InvalidLambda);
  CHECK(code_of([&] { build_probs(id, fit_of(id), SchemeSpec{SchemeKind::SLEV, 0.0, 0.0}); }) ==
        ErrorCode::InvalidLambda);
  CHECK(code_of([&] { probs(id, SchemeKind::BLEV, 1.0); }) == ErrorCode::InvalidFloor);
  CHECK(code_of([&] { probs(id, SchemeKind::BLEV, -0.1); }) == ErrorCode::InvalidFloor);

  // Zero-leverage rows get exactly floor/n after the floor is applied.
  Eigen::MatrixXd spike = Eigen::MatrixXd::Zero(5, 1);
  spike(0, 0) = 1.0;
  const Eigen::VectorXd blev = probs(DesignMatrix(spike), SchemeKind::BLEV, 0.5);
  CHECK(blev.sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(blev[1] == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(blev[0] == doctest::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("apply_floor keeps the floor after renormalization") {
  Eigen::VectorXd pi(4);
  pi << 0.97, 0.01, 0.01, 0.01;
  const Eigen::VectorXd out = apply_floor(pi, 0.8);
  CHECK(out.sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(out.minCoeff() >= 0.2 - 1e-15);
  CHECK(out[0] == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("property: homogeneous leverage makes NLEV schemes coincide with their base") {
  const DesignMatrix x = balanced_design();
  const Eigen::VectorXd unif = probs(x, SchemeKind::UNIF);
  CHECK((probs(x, SchemeKind::RL) - unif).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((probs(x, SchemeKind::RLNLEV) - unif).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((probs(x, SchemeKind::ICNLEV) - probs(x, SchemeKind::IC)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((probs(x, SchemeKind::PLNLEV) - probs(x, SchemeKind::PL)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("property: simplex and brute-force agreement on random designs") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int p = std::uniform_int_distribution<int>(1, 5)(gen);
    const int n = std::uniform_int_distribution<int>(p + 1, 40)(gen);
    const DesignMatrix x(oracle::random_matrix(gen, n, p));
    const OlsFit fit = fit_of(x);
    const auto expected = oracle::all_scheme_probs(x.values());
    for (std::size_t s = 0; s < kAllSchemes.size(); ++s) {
      const Eigen::VectorXd pi = build_probs(x, fit, SchemeSpec{kAllSchemes[s]}).pi;
      CHECK(std::abs(pi.sum() - 1.0) <= 1e-12 * n);
      CHECK(pi.minCoeff() >= 0.0);
      CHECK((pi - expected[s]).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("property: RL shrinks BLEV toward uniform") {
  // pi_RL / pi_BLEV is monotone decreasing in h, so the ratio ordering reverses.
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const DesignMatrix x(oracle::random_matrix(gen, 30, 3));
    const OlsFit fit = fit_of(x);
    const Eigen::VectorXd blev = build_probs(x, fit, {SchemeKind::BLEV}).pi;
    const Eigen::VectorXd rl = build_probs(x, fit, {SchemeKind::RL}).pi;
    CHECK(rl.maxCoeff() <= blev.maxCoeff() + 1e-15);
    CHECK(rl.minCoeff() >= blev.minCoeff() - 1e-15);
    for (Index i = 0; i < 30; ++i) {
      for (Index j = 0; j < 30; ++j) {
        if (fit.leverage[i] > fit.leverage[j] + 1e-12) {
          CHECK(rl[i] / blev[i] <= rl[j] / blev[j] + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("property: RLNLEV score is unimodal in h with its peak at 1/2") {
  const auto score = [](double h) { return std::sqrt((1 - h) * h); };
  for (int i = 0; i < 100; ++i) {
    const double a = i / 200.0;
    const double b = (i + 1) / 200.0;
    CHECK(score(a) <= score(b));
    CHECK(score(1 - a) <= score(1 - b));
  }
  CHECK(score(0.5) == doctest::Approx(0.5));
}

TEST_CASE("property: orthonormal designs make IC, RL and PL coincide") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const DesignMatrix x = orthonormal_design(gen, 25, 4);
    const Eigen::VectorXd ic = probs(x, SchemeKind::IC);
    CHECK((ic - probs(x, SchemeKind::RL)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((ic - probs(x, SchemeKind::PL)).cwiseAbs().maxCoeff() <= 1e-12);
    const Eigen::VectorXd icn = probs(x, SchemeKind::ICNLEV);
    CHECK((icn - probs(x, SchemeKind::RLNLEV)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((icn - probs(x, SchemeKind::PLNLEV)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("property: a floor bounds every probability from below") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd raw = oracle::random_matrix(gen, 30, 2);
    raw.row(0) *= 50.0;  // one dominant row
    const DesignMatrix x(raw);
    const double floor = std::uniform_real_distribution<double>(0.0, 0.99)(gen);
    for (SchemeKind kind : kAllSchemes) {
      const Eigen::VectorXd pi = probs(x, kind, floor);
      CHECK(pi.sum() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(pi.minCoeff() >= floor / 30.0 * (1 - 1e-12));
    }
  }
}
