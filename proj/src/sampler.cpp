#include "levsample/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "levsample/error.hpp"
#include "levsample/rng.hpp"
#include "qr_util.hpp"

namespace levsample {

Index SubsampleDraw::distinct_rows() const noexcept {
  return static_cast<Index>(
      std::count_if(counts.begin(), counts.end(), [](std::int64_t k) { return k > 0; }));
}

AliasTable::AliasTable(const Eigen::VectorXd& pi)
    : accept_(static_cast<std::size_t>(pi.size()), 0.0),
      alias_(static_cast<std::size_t>(pi.size()), 0) {
  const Index n = pi.size();
  const double total = pi.sum();
  std::vector<double> scaled(static_cast<std::size_t>(n));
  std::vector<Index> small;
  std::vector<Index> large;
  Index any_positive = 0;
  for (Index i = 0; i < n; ++i) {
    scaled[i] = pi[i] * static_cast<double>(n) / total;
    if (pi[i] > 0.0) any_positive = i;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const Index s = small.back();
    small.pop_back();
    const Index l = large.back();
    accept_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers carry mass 1 up to rounding; a zero-probability row must still
  // never be returned.
  for (Index i : large) accept_[i] = 1.0;
  for (Index i : small) {
    accept_[i] = pi[i] > 0.0 ? 1.0 : 0.0;
    alias_[i] = any_positive;
  }
}

Index AliasTable::sample(double u_column, double u_coin) const noexcept {
  const auto n = static_cast<Index>(accept_.size());
  const Index column = std::min<Index>(static_cast<Index>(u_column * n), n - 1);
  return u_coin < accept_[column] ? column : alias_[column];
}

SubsampleDraw draw_subsample(const Eigen::VectorXd& pi, std::int64_t r, std::uint64_t seed) {
  if (r < 1) throw Error(ErrorCode::InvalidSize, "subsample size must be >= 1");
  const Index n = pi.size();
  if (n == 0) throw Error(ErrorCode::InvalidSize, "empty probability vector");

  SubsampleDraw draw{std::vector<std::int64_t>(static_cast<std::size_t>(n), 0), r, seed};
  Xoshiro256 rng(seed);
  if (r >= n) {
    const AliasTable table(pi);
    for (std::int64_t k = 0; k < r; ++k) {
      const double u1 = uniform_open(rng);
      const double u2 = uniform_open(rng);
      ++draw.counts[table.sample(u1, u2)];
    }
    return draw;
  }

  std::vector<double> cdf(static_cast<std::size_t>(n));
  double running = 0.0;
  Index last_positive = 0;
  for (Index i = 0; i < n; ++i) {
    running += pi[i];
    cdf[i] = running;
    if (pi[i] > 0.0) last_positive = i;
  }
  for (std::int64_t k = 0; k < r; ++k) {
    const double u = uniform_open(rng) * running;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const Index i = it == cdf.end() ? last_positive : static_cast<Index>(it - cdf.begin());
    ++draw.counts[i];
  }
  return draw;
}

SubsampleDraw draw_subsample(const ProbabilityVector& pi, std::int64_t r, std::uint64_t seed) {
  return draw_subsample(pi.pi, r, seed);
}

namespace {

void check_draw(const DesignMatrix& x, const ResponseVector& y, const SubsampleDraw& draw,
                const ProbabilityVector& pi) {
  const Index n = x.rows();
  if (y.size() != n || pi.pi.size() != n || static_cast<Index>(draw.counts.size()) != n) {
    throw Error(ErrorCode::DimensionMismatch, "draw, probabilities and data disagree on n");
  }
  if (draw.r < 1) throw Error(ErrorCode::InvalidSize, "subsample size must be >= 1");
  for (Index i = 0; i < n; ++i) {
    if (draw.counts[i] > 0 && !(pi.pi[i] > 0.0)) {
      throw Error(ErrorCode::ZeroProbability,
                  "row " + std::to_string(i) + " drawn but has zero probability");
    }
  }
  if (draw.distinct_rows() < x.cols()) {
    throw Error(ErrorCode::SingularSubsample,
                "only " + std::to_string(draw.distinct_rows()) + " distinct rows for " +
                    std::to_string(x.cols()) + " predictors");
  }
}

}  // namespace

SubsampleEstimate weighted_ls(const DesignMatrix& x, const ResponseVector& y,
                              const SubsampleDraw& draw, const ProbabilityVector& pi) {
  check_draw(x, y, draw, pi);
  const Index p = x.cols();
  const Index m = draw.distinct_rows();
  const auto r = static_cast<double>(draw.r);

  Eigen::MatrixXd a(m, p);
  Eigen::VectorXd b(m);
  Index row = 0;
  for (Index i = 0; i < x.rows(); ++i) {
    const std::int64_t k = draw.counts[i];
    if (k == 0) continue;
    const double w = std::sqrt(static_cast<double>(k) / (r * pi.pi[i]));
    a.row(row) = w * x.values().row(i);
    b[row] = w * y.values()[i];
    ++row;
  }
  const auto qr = detail::checked_qr(a, ErrorCode::SingularSubsample);
  return {qr.solve(b), draw, pi.scheme};
}

SubsampleEstimate weighted_ls_matrix_form(const DesignMatrix& x, const ResponseVector& y,
                                          const SubsampleDraw& draw,
                                          const ProbabilityVector& pi) {
  check_draw(x, y, draw, pi);
  const Index n = x.rows();
  const auto r = static_cast<double>(draw.r);

  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (Index i = 0; i < n; ++i) {
    if (draw.counts[i] > 0) w[i] = static_cast<double>(draw.counts[i]) / (r * pi.pi[i]);
  }
  const Eigen::MatrixXd xtwx = x.values().transpose() * w.asDiagonal() * x.values();
  const Eigen::VectorXd xtwy = x.values().transpose() * w.cwiseProduct(y.values());
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(xtwx);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-15) {
    throw Error(ErrorCode::SingularSubsample, "weighted Gram matrix is singular");
  }
  return {ldlt.solve(xtwy), draw, pi.scheme};
}

double multinomial_pmf(std::span<const std::int64_t> counts, const Eigen::VectorXd& pi) {
  if (static_cast<Index>(counts.size()) != pi.size()) {
    throw Error(ErrorCode::DimensionMismatch, "counts and probabilities differ in length");
  }
  const std::int64_t r = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  double log_p = std::lgamma(static_cast<double>(r) + 1.0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const auto k = static_cast<double>(counts[i]);
    if (counts[i] == 0) continue;
    if (!(pi[static_cast<Index>(i)] > 0.0)) return 0.0;
    log_p += k * std::log(pi[static_cast<Index>(i)]) - std::lgamma(k + 1.0);
  }
  return std::exp(log_p);
}

}  // namespace levsample
