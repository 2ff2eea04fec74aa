#include "levsample/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <string>
#include <thread>

#include "levsample/error.hpp"
#include "levsample/io.hpp"
#include "levsample/rng.hpp"
#include "levsample/sampler.hpp"

namespace levsample {

void validate(const ExperimentConfig& cfg) {
  if (cfg.replicates < 2) {
    throw Error(ErrorCode::InvalidConfig, "need at least 2 replicates");
  }
  if (cfg.sample_sizes.empty()) {
    throw Error(ErrorCode::InvalidConfig, "no sample sizes given");
  }
  for (auto r : cfg.sample_sizes) {
    if (r < 1) throw Error(ErrorCode::InvalidConfig, "sample sizes must be positive");
  }
  if (!(cfg.floor >= 0.0 && cfg.floor < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "floor must lie in [0, 1)");
  }
  if (cfg.mode == InferenceMode::UNCONDITIONAL && !std::holds_alternative<DataSpec>(cfg.data)) {
    throw Error(ErrorCode::InvalidConfig,
                "unconditional experiments regenerate data and need a synthetic data spec");
  }
  if (const auto* spec = std::get_if<DataSpec>(&cfg.data)) validate(*spec);
}

std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t scheme_index,
                             std::size_t size_index, int replicate, int attempt) noexcept {
  return derive_seed(master_seed,
                     {static_cast<std::uint64_t>(Stream::Subsample), scheme_index, size_index,
                      static_cast<std::uint64_t>(replicate), static_cast<std::uint64_t>(attempt)});
}

std::uint64_t replicate_data_seed(std::uint64_t data_seed, int replicate) noexcept {
  return derive_seed(data_seed, {static_cast<std::uint64_t>(Stream::Replicate),
                                 static_cast<std::uint64_t>(replicate)});
}

std::uint64_t response_seed(std::uint64_t data_seed) noexcept {
  return derive_seed(data_seed, {static_cast<std::uint64_t>(Stream::Response)});
}

namespace {

struct Dataset {
  DesignMatrix x;
  ResponseVector y;
};

Eigen::VectorXd beta0_for(const ExperimentConfig& cfg, Index p) {
  if (cfg.beta0) {
    if (cfg.beta0->size() != p) {
      throw Error(ErrorCode::DimensionMismatch, "beta0 length differs from p");
    }
    return *cfg.beta0;
  }
  return default_beta0(p);
}

Dataset synthesize(const ExperimentConfig& cfg, const DataSpec& spec, std::uint64_t seed) {
  DataSpec s = spec;
  s.seed = seed;
  DesignMatrix x = gen_design(s);
  ResponseVector y = gen_response(x, beta0_for(cfg, s.p), s.sigma, response_seed(seed));
  return {std::move(x), std::move(y)};
}

Dataset fixed_dataset(const ExperimentConfig& cfg) {
  return std::visit(
      [&](const auto& source) -> Dataset {
        using T = std::decay_t<decltype(source)>;
        if constexpr (std::is_same_v<T, DataSpec>) {
          return synthesize(cfg, source, source.seed);
        } else if constexpr (std::is_same_v<T, CsvSource>) {
          auto [x, y] = load_csv(source.path, source.response_column, source.options);
          return {std::move(x), std::move(y)};
        } else {
          return {DesignMatrix(source.x), ResponseVector(source.y)};
        }
      },
      cfg.data);
}

// L (beta_tilde - reference) for the chosen target.
Eigen::VectorXd deviation(const DesignMatrix& x, const Eigen::VectorXd& diff, TargetKind target) {
  switch (target) {
    case TargetKind::COEF: return diff;
    case TargetKind::FIT: return x.values() * diff;
    case TargetKind::GRAM: return x.values().transpose() * (x.values() * diff);
  }
  return diff;
}

Index target_dimension(Index n, Index p, TargetKind target) {
  return target == TargetKind::FIT ? n : p;
}

struct Welford {
  int count = 0;
  Eigen::VectorXd mean;
  Eigen::VectorXd m2;

  void add(const Eigen::VectorXd& d) {
    if (count == 0) {
      mean = Eigen::VectorXd::Zero(d.size());
      m2 = Eigen::VectorXd::Zero(d.size());
    }
    ++count;
    const Eigen::VectorXd delta = d - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta.cwiseProduct(d - mean);
  }
};

using CellResult = std::optional<Eigen::VectorXd>;  // nullopt = failed replicate

class ReplicateRunner {
 public:
  ReplicateRunner(const ExperimentConfig& cfg) : cfg_(cfg) {
    schemes_.reserve(cfg.schemes.size());
    for (SchemeSpec s : cfg.schemes) {
      s.floor = std::max(s.floor, cfg.floor);
      schemes_.push_back(s);
    }
    if (cfg.mode == InferenceMode::CONDITIONAL) {
      fixed_.emplace(fixed_dataset(cfg));
      for (auto r : cfg.sample_sizes) {
        if (r > fixed_->x.rows()) {
          throw Error(ErrorCode::InvalidConfig,
                      "sample size " + std::to_string(r) + " exceeds n");
        }
      }
      fixed_fit_.emplace(ols_fit(fixed_->x, fixed_->y));
      for (const auto& s : schemes_) fixed_probs_.push_back(build_probs(fixed_->x, *fixed_fit_, s));
      n_ = fixed_->x.rows();
      p_ = fixed_->x.cols();
    } else {
      const auto& spec = std::get<DataSpec>(cfg.data);
      for (auto r : cfg.sample_sizes) {
        if (r > spec.n) {
          throw Error(ErrorCode::InvalidConfig,
                      "sample size " + std::to_string(r) + " exceeds n");
        }
      }
      beta0_ = beta0_for(cfg, spec.p);
      n_ = spec.n;
      p_ = spec.p;
    }
  }

  std::size_t num_cells() const { return schemes_.size() * cfg_.sample_sizes.size(); }
  Index dimension() const { return target_dimension(n_, p_, cfg_.target); }
  const std::vector<SchemeSpec>& schemes() const { return schemes_; }

  std::vector<CellResult> run(int b) const {
    std::vector<CellResult> out(num_cells());
    if (cfg_.mode == InferenceMode::CONDITIONAL) {
      run_cells(b, fixed_->x, fixed_->y, fixed_fit_->beta_hat, fixed_probs_, out);
    } else {
      const auto& spec = std::get<DataSpec>(cfg_.data);
      const Dataset data = synthesize(cfg_, spec, replicate_data_seed(spec.seed, b));
      const OlsFit fit = ols_fit(data.x, data.y);
      std::vector<ProbabilityVector> probs;
      probs.reserve(schemes_.size());
      for (const auto& s : schemes_) probs.push_back(build_probs(data.x, fit, s));
      run_cells(b, data.x, data.y, beta0_, probs, out);
    }
    return out;
  }

 private:
  void run_cells(int b, const DesignMatrix& x, const ResponseVector& y,
                 const Eigen::VectorXd& reference, const std::vector<ProbabilityVector>& probs,
                 std::vector<CellResult>& out) const {
    std::size_t cell = 0;
    for (std::size_t s = 0; s < schemes_.size(); ++s) {
      for (std::size_t k = 0; k < cfg_.sample_sizes.size(); ++k, ++cell) {
        for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
          const SubsampleDraw draw = draw_subsample(
              probs[s], cfg_.sample_sizes[k], replicate_seed(cfg_.master_seed, s, k, b, attempt));
          try {
            const SubsampleEstimate est = weighted_ls(x, y, draw, probs[s]);
            out[cell] = deviation(x, est.beta_tilde - reference, cfg_.target);
            break;
          } catch (const Error& e) {
            if (e.code() != ErrorCode::SingularSubsample) throw;
          }
        }
      }
    }
  }

  const ExperimentConfig& cfg_;
  std::vector<SchemeSpec> schemes_;
  std::optional<Dataset> fixed_;
  std::optional<OlsFit> fixed_fit_;
  std::vector<ProbabilityVector> fixed_probs_;
  Eigen::VectorXd beta0_;
  Index n_ = 0;
  Index p_ = 0;
};

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  validate(cfg);
  const ReplicateRunner runner(cfg);
  const std::size_t cells = runner.num_cells();
  const int threads = resolve_threads(options.threads);
  const int block = std::max(16, 4 * threads);

  std::vector<Welford> acc(cells);
  std::vector<int> failed(cells, 0);
  std::vector<std::vector<CellResult>> results;

  for (int first = 0; first < cfg.replicates; first += block) {
    const int count = std::min(block, cfg.replicates - first);
    results.assign(static_cast<std::size_t>(count), {});
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    std::atomic<int> next{0};
    const auto work = [&] {
      for (int i = next++; i < count; i = next++) {
        try {
          results[i] = runner.run(first + i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    if (threads == 1 || count == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (int t = 0; t < std::min(threads, count); ++t) pool.emplace_back(work);
    }
    // Ordered reduction; the first failing replicate by index is reported.
    for (int i = 0; i < count; ++i) {
      if (errors[i]) std::rethrow_exception(errors[i]);
      for (std::size_t c = 0; c < cells; ++c) {
        if (results[i][c]) {
          acc[c].add(*results[i][c]);
        } else {
          ++failed[c];
        }
      }
    }
  }

  ExperimentReport report;
  report.config = cfg;
  std::size_t cell = 0;
  for (const auto& spec : runner.schemes()) {
    for (auto r : cfg.sample_sizes) {
      const Welford& w = acc[cell];
      if (w.count == 0) {
        throw Error(ErrorCode::NumericalFailure,
                    "every replicate failed for " + std::string(scheme_name(spec.kind)) +
                        " at r=" + std::to_string(r));
      }
      ReportCell out;
      out.scheme = std::string(scheme_name(spec.kind));
      out.spec = spec;
      out.r = r;
      out.squared_bias = w.mean.squaredNorm();
      out.variance = w.m2.sum() / static_cast<double>(w.count);
      out.mse = out.squared_bias + out.variance;
      out.failed_replicates = failed[cell];
      out.used_replicates = w.count;
      out.dimension = runner.dimension();
      report.cells.push_back(std::move(out));
      ++cell;
    }
  }
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace levsample
