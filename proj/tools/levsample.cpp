// levsample: command-line front end for the subsampling estimators.
//
// Exit status: 0 on success, 2 for bad input, 3 for numerical failures.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "levsample/asymptotics.hpp"
#include "levsample/datagen.hpp"
#include "levsample/error.hpp"
#include "levsample/harness.hpp"
#include "levsample/io.hpp"
#include "levsample/probs.hpp"
#include "levsample/sampler.hpp"

using namespace levsample;
using nlohmann::json;

namespace {

constexpr int kInputError = 2;
constexpr int kNumericalError = 3;

struct InputArgs {
  std::string path;
  Index response = 0;
  CsvOptions csv;
};

void add_input(CLI::App* cmd, InputArgs& in) {
  cmd->add_option("--input", in.path, "CSV file with numeric columns")->required();
  cmd->add_option("--response", in.response, "zero-based column holding Y")->capture_default_str();
  cmd->add_flag("--header", in.csv.header, "skip the first line");
  cmd->add_flag("--intercept", in.csv.intercept, "prepend a column of ones");
  cmd->add_flag("--expand", in.csv.expand, "append squares and pairwise products");
}

struct SchemeArgs {
  std::string name = "unif";
  double floor = 0.0;
  double lambda = 0.9;

  SchemeSpec spec() const {
    const auto kind = parse_scheme(name);
    if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown scheme '" + name + "'");
    return {*kind, lambda, floor};
  }
};

void add_scheme(CLI::App* cmd, SchemeArgs& s) {
  cmd->add_option("--scheme", s.name, "sampling scheme")->capture_default_str();
  cmd->add_option("--floor", s.floor, "minimum probability as a fraction of 1/n");
  cmd->add_option("--slev-lambda", s.lambda, "SLEV mixing weight")->capture_default_str();
}

// The flag wins, then LEVSAMPLE_SEED, then the fallback.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv("LEVSAMPLE_SEED")) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::InvalidConfig, "LEVSAMPLE_SEED is not an unsigned integer");
  }
  return fallback;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path + "'");
}

bool wants_json(const std::string& format, const std::string& out, bool json_default) {
  if (format == "json") return true;
  if (format == "csv") return false;
  if (out.size() >= 5 && out.substr(out.size() - 5) == ".json") return true;
  if (out.size() >= 4 && out.substr(out.size() - 4) == ".csv") return false;
  return json_default;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); }

struct Loaded {
  DesignMatrix x;
  ResponseVector y;
  OlsFit fit;
};

Loaded load(const InputArgs& in) {
  auto [x, y] = load_csv(in.path, in.response, in.csv);
  OlsFit fit = ols_fit(x, y);
  return {std::move(x), std::move(y), std::move(fit)};
}

int run_probs(const InputArgs& in, const SchemeArgs& s, const std::string& out,
              const std::string& format) {
  const Loaded d = load(in);
  const ProbabilityVector pi = build_probs(d.x, d.fit, s.spec());
  std::ostringstream text;
  if (wants_json(format, out, false)) {
    json j;
    j["scheme"] = scheme_name(pi.scheme.kind);
    j["floor"] = pi.scheme.floor;
    if (pi.scheme.kind == SchemeKind::SLEV) j["lambda"] = pi.scheme.slev_lambda;
    j["pi"] = vector_json(pi.pi);
    text << j.dump(2) << '\n';
  } else {
    text << "row,pi\n";
    for (Index i = 0; i < pi.pi.size(); ++i) text << i << ',' << format_double(pi.pi[i]) << '\n';
  }
  emit(out, text.str());
  return 0;
}

struct EstimateArgs {
  std::int64_t r = 0;
  std::optional<std::uint64_t> seed;
  std::optional<double> ci;
  std::string ci_mode = "conditional";
};

int run_estimate(const InputArgs& in, const SchemeArgs& s, const EstimateArgs& e,
                 const std::string& out, const std::string& format) {
  const Loaded d = load(in);
  const ProbabilityVector pi = build_probs(d.x, d.fit, s.spec());
  const std::uint64_t seed = resolve_seed(e.seed, 0);
  const SubsampleDraw draw = draw_subsample(pi, e.r, seed);
  const SubsampleEstimate est = weighted_ls(d.x, d.y, draw, pi);

  std::vector<Interval> intervals;
  if (e.ci) {
    const auto mode = parse_mode(e.ci_mode);
    if (!mode) throw Error(ErrorCode::InvalidConfig, "unknown ci mode '" + e.ci_mode + "'");
    const AsymptoticCovariance cov = *mode == InferenceMode::CONDITIONAL
                                         ? sigma_c(d.x, d.fit.residuals, pi.pi, e.r)
                                         : sigma0(d.x, pi.pi, e.r, d.fit.sigma2_hat);
    intervals = confidence_intervals(est, cov, *e.ci);
  }

  std::ostringstream text;
  if (wants_json(format, out, true)) {
    json j;
    j["scheme"] = scheme_name(pi.scheme.kind);
    j["r"] = e.r;
    j["seed"] = seed;
    j["distinct_rows"] = draw.distinct_rows();
    j["beta_tilde"] = vector_json(est.beta_tilde);
    j["beta_ols"] = vector_json(d.fit.beta_hat);
    if (e.ci) {
      j["ci_level"] = *e.ci;
      j["ci_mode"] = e.ci_mode;
      json list = json::array();
      for (const auto& iv : intervals) list.push_back({iv.lower, iv.upper});
      j["ci"] = list;
    }
    text << j.dump(2) << '\n';
  } else {
    text << (e.ci ? "coef,beta_tilde,beta_ols,lower,upper\n" : "coef,beta_tilde,beta_ols\n");
    for (Index k = 0; k < est.beta_tilde.size(); ++k) {
      text << k << ',' << format_double(est.beta_tilde[k]) << ','
           << format_double(d.fit.beta_hat[k]);
      if (e.ci) {
        text << ',' << format_double(intervals[static_cast<std::size_t>(k)].lower) << ','
             << format_double(intervals[static_cast<std::size_t>(k)].upper);
      }
      text << '\n';
    }
  }
  emit(out, text.str());
  return 0;
}

int run_experiment_cmd(const std::string& config, const std::optional<std::uint64_t>& seed,
                       int threads, const std::string& out, const std::string& format) {
  ExperimentConfig cfg = load_config(config);
  cfg.master_seed = resolve_seed(seed, cfg.master_seed);
  const ExperimentReport report = run_experiment(cfg, RunOptions{threads});
  std::ostringstream text;
  if (wants_json(format, out, false)) {
    write_report_json(report, text);
  } else {
    write_report_csv(report, text);
  }
  emit(out, text.str());
  return 0;
}

struct GenArgs {
  std::string dist = "mn";
  Index n = 5000;
  Index p = 10;
  std::optional<std::uint64_t> seed;
  double rho = 0.7;
  double sigma = 1.0;
  std::string t_construction = "location_shift";
};

int run_gen(const GenArgs& g, const std::string& out) {
  const auto dist = parse_distribution(g.dist);
  if (!dist) throw Error(ErrorCode::InvalidSpec, "unknown distribution '" + g.dist + "'");
  DataSpec spec{*dist, g.n, g.p, resolve_seed(g.seed, 0), g.rho, g.sigma};
  if (g.t_construction == "noncentral") {
    spec.t_construction = TConstruction::Noncentral;
  } else if (g.t_construction != "location_shift") {
    throw Error(ErrorCode::InvalidSpec, "unknown t construction '" + g.t_construction + "'");
  }
  const DesignMatrix x = gen_design(spec);
  const ResponseVector y =
      gen_response(x, default_beta0(spec.p), spec.sigma, response_seed(spec.seed));
  std::ostringstream text;
  write_dataset_csv(x, y, text);
  emit(out, text.str());
  return 0;
}

int run_diagnose(const InputArgs& in, const SchemeArgs& s, std::int64_t r,
                 const std::string& out, const std::string& format) {
  const Loaded d = load(in);
  const ProbabilityVector pi = build_probs(d.x, d.fit, s.spec());
  const RegularityDiagnostics diag = check_regularity(d.x, pi.pi, r);
  std::ostringstream text;
  if (wants_json(format, out, true)) {
    json j;
    j["scheme"] = scheme_name(pi.scheme.kind);
    j["n"] = d.x.rows();
    j["p"] = d.x.cols();
    j["r"] = r;
    j["lambda_min"] = diag.lambda_min;
    j["lambda_max"] = diag.lambda_max;
    j["pi_min"] = diag.pi_min;
    j["pi_max"] = diag.pi_max;
    j["r_over_n"] = diag.r_over_n;
    j["flags"] = diag.flags;
    text << j.dump(2) << '\n';
  } else {
    text << "key,value\n"
         << "lambda_min," << format_double(diag.lambda_min) << '\n'
         << "lambda_max," << format_double(diag.lambda_max) << '\n'
         << "pi_min," << format_double(diag.pi_min) << '\n'
         << "pi_max," << format_double(diag.pi_max) << '\n'
         << "r_over_n," << format_double(diag.r_over_n) << '\n';
    for (const auto& f : diag.flags) text << "flag," << f << '\n';
  }
  emit(out, text.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subsampled least squares with leverage-based sampling schemes"};
  app.require_subcommand(1);

  std::string out;
  std::string format;
  int threads = 1;
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->group("Global");
  app.add_option("--threads", threads, "worker threads for experiments (0 = auto)")
      ->check(CLI::NonNegativeNumber)
      ->group("Global");
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out, "output file (default: stdout)");
    cmd->add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", threads, "worker threads (0 = auto)")
        ->check(CLI::NonNegativeNumber);
  };

  InputArgs input;
  SchemeArgs scheme;

  auto* probs = app.add_subcommand("probs", "sampling probabilities for one scheme");
  add_input(probs, input);
  add_scheme(probs, scheme);
  add_common(probs);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "one subsample estimate, optionally with CIs");
  add_input(estimate, input);
  add_scheme(estimate, scheme);
  estimate->add_option("--r", est.r, "subsample size")->required()->check(CLI::PositiveNumber);
  estimate->add_option("--seed", est.seed, "subsample seed");
  estimate->add_option("--ci", est.ci, "confidence level, e.g. 0.95");
  estimate->add_option("--ci-mode", est.ci_mode, "conditional or unconditional")
      ->check(CLI::IsMember({"conditional", "unconditional"}))
      ->capture_default_str();
  add_common(estimate);

  std::string config;
  std::optional<std::uint64_t> exp_seed;
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo bias/variance experiment");
  experiment->add_option("--config", config, "experiment JSON")->required();
  experiment->add_option("--seed", exp_seed, "override the master seed");
  add_common(experiment);

  GenArgs gen;
  auto* gencmd = app.add_subcommand("gen", "write a synthetic dataset as CSV");
  gencmd->add_option("--dist", gen.dist, "mn, t3, ln or t1")->capture_default_str();
  gencmd->add_option("--n", gen.n, "rows")->capture_default_str();
  gencmd->add_option("--p", gen.p, "predictors")->capture_default_str();
  gencmd->add_option("--seed", gen.seed, "data seed");
  gencmd->add_option("--rho", gen.rho, "AR(1) correlation of the predictors")
      ->capture_default_str();
  gencmd->add_option("--sigma", gen.sigma, "noise standard deviation")->capture_default_str();
  gencmd->add_option("--t-construction", gen.t_construction, "location_shift or noncentral")
      ->capture_default_str();
  add_common(gencmd);

  std::int64_t diag_r = 0;
  auto* diagnose = app.add_subcommand("diagnose", "regularity diagnostics for a scheme");
  add_input(diagnose, input);
  add_scheme(diagnose, scheme);
  diagnose->add_option("--r", diag_r, "subsample size")->required()->check(CLI::PositiveNumber);
  add_common(diagnose);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? 0 : kInputError;
  }

  try {
    if (*probs) return run_probs(input, scheme, out, format);
    if (*estimate) return run_estimate(input, scheme, est, out, format);
    if (*experiment) return run_experiment_cmd(config, exp_seed, threads, out, format);
    if (*gencmd) return run_gen(gen, out);
    if (*diagnose) return run_diagnose(input, scheme, diag_r, out, format);
  } catch (const Error& e) {
    std::cerr << "levsample: " << e.what() << '\n';
    return is_numerical(e.code()) ? kNumericalError : kInputError;
  } catch (const std::exception& e) {
    std::cerr << "levsample: " << e.what() << '\n';
    return kInputError;
  }
  return 0;
}
