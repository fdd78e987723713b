#ifndef SRD_PIPELINE_HPP
#define SRD_PIPELINE_HPP

#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "srd/empirical_bayes.hpp"
#include "srd/generators.hpp"
#include "srd/model.hpp"
#include "srd/sampler.hpp"
#include "srd/smoothing.hpp"

namespace srd {

struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Optional random kernel scale Theta = offset + Gamma(shape, rate-or-scale),
/// drawn once per chain.  The Gamma parametrization is selectable because the
/// convention is ambiguous in common usage.
struct RandomThetaSpec {
  double offset = 20000.0;
  double gamma_shape = 2.0;
  double gamma_rate_or_scale = 0.001;
  bool parametrized_by_rate = true;
};

/// Configuration of one pipeline run.  k = 0 or rho = 0 mean "select by
/// empirical Bayes" using eb_grid.
struct RunConfig {
  double a = 0.0;
  double b = 1.0;
  int k = 0;
  double rho = 0.0;
  double theta = 0.0;  // 0 means the default rule theta = 2 k^2
  double m_fill = 1.0;
  ChainConfig chain;
  double gamma = 0.95;
  std::optional<EBGrid> eb_grid;
  int smooth_N = 30;
  std::optional<RandomThetaSpec> random_theta;
  std::string input_path;
  std::string output_path;
  std::string draws_path;  // optional chain CSV
  std::string curve_path;  // optional plot-data CSV
};

inline std::vector<double> read_data_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open input file: " + path);
  std::vector<double> xs;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(line, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\r')) ++pos;
    if (pos != line.size()) {
      std::ostringstream msg;
      msg << path << ": malformed value at line " << lineno;
      throw data_error(msg.str());
    }
    xs.push_back(v);
  }
  return xs;
}

inline void write_data_csv(const std::vector<double>& xs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open output file: " + path);
  char buf[64];
  for (double x : xs) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", x);
    out << buf;
  }
}

inline void write_draws_csv(const ChainOutput& chain, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open output file: " + path);
  char buf[64];
  for (long j = 0; j < chain.size(); ++j) {
    for (int i = 0; i < chain.draws.cols(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", chain.draws(j, i));
      out << buf << (i + 1 < chain.draws.cols() ? "," : "\n");
    }
  }
}

namespace detail {

inline double resolve_theta(const RunConfig& cfg, int k) {
  if (cfg.random_theta) {
    std::mt19937_64 rng(splitmix64(cfg.chain.seed ^ 0x7468657461ULL));
    const auto& rt = *cfg.random_theta;
    const double scale = rt.parametrized_by_rate ? 1.0 / rt.gamma_rate_or_scale
                                                 : rt.gamma_rate_or_scale;
    std::gamma_distribution<double> g(rt.gamma_shape, scale);
    return rt.offset + g(rng);
  }
  if (cfg.theta > 0.0) return cfg.theta;
  return 2.0 * static_cast<double>(k) * static_cast<double>(k);
}

inline nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace detail

struct FitResult {
  Partition partition;
  Vector m_star;
  ChainOutput chain;
  Vector h_hat;
  CredibleBand band;
  double theta = 0.0;
  double rho = 0.0;
  double jitter_applied = 0.0;
};

/// Resolves (k, rho) through empirical Bayes when requested.
inline std::pair<int, double> resolve_k_rho(const RunConfig& cfg,
                                            const std::vector<double>& data) {
  int k = cfg.k;
  double rho = cfg.rho;
  if (k <= 0 || rho <= 0.0) {
    if (!cfg.eb_grid)
      throw std::invalid_argument("empirical-Bayes selection requested without a grid");
    const EBResult eb = eb_select(*cfg.eb_grid, data);
    if (k <= 0) k = eb.k_hat;
    if (rho <= 0.0) rho = eb.rho_hat;
  }
  return {k, rho};
}

/// Full posterior pipeline: bin the data, apply the conjugate update, run
/// the chain, and summarize with the posterior mean and the sup-norm band.
inline FitResult fit_pipeline(const RunConfig& cfg, const std::vector<double>& data) {
  const auto [k, rho] = resolve_k_rho(cfg, data);
  const Partition p = uniform_partition(cfg.a, cfg.b, k);
  const double theta = detail::resolve_theta(cfg, k);
  CovMatrix sigma = induce_sigma(p, CovarianceSpec(rho, theta));
  const double jitter = sigma.jitter_applied();
  const SimpleRandomDensity prior(
      p, LognormalParams(Vector::Constant(k, cfg.m_fill), std::move(sigma)));
  const CountVector c = count_statistic(p, data);
  const SimpleRandomDensity post = posterior(prior, c);

  ChainOutput chain = rwm_sample(post, cfg.chain);
  Vector h_hat = posterior_mean(chain);
  CredibleBand band = credible_band(chain, h_hat, cfg.gamma);
  return FitResult{p,        post.params.m, std::move(chain), std::move(h_hat),
                   band,     theta,         rho,              jitter};
}

inline nlohmann::json fit_summary_json(const FitResult& fit, const RunConfig& cfg) {
  nlohmann::json j;
  j["partition"] = {{"a", fit.partition.a()},
                    {"b", fit.partition.b()},
                    {"knots", fit.partition.knots()}};
  j["k"] = fit.partition.size();
  j["rho"] = fit.rho;
  j["theta"] = fit.theta;
  j["m_star"] = detail::vector_to_json(fit.m_star);
  j["h_hat"] = detail::vector_to_json(fit.h_hat);
  j["epsilon"] = fit.band.epsilon;
  j["gamma"] = fit.band.gamma;
  j["acceptance_rate"] = fit.chain.acceptance_rate;
  j["seed"] = cfg.chain.seed;
  j["jitter_applied"] = fit.jitter_applied;
  return j;
}

inline void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open output file: " + path);
  out << j.dump(2) << "\n";
}

/// Density curve plus band envelope sampled at 512 points, for plotting.
inline void write_curve_csv(const FitResult& fit, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open output file: " + path);
  char buf[256];
  const int points = 512;
  out << "x,density,band_lo,band_hi\n";
  for (int i = 0; i < points; ++i) {
    const double x = fit.partition.a() +
                     (fit.partition.b() - fit.partition.a()) * i / (points - 1.0);
    const double f = evaluate_density(fit.partition, fit.h_hat, x);
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", x, f,
                  std::max(f - fit.band.epsilon, 0.0), f + fit.band.epsilon);
    out << buf;
  }
}

inline FitResult run_fit(const RunConfig& cfg) {
  const std::vector<double> data =
      cfg.input_path.empty() ? std::vector<double>{} : read_data_csv(cfg.input_path);
  FitResult fit = fit_pipeline(cfg, data);
  if (!cfg.output_path.empty()) write_json(fit_summary_json(fit, cfg), cfg.output_path);
  if (!cfg.draws_path.empty()) write_draws_csv(fit.chain, cfg.draws_path);
  if (!cfg.curve_path.empty()) write_curve_csv(fit, cfg.curve_path);
  return fit;
}

/// Prior summaries: same machinery without data.
inline FitResult run_simulate_prior(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.input_path.clear();
  return run_fit(c);
}

inline nlohmann::json eb_result_json(const EBResult& eb) {
  nlohmann::json j;
  j["k_hat"] = eb.k_hat;
  j["rho_hat"] = eb.rho_hat;
  j["k_values"] = eb.k_values;
  j["rho_values"] = eb.rho_values;
  nlohmann::json lm = nlohmann::json::array();
  nlohmann::json se = nlohmann::json::array();
  for (long i = 0; i < eb.log_marginals.rows(); ++i) {
    nlohmann::json lr = nlohmann::json::array();
    nlohmann::json sr = nlohmann::json::array();
    for (long r = 0; r < eb.log_marginals.cols(); ++r) {
      lr.push_back(eb.log_marginals(i, r));
      sr.push_back(eb.standard_errors(i, r));
    }
    lm.push_back(lr);
    se.push_back(sr);
  }
  j["log_marginals"] = lm;
  j["standard_errors"] = se;
  return j;
}

inline EBResult run_eb(const RunConfig& cfg) {
  if (!cfg.eb_grid) throw std::invalid_argument("run_eb: no grid configured");
  const std::vector<double> data =
      cfg.input_path.empty() ? std::vector<double>{} : read_data_csv(cfg.input_path);
  EBResult eb = eb_select(*cfg.eb_grid, data);
  if (!cfg.output_path.empty()) write_json(eb_result_json(eb), cfg.output_path);
  return eb;
}

/// Smooth Bernstein-mixture estimate from the fitted posterior mean.
inline MixtureDensity run_smooth(const RunConfig& cfg) {
  RunConfig fit_cfg = cfg;
  fit_cfg.output_path.clear();
  fit_cfg.draws_path.clear();
  fit_cfg.curve_path.clear();
  const FitResult fit = run_fit(fit_cfg);

  const BernsteinBasis basis(cfg.smooth_N);
  const QPProblem prob{overlap_matrix(cfg.smooth_N),
                       moment_vector(basis, fit.partition, fit.h_hat)};
  MixtureDensity mix = solve_simplex_qp(prob);

  if (!cfg.output_path.empty()) {
    nlohmann::json j;
    j["N"] = mix.basis.N;
    j["weights"] = detail::vector_to_json(mix.weights);
    j["support"] = {cfg.a, cfg.b};
    write_json(j, cfg.output_path);
  }
  if (!cfg.curve_path.empty()) {
    std::ofstream out(cfg.curve_path);
    if (!out) throw data_error("cannot open output file: " + cfg.curve_path);
    char buf[128];
    out << "x,density\n";
    const int points = 512;
    for (int i = 0; i < points; ++i) {
      const double s = i / (points - 1.0);
      const double x = cfg.a + (cfg.b - cfg.a) * s;
      // transport back from [0,1]
      const double f = evaluate_mixture(mix, s) / (cfg.b - cfg.a);
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", x, f);
      out << buf;
    }
  }
  return mix;
}

/// Reference quantile functions for the QQ table.
inline double reference_quantile(const std::string& name, double prob) {
  if (name == "trunc-exp") return trunc_exp_quantile(prob);
  if (name == "triangular")
    return prob <= 0.5 ? std::sqrt(0.5 * prob) : 1.0 - std::sqrt(0.5 * (1.0 - prob));
  if (name == "beta42" || name.rfind("beta:", 0) == 0) {
    double a = 4.0, b = 2.0;
    if (name.rfind("beta:", 0) == 0) {
      std::istringstream ss(name.substr(5));
      char comma;
      if (!(ss >> a >> comma >> b))
        throw std::invalid_argument("reference_quantile: bad beta spec '" + name + "'");
    }
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (regularized_incomplete_beta(mid, a, b) < prob ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
  throw std::invalid_argument("reference_quantile: unknown reference '" + name + "'");
}

struct QQTable {
  std::vector<double> probs;
  std::vector<double> fitted;
  std::vector<double> reference;
};

inline QQTable run_qq(const RunConfig& cfg, const std::string& reference) {
  RunConfig fit_cfg = cfg;
  fit_cfg.output_path.clear();
  fit_cfg.draws_path.clear();
  fit_cfg.curve_path.clear();
  const FitResult fit = run_fit(fit_cfg);

  QQTable table;
  for (int i = 1; i <= 99; ++i) table.probs.push_back(i / 100.0);
  table.fitted = cdf_and_quantiles(fit.partition, fit.h_hat, table.probs).quantiles;
  for (double prob : table.probs)
    table.reference.push_back(reference_quantile(reference, prob));

  if (!cfg.output_path.empty()) {
    std::ofstream out(cfg.output_path);
    if (!out) throw data_error("cannot open output file: " + cfg.output_path);
    out << "prob,fitted_quantile,reference_quantile\n";
    char buf[128];
    for (std::size_t i = 0; i < table.probs.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", table.probs[i],
                    table.fitted[i], table.reference[i]);
      out << buf;
    }
  }
  return table;
}

}  // namespace srd

#endif  // SRD_PIPELINE_HPP
