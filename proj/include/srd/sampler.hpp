#ifndef SRD_SAMPLER_HPP
#define SRD_SAMPLER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "srd/model.hpp"

namespace srd {

/// Tuning of the Random Walk Metropolis chain over the projected height
/// coordinates.  step_scale = 0 means "derive from the support": the default
/// is 0.05 / (b - a).
struct ChainConfig {
  long iterations = 100000;
  long burn_in = 20000;
  long thin = 10;
  double step_scale = 0.0;
  std::uint64_t seed = 0;
  bool adapt = true;
  double target_acceptance = 0.25;

  void validate() const {
    if (iterations <= 0) throw std::invalid_argument("ChainConfig: iterations must be positive");
    if (burn_in < 0 || burn_in >= iterations)
      throw std::invalid_argument("ChainConfig: need 0 <= burn_in < iterations");
    if (thin <= 0) throw std::invalid_argument("ChainConfig: thin must be positive");
    if (step_scale < 0.0) throw std::invalid_argument("ChainConfig: step_scale must be >= 0");
    if (!(target_acceptance > 0.0 && target_acceptance < 1.0))
      throw std::invalid_argument("ChainConfig: target_acceptance must be in (0,1)");
  }
};

/// Stored draws of the step heights.  Every row of draws lies on the
/// constraint hyperplane with strictly positive components.
struct ChainOutput {
  Partition partition;
  Matrix draws;  // one draw per row, k columns
  double acceptance_rate = 0.0;
  double final_step_scale = 0.0;
  std::uint64_t seed = 0;

  long size() const { return draws.rows(); }
};

/// Random Walk Metropolis over y in R^{k-1} with spherical Gaussian
/// proposals.  Proposals leaving the positive orthant of completed heights
/// are rejected through the -inf log target.  For k = 1 the constrained
/// law is a point mass and the "chain" is that single height.
inline ChainOutput rwm_sample(const SimpleRandomDensity& model, const ChainConfig& cfg) {
  cfg.validate();
  const Partition& p = model.partition;
  const int k = model.k();
  const long kept = (cfg.iterations - cfg.burn_in + cfg.thin - 1) / cfg.thin;

  if (k == 1) {
    ChainOutput out{p, Matrix::Constant(kept, 1, 1.0 / (p.b() - p.a())), 1.0,
                    cfg.step_scale, cfg.seed};
    return out;
  }

  double step = cfg.step_scale > 0.0 ? cfg.step_scale : 0.05 / (p.b() - p.a());

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Vector y = Vector::Constant(k - 1, 1.0 / (p.b() - p.a()));
  double logp = log_target(model, y);

  Matrix draws(kept, k);
  long stored = 0;
  long accepts_post = 0;
  long post_iters = 0;
  long accepts_window = 0;

  Vector proposal(k - 1);
  for (long it = 0; it < cfg.iterations; ++it) {
    for (int i = 0; i < k - 1; ++i) proposal[i] = y[i] + step * normal(rng);
    const double logp_new = log_target(model, proposal);
    // -inf proposals (a nonpositive completed height) always fail this test
    const bool accept = logp_new - logp > std::log(unif(rng));
    if (accept) {
      y = proposal;
      logp = logp_new;
    }

    if (it < cfg.burn_in) {
      if (accept) ++accepts_window;
      if (cfg.adapt && (it + 1) % 100 == 0) {
        const double rate = accepts_window / 100.0;
        step *= rate > cfg.target_acceptance ? 1.1 : 1.0 / 1.1;
        accepts_window = 0;
      }
    } else {
      ++post_iters;
      if (accept) ++accepts_post;
      if ((it - cfg.burn_in) % cfg.thin == 0)
        draws.row(stored++) = complete_heights(p, y).transpose();
    }
  }

  ChainOutput out{p, std::move(draws), 0.0, step, cfg.seed};
  out.acceptance_rate = post_iters > 0 ? static_cast<double>(accepts_post) / post_iters : 0.0;
  return out;
}

/// Componentwise ergodic mean of the stored draws; lies on the constraint
/// hyperplane by linearity.
inline Vector posterior_mean(const ChainOutput& chain) {
  if (chain.size() == 0) throw std::invalid_argument("posterior_mean: empty chain");
  return chain.draws.colwise().mean();
}

/// Sup-norm credible band around a center height vector.
struct CredibleBand {
  Vector center;
  double epsilon = 0.0;
  double gamma = 0.0;
};

/// Smallest draw-realized radius whose empirical coverage is at least gamma:
/// the order statistic of the sup deviations at index ceil(gamma * N).
inline CredibleBand credible_band(const ChainOutput& chain, const Vector& center,
                                  double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("credible_band: gamma must be in (0,1)");
  const long n = chain.size();
  if (n == 0) throw std::invalid_argument("credible_band: empty chain");
  std::vector<double> sup(static_cast<std::size_t>(n));
  for (long j = 0; j < n; ++j)
    sup[static_cast<std::size_t>(j)] =
        (chain.draws.row(j).transpose() - center).cwiseAbs().maxCoeff();
  std::sort(sup.begin(), sup.end());
  const long rank = static_cast<long>(std::ceil(gamma * static_cast<double>(n)));
  return CredibleBand{center, sup[static_cast<std::size_t>(std::max<long>(rank, 1) - 1)], gamma};
}

/// Continuous piecewise-linear distribution function of a simple density.
struct PiecewiseLinearCdf {
  std::vector<double> knots;
  std::vector<double> values;  // F at each knot; 0 at a, 1 at b
};

struct CdfQuantiles {
  PiecewiseLinearCdf cdf;
  std::vector<double> quantiles;
};

inline CdfQuantiles cdf_and_quantiles(const Partition& p, const Vector& h,
                                      const std::vector<double>& probs) {
  const int k = p.size();
  if (h.size() != k) throw std::invalid_argument("cdf_and_quantiles: dimension mismatch");
  for (int i = 0; i < k; ++i)
    if (h[i] < -1e-12)
      throw std::invalid_argument("cdf_and_quantiles: negative height");
  if (std::abs(s_delta(p, h) - 1.0) > 1e-8)
    throw std::invalid_argument("cdf_and_quantiles: heights do not integrate to one");

  PiecewiseLinearCdf cdf;
  cdf.knots = p.knots();
  cdf.values.resize(static_cast<std::size_t>(k) + 1);
  cdf.values[0] = 0.0;
  for (int i = 0; i < k; ++i)
    cdf.values[static_cast<std::size_t>(i) + 1] =
        cdf.values[static_cast<std::size_t>(i)] + p.width(i) * h[i];
  cdf.values.back() = 1.0;

  std::vector<double> qs;
  qs.reserve(probs.size());
  for (double prob : probs) {
    if (!(prob > 0.0 && prob < 1.0))
      throw std::invalid_argument("cdf_and_quantiles: probabilities must be in (0,1)");
    // leftmost bracketing cell: first knot value >= prob
    int j = 1;
    while (j < k && cdf.values[static_cast<std::size_t>(j)] < prob) ++j;
    const double f_lo = cdf.values[static_cast<std::size_t>(j) - 1];
    const double slope = h[j - 1];
    qs.push_back(slope > 0.0 ? p.knot(j - 1) + (prob - f_lo) / slope : p.knot(j - 1));
  }
  return CdfQuantiles{std::move(cdf), std::move(qs)};
}

/// Batch-means Monte Carlo standard error of a chain coordinate.
inline double mc_standard_error(const ChainOutput& chain, int coord) {
  const long n = chain.size();
  if (n < 4) throw std::invalid_argument("mc_standard_error: chain too short");
  const long nb = std::max<long>(8, static_cast<long>(std::floor(std::sqrt(static_cast<double>(n)))));
  const long bs = n / nb;
  const long used = nb * bs;
  double grand = 0.0;
  std::vector<double> means(static_cast<std::size_t>(nb));
  for (long b = 0; b < nb; ++b) {
    double s = 0.0;
    for (long j = 0; j < bs; ++j) s += chain.draws(b * bs + j, coord);
    means[static_cast<std::size_t>(b)] = s / bs;
    grand += s;
  }
  grand /= static_cast<double>(used);
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  return std::sqrt(bs * ss / (nb - 1) / static_cast<double>(used));
}

}  // namespace srd

#endif  // SRD_SAMPLER_HPP
