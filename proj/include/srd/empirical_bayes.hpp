#ifndef SRD_EMPIRICAL_BAYES_HPP
#define SRD_EMPIRICAL_BAYES_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "srd/model.hpp"
#include "srd/sampler.hpp"

namespace srd {

/// Grid over (k, rho) for marginal-likelihood maximization.  theta_rule maps
/// a grid point to the kernel scale; the default 2k^2 keeps the correlation
/// between adjacent midpoints at about e^-2 for every k.
struct EBGrid {
  double a = 0.0;
  double b = 1.0;
  std::vector<int> k_values;
  std::vector<double> rho_values;
  std::function<double(int, double)> theta_rule = [](int k, double) {
    return 2.0 * static_cast<double>(k) * static_cast<double>(k);
  };
  long mc_draws = 1000;
  std::uint64_t seed = 0;
  long burn_in = 2000;
  long thin = 5;

  void validate() const {
    if (!(a < b)) throw std::invalid_argument("EBGrid: need a < b");
    if (k_values.empty() || rho_values.empty())
      throw std::invalid_argument("EBGrid: empty grid");
    if (mc_draws < 100) throw std::invalid_argument("EBGrid: mc_draws must be >= 100");
  }
};

struct EBResult {
  int k_hat = 0;
  double rho_hat = 0.0;
  std::vector<int> k_values;
  std::vector<double> rho_values;
  Matrix log_marginals;    // k index by rho index
  Matrix standard_errors;  // same layout
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Deterministic per-grid-point RNG stream derived from the base seed.
inline std::uint64_t grid_seed(std::uint64_t base, std::size_t ki, std::size_t ri) {
  return splitmix64(base ^ splitmix64(0x100000001ULL * ki + ri + 1));
}

}  // namespace detail

/// Monte Carlo estimate of the log marginal likelihood log f(x | k, rho)
/// with a jackknife standard error of the log estimate.  Prior heights are
/// drawn with the same Metropolis machinery used everywhere else; the
/// likelihood values are averaged through log-sum-exp.  k = 1 is exact.
inline std::pair<double, double> marginal_log_likelihood(int k, double rho,
                                                         const std::vector<double>& data,
                                                         const EBGrid& grid,
                                                         std::uint64_t stream_seed) {
  const double n = static_cast<double>(data.size());
  if (k == 1) return {-n * std::log(grid.b - grid.a), 0.0};

  const Partition p = uniform_partition(grid.a, grid.b, k);
  const CountVector c = count_statistic(p, data);
  const CovarianceSpec spec(rho, grid.theta_rule(k, rho));
  const SimpleRandomDensity prior(p, LognormalParams(Vector::Ones(k), induce_sigma(p, spec)));

  ChainConfig cfg;
  cfg.burn_in = grid.burn_in;
  cfg.thin = grid.thin;
  cfg.iterations = grid.burn_in + grid.mc_draws * grid.thin;
  cfg.seed = stream_seed;
  const ChainOutput chain = rwm_sample(prior, cfg);

  const long s = chain.size();
  Vector lls(s);
  for (long j = 0; j < s; ++j)
    lls[j] = log_likelihood(c, chain.draws.row(j).transpose());

  const double mx = lls.maxCoeff();
  const Vector e = (lls.array() - mx).exp();
  const double total = e.sum();
  const double estimate = mx + std::log(total) - std::log(static_cast<double>(s));

  // jackknife over draws, on the log scale
  Vector loo(s);
  for (long j = 0; j < s; ++j) {
    const double rest = std::max(total - e[j], 1e-300);
    loo[j] = mx + std::log(rest) - std::log(static_cast<double>(s - 1));
  }
  const double loo_mean = loo.mean();
  const double ss = (loo.array() - loo_mean).square().sum();
  const double se = std::sqrt((s - 1.0) / s * ss);
  return {estimate, se};
}

inline std::pair<double, double> marginal_log_likelihood(int k, double rho,
                                                         const std::vector<double>& data,
                                                         const EBGrid& grid) {
  return marginal_log_likelihood(k, rho, data, grid, grid.seed);
}

/// Full-grid evaluation and argmax.  Ties break toward smaller k, then
/// smaller rho.
inline EBResult eb_select(const EBGrid& grid, const std::vector<double>& data) {
  grid.validate();
  EBResult res;
  res.k_values = grid.k_values;
  res.rho_values = grid.rho_values;
  const auto nk = grid.k_values.size();
  const auto nr = grid.rho_values.size();
  res.log_marginals.resize(static_cast<long>(nk), static_cast<long>(nr));
  res.standard_errors.resize(static_cast<long>(nk), static_cast<long>(nr));

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t ki = 0; ki < nk; ++ki) {
    for (std::size_t ri = 0; ri < nr; ++ri) {
      const auto [lm, se] = marginal_log_likelihood(
          grid.k_values[ki], grid.rho_values[ri], data, grid,
          detail::grid_seed(grid.seed, ki, ri));
      res.log_marginals(static_cast<long>(ki), static_cast<long>(ri)) = lm;
      res.standard_errors(static_cast<long>(ki), static_cast<long>(ri)) = se;
      if (lm > best) {
        best = lm;
        res.k_hat = grid.k_values[ki];
        res.rho_hat = grid.rho_values[ri];
      }
    }
  }
  return res;
}

}  // namespace srd

#endif  // SRD_EMPIRICAL_BAYES_HPP
