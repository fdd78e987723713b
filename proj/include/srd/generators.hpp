#ifndef SRD_GENERATORS_HPP
#define SRD_GENERATORS_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace srd {

namespace detail {

inline double draw_beta(std::mt19937_64& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

}  // namespace detail

/// Density of the truncated exponential on [0,1] used by the examples:
/// f0(x) = 2 e^{-2(x-1)} / (e^2 - 1).
inline double trunc_exp_pdf(double x) {
  if (x < 0.0 || x > 1.0) return 0.0;
  return 2.0 * std::exp(-2.0 * (x - 1.0)) / (std::exp(2.0) - 1.0);
}

inline double trunc_exp_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return std::exp(2.0) * (1.0 - std::exp(-2.0 * x)) / (std::exp(2.0) - 1.0);
}

inline double trunc_exp_quantile(double u) {
  return -0.5 * std::log1p(-u * (1.0 - std::exp(-2.0)));
}

/// Synthetic data generators for the shipped benchmark distributions.
/// All draws are i.i.d. and deterministic per seed.
inline std::vector<double> gen_data(const std::string& name, long n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("gen_data: negative sample size");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> xs(static_cast<std::size_t>(n));

  if (name == "beta-mixture-ex1") {
    // (1/3) Beta(1,10) + (1/3) Beta(10,10) + (1/3) Beta(30,5)
    std::uniform_int_distribution<int> pick(0, 2);
    for (auto& x : xs) {
      switch (pick(rng)) {
        case 0: x = detail::draw_beta(rng, 1.0, 10.0); break;
        case 1: x = detail::draw_beta(rng, 10.0, 10.0); break;
        default: x = detail::draw_beta(rng, 30.0, 5.0); break;
      }
    }
  } else if (name == "beta42") {
    for (auto& x : xs) x = detail::draw_beta(rng, 4.0, 2.0);
  } else if (name == "trunc-exp") {
    for (auto& x : xs) x = trunc_exp_quantile(unif(rng));
  } else if (name == "triangular") {
    // symmetric triangular on [0,1], peak at 1/2
    for (auto& x : xs) {
      const double u = unif(rng);
      x = u <= 0.5 ? std::sqrt(0.5 * u) : 1.0 - std::sqrt(0.5 * (1.0 - u));
    }
  } else if (name == "trunc-normal-mixture") {
    std::normal_distribution<double> lo(0.25, 0.08);
    std::normal_distribution<double> hi(0.75, 0.10);
    std::bernoulli_distribution coin(0.5);
    for (auto& x : xs) {
      do {
        x = coin(rng) ? lo(rng) : hi(rng);
      } while (x < 0.0 || x > 1.0);
    }
  } else {
    throw std::invalid_argument("gen_data: unknown generator '" + name + "'");
  }
  return xs;
}

}  // namespace srd

#endif  // SRD_GENERATORS_HPP
