#ifndef SRD_MODEL_HPP
#define SRD_MODEL_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "srd/covariance.hpp"
#include "srd/partition.hpp"

namespace srd {

/// A simple random density: a partition of [a,b] plus the lognormal law of
/// the step heights, conditioned on the heights integrating to one.  The
/// same object represents prior and posterior; conjugacy only shifts the
/// log-mean.
struct SimpleRandomDensity {
  Partition partition;
  LognormalParams params;

  SimpleRandomDensity(Partition partition_, LognormalParams params_)
      : partition(std::move(partition_)), params(std::move(params_)) {
    if (params.dim() != partition.size())
      throw std::invalid_argument(
          "SimpleRandomDensity: parameter dimension does not match partition");
  }

  int k() const { return partition.size(); }
};

/// Unnormalized log-density of the constrained heights in the projected
/// coordinates y in R^{k-1}.  The normalization constant of the conditioned
/// lognormal is unknown and never computed; every consumer works with
/// differences of this value.
inline double log_target(const SimpleRandomDensity& model, const Vector& y) {
  if (model.k() < 2)
    throw std::invalid_argument("log_target: degenerate single-cell support");
  const Vector h = complete_heights(model.partition, y);
  for (int i = 0; i < h.size(); ++i)
    if (!(h[i] > 0.0)) return -std::numeric_limits<double>::infinity();
  return lognormal_logpdf(model.params, h);
}

/// Log-likelihood sum_i c_i log h_i.  Cells with zero count contribute
/// nothing regardless of the height there.
inline double log_likelihood(const CountVector& c, const Vector& h) {
  if (c.counts.size() != h.size())
    throw std::invalid_argument("log_likelihood: dimension mismatch");
  double ll = 0.0;
  for (int i = 0; i < h.size(); ++i) {
    if (c.counts[i] == 0) continue;
    if (!(h[i] > 0.0)) return -std::numeric_limits<double>::infinity();
    ll += c.counts[i] * std::log(h[i]);
  }
  return ll;
}

/// Conjugate update: the posterior is the same law with log-mean
/// m* = m + Sigma c.
inline SimpleRandomDensity posterior(const SimpleRandomDensity& model, const CountVector& c) {
  if (c.counts.size() != model.k())
    throw std::invalid_argument("posterior: count vector length does not match model");
  if (c.partition_fingerprint != model.partition.fingerprint())
    throw std::invalid_argument(
        "posterior: counts were binned against a different partition");
  const Vector m_star = model.params.m + model.params.cov.entries() * c.counts.cast<double>();
  return SimpleRandomDensity(model.partition, LognormalParams(m_star, model.params.cov));
}

/// Value of the step function with heights h at x.
inline double evaluate_density(const Partition& p, const Vector& h, double x) {
  if (h.size() != p.size())
    throw std::invalid_argument("evaluate_density: height vector length mismatch");
  return h[p.cell_of(x)];
}

}  // namespace srd

#endif  // SRD_MODEL_HPP
