#ifndef SRD_COVARIANCE_HPP
#define SRD_COVARIANCE_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "srd/partition.hpp"

namespace srd {

/// Gaussian covariance family C(x,y) = rho * exp(-theta (x-y)^2).
struct CovarianceSpec {
  double rho;
  double theta;

  CovarianceSpec(double rho_, double theta_) : rho(rho_), theta(theta_) {
    if (!(rho > 0.0)) throw std::invalid_argument("CovarianceSpec: rho must be positive");
    if (!(theta > 0.0)) throw std::invalid_argument("CovarianceSpec: theta must be positive");
  }
};

inline double gaussian_cov(const CovarianceSpec& spec, double x, double y) {
  const double d = x - y;
  return spec.rho * std::exp(-spec.theta * d * d);
}

/// A symmetric positive definite matrix together with its Cholesky factor.
/// The inverse is never formed; quadratic forms go through triangular solves.
class CovMatrix {
public:
  /// Factorizes entries + jitter*I, escalating jitter along the ladder
  /// 0, scale*1e-12, scale*1e-10, scale*1e-8 until the Cholesky succeeds.
  static CovMatrix factorize(Matrix entries, double jitter_scale) {
    if (entries.rows() != entries.cols())
      throw std::invalid_argument("CovMatrix: matrix must be square");
    const double ladder[] = {0.0, 1e-12 * jitter_scale, 1e-10 * jitter_scale,
                             1e-8 * jitter_scale};
    for (double jitter : ladder) {
      Matrix shifted = entries;
      shifted.diagonal().array() += jitter;
      Eigen::LLT<Matrix> llt(shifted);
      if (llt.info() == Eigen::Success) {
        CovMatrix out;
        out.entries_ = std::move(entries);
        out.chol_ = llt.matrixL();
        out.logdet_ = 2.0 * out.chol_.diagonal().array().log().sum();
        out.jitter_ = jitter;
        return out;
      }
    }
    std::ostringstream msg;
    msg << "CovMatrix: Cholesky failed at dimension " << entries.rows()
        << " even with maximum jitter " << 1e-8 * jitter_scale;
    throw std::runtime_error(msg.str());
  }

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  const Matrix& chol() const { return chol_; }
  double logdet() const { return logdet_; }
  double jitter_applied() const { return jitter_; }

  /// Solves L w = v against the stored factor; the quadratic form
  /// v^T Sigma^{-1} v is then |w|^2.
  Vector forward_solve(const Vector& v) const {
    return chol_.triangularView<Eigen::Lower>().solve(v);
  }

  /// Full solve Sigma x = v.
  Vector solve(const Vector& v) const {
    Vector w = chol_.triangularView<Eigen::Lower>().solve(v);
    return chol_.transpose().triangularView<Eigen::Upper>().solve(w);
  }

private:
  CovMatrix() = default;
  Matrix entries_;
  Matrix chol_;
  double logdet_ = 0.0;
  double jitter_ = 0.0;
};

/// Covariance matrix induced at subinterval midpoints.
inline CovMatrix induce_sigma(const Partition& p, const CovarianceSpec& spec) {
  const int k = p.size();
  Matrix sigma(k, k);
  for (int i = 0; i < k; ++i) {
    sigma(i, i) = spec.rho;
    for (int j = 0; j < i; ++j) {
      const double v = gaussian_cov(spec, p.midpoint(i), p.midpoint(j));
      sigma(i, j) = v;
      sigma(j, i) = v;
    }
  }
  try {
    return CovMatrix::factorize(std::move(sigma), spec.rho);
  } catch (const std::runtime_error&) {
    std::ostringstream msg;
    msg << "induce_sigma: covariance not factorizable for k=" << k
        << ", rho=" << spec.rho << ", theta=" << spec.theta;
    throw std::runtime_error(msg.str());
  }
}

/// Parameters of a multivariate lognormal law L_k(m, Sigma).
struct LognormalParams {
  Vector m;
  CovMatrix cov;

  LognormalParams(Vector m_, CovMatrix cov_) : m(std::move(m_)), cov(std::move(cov_)) {
    if (m.size() != cov.dim())
      throw std::invalid_argument("LognormalParams: mean length does not match covariance");
  }

  int dim() const { return cov.dim(); }
};

/// Log-density of L_k(m, Sigma) at u.  Returns -inf off the positive orthant.
inline double lognormal_logpdf(const LognormalParams& params, const Vector& u) {
  const int k = params.dim();
  if (u.size() != k)
    throw std::invalid_argument("lognormal_logpdf: dimension mismatch");
  for (int i = 0; i < k; ++i)
    if (!(u[i] > 0.0)) return -std::numeric_limits<double>::infinity();
  const Vector log_u = u.array().log();
  const Vector w = params.cov.forward_solve(log_u - params.m);
  return -0.5 * k * std::log(2.0 * std::numbers::pi) - 0.5 * params.cov.logdet() -
         log_u.sum() - 0.5 * w.squaredNorm();
}

}  // namespace srd

#endif  // SRD_COVARIANCE_HPP
