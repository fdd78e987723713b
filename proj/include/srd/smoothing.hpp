#ifndef SRD_SMOOTHING_HPP
#define SRD_SMOOTHING_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "srd/partition.hpp"
#include "srd/special.hpp"

namespace srd {

/// Bernstein basis of degree N: the N+1 Beta(i+1, N-i+1) densities on [0,1].
/// With equal weights 1/(N+1) they sum to the constant density.
struct BernsteinBasis {
  int N;

  explicit BernsteinBasis(int degree) : N(degree) {
    if (N < 1) throw std::invalid_argument("BernsteinBasis: degree must be >= 1");
  }

  int size() const { return N + 1; }
  double shape_a(int i) const { return i + 1.0; }
  double shape_b(int i) const { return N - i + 1.0; }

  double evaluate(int i, double x) const {
    if (x < 0.0 || x > 1.0) return 0.0;
    const double a = shape_a(i);
    const double b = shape_b(i);
    if (x == 0.0) return i == 0 ? static_cast<double>(N + 1) : 0.0;
    if (x == 1.0) return i == N ? static_cast<double>(N + 1) : 0.0;
    return std::exp(beta_logpdf(x, a, b));
  }
};

/// Closed-form Gram matrix of the Bernstein basis:
/// M_ij = B(i+j+1, 2N-i-j+1) / (B(i+1, N-i+1) B(j+1, N-j+1)),
/// evaluated in log space.
inline Matrix overlap_matrix(int N) {
  if (N < 1) throw std::invalid_argument("overlap_matrix: degree must be >= 1");
  if (N > 500) throw std::invalid_argument("overlap_matrix: degree above 500 unsupported");
  Matrix m(N + 1, N + 1);
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = std::exp(log_beta(i + j + 1.0, 2.0 * N - i - j + 1.0) -
                                log_beta(i + 1.0, N - i + 1.0) -
                                log_beta(j + 1.0, N - j + 1.0));
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

/// Quadratic program min a^T M a - J^T a over the probability simplex.
struct QPProblem {
  Matrix M;
  Vector J;
};

/// A convex combination of Bernstein basis densities.
struct MixtureDensity {
  BernsteinBasis basis;
  Vector weights;

  MixtureDensity(BernsteinBasis basis_, Vector weights_)
      : basis(basis_), weights(std::move(weights_)) {
    if (weights.size() != basis.size())
      throw std::invalid_argument("MixtureDensity: weight count does not match basis");
    if (weights.minCoeff() < -1e-12 || std::abs(weights.sum() - 1.0) > 1e-10)
      throw std::invalid_argument("MixtureDensity: weights must lie on the simplex");
  }
};

inline double evaluate_mixture(const MixtureDensity& mix, double x) {
  if (x < 0.0 || x > 1.0) return 0.0;
  double v = 0.0;
  for (int i = 0; i < mix.basis.size(); ++i)
    if (mix.weights[i] > 0.0) v += mix.weights[i] * mix.basis.evaluate(i, x);
  return v;
}

/// Moment vector J_i = 2 * integral of g_i times the step function with
/// heights h_bar.  A partition on a general [a,b] is affinely transported to
/// [0,1]; heights pick up the factor (b-a).
inline Vector moment_vector(const BernsteinBasis& basis, const Partition& p,
                            const Vector& h_bar) {
  const int k = p.size();
  if (h_bar.size() != k) throw std::invalid_argument("moment_vector: dimension mismatch");
  if (h_bar.minCoeff() < -1e-12 || std::abs(s_delta(p, h_bar) - 1.0) > 1e-8)
    throw std::invalid_argument("moment_vector: heights do not form a density");
  const double a = p.a();
  const double len = p.b() - p.a();
  Vector j(basis.size());
  for (int i = 0; i < basis.size(); ++i) {
    const double sa = basis.shape_a(i);
    const double sb = basis.shape_b(i);
    double acc = 0.0;
    double prev = 0.0;  // I at the mapped left knot, starts at 0
    for (int l = 0; l < k; ++l) {
      const double s = (p.knot(l + 1) - a) / len;
      const double cur = regularized_incomplete_beta(std::clamp(s, 0.0, 1.0), sa, sb);
      acc += h_bar[l] * len * (cur - prev);
      prev = cur;
    }
    j[i] = 2.0 * acc;
  }
  return j;
}

/// Euclidean projection onto the probability simplex.
inline Vector project_to_simplex(const Vector& v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double tau = 0.0;
  for (int i = 0; i < n; ++i) {
    css += u[static_cast<std::size_t>(i)];
    const double t = (css - 1.0) / (i + 1);
    if (u[static_cast<std::size_t>(i)] - t > 0.0) tau = t;
  }
  Vector out(n);
  for (int i = 0; i < n; ++i) out[i] = std::max(v[i] - tau, 0.0);
  return out;
}

/// Max KKT violation of a candidate simplex minimizer: on the support the
/// gradient must be constant, off it no smaller than that constant.
inline double kkt_residual(const QPProblem& prob, const Vector& alpha) {
  const Vector grad = 2.0 * prob.M * alpha - prob.J;
  double mu = 0.0;
  int support = 0;
  for (int i = 0; i < alpha.size(); ++i)
    if (alpha[i] > 1e-12) {
      mu += grad[i];
      ++support;
    }
  mu /= std::max(support, 1);
  double res = 0.0;
  for (int i = 0; i < alpha.size(); ++i) {
    if (alpha[i] > 1e-12)
      res = std::max(res, std::abs(grad[i] - mu));
    else
      res = std::max(res, std::max(mu - grad[i], 0.0));
  }
  return res;
}

/// Accelerated projected gradient on the simplex.  The step is 1/L with
/// L = 2 lambda_max(M) bounded by power iteration.
inline MixtureDensity solve_simplex_qp(const QPProblem& prob) {
  const int n = static_cast<int>(prob.J.size());
  if (prob.M.rows() != n || prob.M.cols() != n)
    throw std::invalid_argument("solve_simplex_qp: dimension mismatch");
  if (!prob.M.isApprox(prob.M.transpose(), 1e-12))
    throw std::invalid_argument("solve_simplex_qp: matrix is not symmetric");
  // a plain Cholesky breaks down for high-degree Gram matrices that are PD
  // but ill conditioned; LDLT with a relative tolerance on the pivots still
  // rejects genuinely indefinite input
  {
    Eigen::LDLT<Matrix> ldlt(prob.M);
    const Vector d = ldlt.vectorD();
    const double scale = d.cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || d.minCoeff() < -1e-10 * scale)
      throw std::invalid_argument("solve_simplex_qp: matrix is not positive definite");
  }

  double lmax;
  {
    Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
    lmax = 1.0;
    for (int it = 0; it < 200; ++it) {
      Vector w = prob.M * v;
      lmax = w.norm();
      if (lmax == 0.0) break;
      v = w / lmax;
    }
  }
  const double step = 1.0 / (2.0 * lmax * 1.01);

  Vector alpha = Vector::Constant(n, 1.0 / n);
  Vector momentum = alpha;
  double t = 1.0;
  for (long it = 0; it < 100000; ++it) {
    const Vector grad_m = 2.0 * prob.M * momentum - prob.J;
    Vector next = project_to_simplex(momentum - step * grad_m);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    momentum = next + ((t - 1.0) / t_next) * (next - alpha);
    alpha = std::move(next);
    t = t_next;

    if (it % 20 == 0) {
      const Vector grad = 2.0 * prob.M * alpha - prob.J;
      if ((alpha - project_to_simplex(alpha - step * grad)).norm() < 1e-9) break;
    }
  }
  // clip projection round-off
  alpha = alpha.cwiseMax(0.0);
  alpha /= alpha.sum();
  return MixtureDensity(BernsteinBasis(n - 1), std::move(alpha));
}

/// Weights turning Bernstein polynomial coefficients of a density f into a
/// Beta mixture: alpha_i = f(i/N) / (N+1).
inline Vector bernstein_weights_of(const Vector& f_values) {
  const int n = static_cast<int>(f_values.size());
  if (n < 2) throw std::invalid_argument("bernstein_weights_of: need at least two values");
  return f_values / static_cast<double>(n);
}

}  // namespace srd

#endif  // SRD_SMOOTHING_HPP
