#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "srd/covariance.hpp"

using srd::CovarianceSpec;
using srd::CovMatrix;
using srd::gaussian_cov;
using srd::induce_sigma;
using srd::LognormalParams;
using srd::lognormal_logpdf;
using srd::Matrix;
using srd::uniform_partition;
using srd::Vector;

TEST_CASE("gaussian_cov evaluates the kernel") {
  CHECK(gaussian_cov({0.05, 20000.0}, 0.3, 0.3) == doctest::Approx(0.05));
  CHECK(gaussian_cov({1.0, 0.0001}, 0.0, 1.0) == doctest::Approx(std::exp(-0.0001)));
  // adjacent midpoints of a 100-cell partition of [0,1]
  CHECK(gaussian_cov({0.05, 20000.0}, 0.005, 0.015) ==
        doctest::Approx(0.05 * std::exp(-2.0)).epsilon(1e-12));
  CHECK(gaussian_cov({2.0, 3.0}, 0.2, 0.7) == gaussian_cov({2.0, 3.0}, 0.7, 0.2));
  CHECK_THROWS_AS(CovarianceSpec(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(CovarianceSpec(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("induce_sigma builds the midpoint covariance") {
  const CovMatrix one = induce_sigma(uniform_partition(0, 1, 1), {2.0, 5.0});
  CHECK(one.dim() == 1);
  CHECK(one.entries()(0, 0) == doctest::Approx(2.0));

  const CovMatrix two = induce_sigma(uniform_partition(0, 1, 2), {1.0, 1.0});
  CHECK(two.entries()(0, 0) == doctest::Approx(1.0));
  CHECK(two.entries()(1, 1) == doctest::Approx(1.0));
  CHECK(two.entries()(0, 1) == doctest::Approx(std::exp(-0.25)));
  CHECK(two.entries()(0, 1) == gaussian_cov({1.0, 1.0}, 0.25, 0.75));

  // exact symmetry, large k
  const CovMatrix big = induce_sigma(uniform_partition(0, 1, 100), {0.05, 22000.0});
  for (int i = 0; i < big.dim(); ++i)
    for (int j = 0; j < i; ++j) CHECK(big.entries()(i, j) == big.entries()(j, i));
  CHECK(big.jitter_applied() <= 1e-8 * 0.05);

  // Cholesky factor reproduces entries + jitter
  Matrix rebuilt = big.chol() * big.chol().transpose();
  rebuilt.diagonal().array() -= big.jitter_applied();
  CHECK((rebuilt - big.entries()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(big.logdet() ==
        doctest::Approx(2.0 * big.chol().diagonal().array().log().sum()));
}

TEST_CASE("jitter ladder reports the smallest sufficient rung") {
  // comfortably SPD: no jitter needed
  const CovMatrix easy = induce_sigma(uniform_partition(0, 1, 10), {1.0, 200.0});
  CHECK(easy.jitter_applied() == 0.0);
  // strongly correlated: some rung of the ladder must kick in, and the rung
  // below it must genuinely fail
  const CovMatrix hard = induce_sigma(uniform_partition(0, 1, 60), {1.0, 0.01});
  if (hard.jitter_applied() > 0.0) {
    Matrix m = hard.entries();
    const double below = hard.jitter_applied() == 1e-12 ? 0.0 : hard.jitter_applied() / 100.0;
    m.diagonal().array() += below;
    Eigen::LLT<Matrix> llt(m);
    CHECK(llt.info() != Eigen::Success);
  }
}

TEST_CASE("lognormal_logpdf closed forms") {
  // m = 0, Sigma = I, u = 1: all log terms vanish
  LognormalParams std3(Vector::Zero(3), CovMatrix::factorize(Matrix::Identity(3, 3), 1.0));
  CHECK(lognormal_logpdf(std3, Vector::Ones(3)) ==
        doctest::Approx(-1.5 * std::log(2.0 * std::numbers::pi)));

  // 1-D closed form at the mode of the log scale
  LognormalParams one(Vector::Constant(1, 5.0),
                      CovMatrix::factorize(Matrix::Identity(1, 1), 1.0));
  CHECK(lognormal_logpdf(one, Vector::Constant(1, std::exp(5.0))) ==
        doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi) - 5.0));

  // support boundary
  Vector with_zero = Vector::Ones(3);
  with_zero(1) = 0.0;
  CHECK(lognormal_logpdf(std3, with_zero) == -std::numeric_limits<double>::infinity());
  with_zero(1) = -2.0;
  CHECK(lognormal_logpdf(std3, with_zero) == -std::numeric_limits<double>::infinity());
}

namespace {

double scalar_lognormal_logpdf(double x, double mu, double var) {
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - std::log(x) -
         0.5 * (std::log(x) - mu) * (std::log(x) - mu) / var;
}

}  // namespace

TEST_CASE("diagonal covariance factorizes into scalar lognormals") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.2, 2.0);
  const int k = 5;
  Matrix diag = Matrix::Zero(k, k);
  Vector m(k), u(k);
  for (int i = 0; i < k; ++i) {
    diag(i, i) = unif(rng);
    m[i] = unif(rng) - 1.0;
    u[i] = unif(rng);
  }
  LognormalParams params(m, CovMatrix::factorize(diag, 1.0));
  double expected = 0.0;
  for (int i = 0; i < k; ++i) expected += scalar_lognormal_logpdf(u[i], m[i], diag(i, i));
  CHECK(lognormal_logpdf(params, u) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("lognormal_logpdf is permutation invariant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.1, 1.5);
  const int k = 4;
  Matrix a(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a(i, j) = unif(rng);
  Matrix sigma = a * a.transpose() + Matrix::Identity(k, k);
  Vector m(k), u(k);
  for (int i = 0; i < k; ++i) {
    m[i] = unif(rng);
    u[i] = unif(rng);
  }
  const double base = lognormal_logpdf(LognormalParams(m, CovMatrix::factorize(sigma, 1.0)), u);

  std::vector<int> perm = {2, 0, 3, 1};
  Matrix sigma_p(k, k);
  Vector m_p(k), u_p(k);
  for (int i = 0; i < k; ++i) {
    m_p[i] = m[perm[static_cast<std::size_t>(i)]];
    u_p[i] = u[perm[static_cast<std::size_t>(i)]];
    for (int j = 0; j < k; ++j)
      sigma_p(i, j) = sigma(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  const double permuted =
      lognormal_logpdf(LognormalParams(m_p, CovMatrix::factorize(sigma_p, 1.0)), u_p);
  CHECK(base == doctest::Approx(permuted).epsilon(1e-10));
}
