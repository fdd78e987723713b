#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "srd/model.hpp"

using srd::complete_heights;
using srd::CountVector;
using srd::CovMatrix;
using srd::evaluate_density;
using srd::log_likelihood;
using srd::log_target;
using srd::LognormalParams;
using srd::Matrix;
using srd::Partition;
using srd::posterior;
using srd::SimpleRandomDensity;
using srd::uniform_partition;
using srd::Vector;

namespace {

SimpleRandomDensity standard_model(int k) {
  Partition p = uniform_partition(0.0, 1.0, k);
  return SimpleRandomDensity(p, LognormalParams(Vector::Zero(k),
                                                CovMatrix::factorize(Matrix::Identity(k, k), 1.0)));
}

CountVector counts_for(const Partition& p, const Eigen::VectorXi& c) {
  CountVector out;
  out.counts = c;
  out.n = c.sum();
  out.partition_fingerprint = p.fingerprint();
  return out;
}

Matrix random_spd(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix a(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a(i, j) = unif(rng);
  return a * a.transpose() + 0.5 * Matrix::Identity(k, k);
}

}  // namespace

TEST_CASE("log_target handles the support boundary and uniform heights") {
  const auto m2 = standard_model(2);
  Vector y(1);
  y << 2.5;  // completed second height is negative
  CHECK(log_target(m2, y) == -std::numeric_limits<double>::infinity());

  const auto m3 = standard_model(3);
  Vector y3(2);
  y3 << 1.0, 1.0;
  CHECK(log_target(m3, y3) == doctest::Approx(-1.5 * std::log(2.0 * std::numbers::pi)));

  CHECK_THROWS_AS(log_target(standard_model(1), Vector(0)), std::invalid_argument);
}

TEST_CASE("k=2 target is a proper density after numeric normalization") {
  const auto m2 = standard_model(2);
  auto target = [&](double y) {
    Vector v(1);
    v << y;
    const double lt = log_target(m2, v);
    return std::isinf(lt) ? 0.0 : std::exp(lt);
  };
  const double z = oracles::integrate(target, 1e-12, 2.0 - 1e-12, 1e-13);
  CHECK(z > 0.0);
  const double renorm =
      oracles::integrate([&](double y) { return target(y) / z; }, 1e-12, 2.0 - 1e-12, 1e-13);
  CHECK(renorm == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("log_likelihood sums count-weighted log heights") {
  const Partition p4 = uniform_partition(0, 1, 4);
  Eigen::VectorXi c(4);
  c << 3, 2, 1, 1;
  CHECK(log_likelihood(counts_for(p4, c), Vector::Ones(4)) == doctest::Approx(0.0));

  const Partition p2 = uniform_partition(0, 1, 2);
  Eigen::VectorXi c2(2);
  c2 << 2, 1;
  Vector h(2);
  h << 0.5, 1.5;
  CHECK(log_likelihood(counts_for(p2, c2), h) ==
        doctest::Approx(2.0 * std::log(0.5) + std::log(1.5)));

  // zero count screens an arbitrarily small height
  c2 << 3, 0;
  h << 2.0, 1e-300;
  CHECK(log_likelihood(counts_for(p2, c2), h) == doctest::Approx(3.0 * std::log(2.0)));

  // zero height with a positive count
  c2 << 1, 1;
  h << 0.0, 2.0;
  CHECK(log_likelihood(counts_for(p2, c2), h) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("posterior shifts the log-mean by Sigma c") {
  const auto m2 = standard_model(2);
  Eigen::VectorXi zero = Eigen::VectorXi::Zero(2);
  CHECK(posterior(m2, counts_for(m2.partition, zero)).params.m == m2.params.m);

  Partition p = uniform_partition(0, 1, 2);
  SimpleRandomDensity prior(
      p, LognormalParams(Vector::Ones(2), CovMatrix::factorize(Matrix::Identity(2, 2), 1.0)));
  Eigen::VectorXi c(2);
  c << 3, 5;
  const auto post = posterior(prior, counts_for(p, c));
  CHECK(post.params.m(0) == doctest::Approx(4.0));
  CHECK(post.params.m(1) == doctest::Approx(6.0));

  // counts from another partition are refused
  const Partition other = uniform_partition(0, 1, 2 + 1);
  Eigen::VectorXi c3 = Eigen::VectorXi::Zero(3);
  CHECK_THROWS_AS(posterior(prior, counts_for(other, c3)), std::invalid_argument);
}

TEST_CASE("closure identity: prior x likelihood equals posterior up to a constant") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unif(0.1, 1.2);
  for (int k : {2, 5, 20}) {
    const Partition p = uniform_partition(0.0, 1.0, k);
    Vector m(k);
    for (int i = 0; i < k; ++i) m[i] = unif(rng) - 0.5;
    const Matrix sigma = random_spd(rng, k);
    Eigen::VectorXi c(k);
    for (int i = 0; i < k; ++i) c[i] = static_cast<int>(rng() % 10);

    SimpleRandomDensity prior(p, LognormalParams(m, CovMatrix::factorize(sigma, 1.0)));
    const auto post = posterior(prior, counts_for(p, c));
    const auto cv = counts_for(p, c);

    std::vector<double> diffs;
    for (int pt = 0; pt < 20; ++pt) {
      Vector y(k - 1);
      for (int i = 0; i < k - 1; ++i) y[i] = unif(rng);
      // not all y land in H_1; retry until interior
      Vector h = complete_heights(p, y);
      if (h.minCoeff() <= 0.0) {
        --pt;
        continue;
      }
      diffs.push_back(log_target(prior, y) + log_likelihood(cv, h) - log_target(post, y));
    }
    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= static_cast<double>(diffs.size());
    double var = 0.0;
    for (double d : diffs) var += (d - mean) * (d - mean);
    var /= static_cast<double>(diffs.size());
    CHECK(var < 1e-16);
  }
}

TEST_CASE("posterior is associative over data batches") {
  std::mt19937_64 rng(5);
  const int k = 6;
  const Partition p = uniform_partition(0.0, 1.0, k);
  SimpleRandomDensity prior(
      p, LognormalParams(Vector::Ones(k), CovMatrix::factorize(random_spd(rng, k), 1.0)));
  Eigen::VectorXi c1(k), c2(k);
  for (int i = 0; i < k; ++i) {
    c1[i] = static_cast<int>(rng() % 5);
    c2[i] = static_cast<int>(rng() % 5);
  }
  const auto sequential = posterior(posterior(prior, counts_for(p, c1)), counts_for(p, c2));
  const auto batched = posterior(prior, counts_for(p, c1 + c2));
  CHECK((sequential.params.m - batched.params.m).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("evaluate_density looks up the step height") {
  const Partition p2 = uniform_partition(0, 1, 2);
  Vector h(2);
  h << 0.4, 1.6;
  CHECK(evaluate_density(p2, h, 0.75) == doctest::Approx(1.6));
  CHECK(evaluate_density(p2, h, 1.0) == doctest::Approx(1.6));
  CHECK(evaluate_density(uniform_partition(0, 1, 4), Vector::Ones(4), 0.123) ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(evaluate_density(p2, h, 1.5), std::domain_error);
}
