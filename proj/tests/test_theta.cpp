#include "bmevt/frequentist.hpp"
#include "bmevt/simulate.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace bmevt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const std::vector<double> kToy{0.1, 0.9, 0.3, 0.7, 0.5, 0.2, 0.8, 0.4};

}  // namespace

TEST_CASE("theta_mle closed form") {
  PseudoObs p;
  p.y = {1.0, 3.0};
  CHECK_THAT(theta_mle(p), WithinAbs(0.5, 1e-15));
  p.y = {0.25, 0.75};
  CHECK(theta_mle(p) == 1.0);
  p.y = {0.0, 0.0};
  CHECK(theta_mle(p) == 1.0);
}

TEST_CASE("theta_mle maximises the pseudo log-likelihood") {
  PseudoObs p;
  p.y = {0.3, 2.2, 1.7, 0.9, 3.1};
  const double t = theta_mle(p);
  const double ybar = (0.3 + 2.2 + 1.7 + 0.9 + 3.1) / 5.0;
  auto ll = [&](double th) { return std::log(th) - th * ybar; };
  for (int i = 1; i <= 1000; ++i) CHECK(ll(i / 1000.0) <= ll(t) + 1e-15);
}

TEST_CASE("sliding variance matches a term-by-term transcription on the toy series") {
  CHECK_THAT(theta_sliding_variance(kToy, 2, 1), WithinAbs(oracle::sliding_variance(kToy, 2, 1), 1e-12));
  CHECK_THAT(theta_sliding_variance(kToy, 2, 2), WithinAbs(oracle::sliding_variance(kToy, 2, 2), 1e-12));
  CHECK_THAT(theta_origin_variance(kToy, 2, 1), WithinAbs(oracle::sigma2_term(kToy, 2, 1), 1e-12));
  CHECK_THAT(theta_origin_variance(kToy, 2, 2), WithinAbs(oracle::sigma2_term(kToy, 2, 2), 1e-12));
  // K = 1 is the disjoint-origin term
  CHECK(theta_sliding_variance(kToy, 2, 1) == theta_origin_variance(kToy, 2, 1));
}

TEST_CASE("sliding variance matches the transcription on random series") {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 2 + trial % 6;
    const std::size_t n = m * (3 + trial % 5) + trial % 3;
    std::vector<double> x(n);
    for (double& v : x) v = rng.normal();
    const std::size_t K = 1 + trial % 7;
    INFO("n = " << n << ", m = " << m << ", K = " << K);
    CHECK_THAT(theta_sliding_variance(x, m, K), WithinRel(oracle::sliding_variance(x, m, K), 1e-12));
  }
}

TEST_CASE("sliding variance rejects unusable inputs") {
  CHECK_THROWS_AS(theta_sliding_variance(kToy, 8, 1), std::invalid_argument);
  CHECK_THROWS_AS(theta_sliding_variance(kToy, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(theta_sliding_variance(kToy, 0, 1), std::invalid_argument);
}

TEST_CASE("theta estimate on iid data is close to one") {
  Rng rng(8);
  std::vector<double> x(10000);
  for (double& v : x) v = rng.uniform();
  const ThetaFit tf = fit_theta(x, 50);
  CHECK(tf.theta_hat >= 0.85);
  CHECK(tf.theta_hat <= 1.0);
  CHECK(tf.k_tilde == 200);
  CHECK_THAT(tf.var_hat, WithinRel(std::pow(tf.theta_hat, 4) * tf.sigma_tilde_sq / 200.0, 1e-14));
}

TEST_CASE("theta estimate on ARMAX data is close to the extremal index") {
  const auto x = simulate_armax(10800, 0.5, 3);
  const ThetaFit tf = fit_theta(x, 90, 10);
  CHECK(std::abs(tf.theta_hat - 0.5) < 0.1);
  CHECK(tf.sigma_tilde_sq > 0.0);
}

TEST_CASE("ci_theta_symmetric arithmetic and clipping") {
  ThetaFit tf;
  tf.theta_hat = 0.5;
  tf.sigma_tilde_sq = 4.0;
  tf.k_tilde = 100;
  const Interval iv = ci_theta_symmetric(tf, 0.05);
  CHECK_THAT(iv.lower, WithinAbs(0.5 - two_sided_z(0.05) * 0.25 * 2.0 / 10.0, 1e-15));
  CHECK_THAT(iv.lower, WithinAbs(0.402, 1e-3));
  CHECK_THAT(iv.upper, WithinAbs(0.598, 1e-3));
  tf.theta_hat = 1.0;
  tf.sigma_tilde_sq = 1e-6;
  const Interval top = ci_theta_symmetric(tf, 0.05);
  CHECK(top.upper == 1.0);
  CHECK(top.lower < 1.0);
}
