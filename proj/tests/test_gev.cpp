#include "bmevt/gev.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace bmevt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Bisection on the cdf; independent of the closed-form quantile.
double quantile_by_root(double p, double gamma) {
  double lo = -50.0, hi = 50.0;
  if (gamma < 0.0) hi = -1.0 / gamma;
  if (gamma > 0.0) lo = -1.0 / gamma;
  while (gev_cdf(hi, gamma) < p) hi = lo + 2.0 * (hi - lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gev_cdf(mid, gamma) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("gev_cdf reference values") {
  CHECK_THAT(gev_cdf(0.0, 0.0), WithinAbs(std::exp(-1.0), 1e-15));
  CHECK_THAT(gev_cdf(1.0, 1.0), WithinAbs(std::exp(-0.5), 1e-15));
  CHECK(gev_cdf(2.5, -0.5) == 1.0);
  CHECK(gev_cdf(-2.0, 1.0) == 0.0);
  CHECK_THROWS_AS(gev_cdf(std::nan(""), 0.1), std::invalid_argument);
}

TEST_CASE("gev_log_density reference values") {
  CHECK_THAT(gev_log_density(0.0, GevParamsd{0.0, 0.0, 1.0}), WithinAbs(-1.0, 1e-15));
  CHECK(gev_log_density(-2.0, GevParamsd{1.0, 0.0, 1.0}) == -kInf);
  CHECK_THAT(gev_log_density(1.0, GevParamsd{1.0, 0.0, 1.0}), WithinAbs(-0.5 - std::log(4.0), 1e-14));
  CHECK_THAT(gev_log_density(1.0, GevParamsd{1.0, 0.0, 1.0}), WithinAbs(-1.886294, 1e-6));
  // location-scale: log g(x) = log g_gamma((x - mu)/sigma) - log sigma
  const GevParamsd p{0.3, 2.0, 1.5};
  CHECK_THAT(gev_log_density(4.0, p),
             WithinAbs(gev_log_density((4.0 - 2.0) / 1.5, GevParamsd{0.3, 0.0, 1.0}) - std::log(1.5), 1e-14));
}

TEST_CASE("gev_quantile reference values") {
  for (double g : {-0.4, 0.0, 0.3, 2.0}) CHECK_THAT(gev_quantile(std::exp(-1.0), g), WithinAbs(0.0, 1e-15));
  CHECK_THAT(gev_quantile(0.9, 0.0), WithinAbs(2.250367, 1e-6));
  CHECK_THAT(gev_quantile(0.9, 1.0), WithinAbs(quantile_by_root(0.9, 1.0), 1e-10));
  CHECK_THAT(gev_quantile(0.9, 1.0), WithinAbs(8.491, 1e-3));
  CHECK_THROWS_AS(gev_quantile(1.0, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(gev_quantile(0.0, 0.2), std::invalid_argument);
}

TEST_CASE("gev_model_quantile") {
  CHECK_THAT(gev_model_quantile(std::exp(-1.0), GevParamsd{0.4, 3.0, 2.0}), WithinAbs(3.0, 1e-14));
  CHECK_THAT(gev_model_quantile(0.9, GevParamsd{0.0, 0.0, 1.0}), WithinAbs(2.250367, 1e-6));
  CHECK_THAT(gev_model_quantile(0.99, GevParamsd{0.2, 1.0, 0.5}),
             WithinAbs(1.0 + 0.5 * quantile_by_root(0.99, 0.2), 1e-9));
}

TEST_CASE("gev_quantile_dgamma") {
  for (double g : {-0.4, 0.0, 0.7}) CHECK_THAT(gev_quantile_dgamma(std::exp(-1.0), g), WithinAbs(0.0, 1e-15));
  CHECK_THAT(gev_quantile_dgamma(std::exp(-std::numbers::e), 0.0), WithinAbs(0.5, 1e-15));
  const double h = 1e-5;
  const double fd = (gev_quantile(0.9, 0.3 + h) - gev_quantile(0.9, 0.3 - h)) / (2 * h);
  CHECK_THAT(gev_quantile_dgamma(0.9, 0.3), WithinAbs(fd, 1e-6));
}

TEST_CASE("quantile is increasing in p and the cdf is increasing in z") {
  for (double g : {-0.45, -0.1, 0.0, 0.25, 1.5}) {
    double prev_q = -kInf, prev_c = -1.0;
    for (int i = 1; i < 200; ++i) {
      const double q = gev_quantile(i / 200.0, g);
      CHECK(q > prev_q);
      prev_q = q;
      const double c = gev_cdf(-3.0 + 0.05 * i, g);
      CHECK(c >= prev_c);
      prev_c = c;
    }
  }
}

TEST_CASE("Jet derivatives of the log-density match finite differences") {
  const GevParamsd p{0.25, 0.5, 1.3};
  const double x = 2.0;
  GevParams<Jet<3>> pj{Jet<3>::variable(p.gamma, 0), Jet<3>::variable(p.mu, 1), Jet<3>::variable(p.sigma, 2)};
  const Jet<3> lj = gev_log_density(x, pj);
  CHECK_THAT(lj.v, WithinAbs(gev_log_density(x, p), 1e-14));
  const double h = 1e-6;
  for (int i = 0; i < 3; ++i) {
    GevParamsd up = p, dn = p;
    double* u = i == 0 ? &up.gamma : i == 1 ? &up.mu : &up.sigma;
    double* d = i == 0 ? &dn.gamma : i == 1 ? &dn.mu : &dn.sigma;
    *u += h;
    *d -= h;
    CHECK_THAT(lj.g[i], WithinAbs((gev_log_density(x, up) - gev_log_density(x, dn)) / (2 * h), 1e-7));
  }
}

TEST_CASE("support bounds") {
  CHECK(gev_support({0.5, 1.0, 2.0}).lower == Catch::Approx(-3.0));
  CHECK(gev_support({-0.5, 1.0, 2.0}).upper == Catch::Approx(5.0));
  CHECK(std::isinf(gev_support({0.0, 1.0, 2.0}).lower));
}
