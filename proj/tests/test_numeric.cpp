#include "bmevt/numeric.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace bmevt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("normal quantile inverts the cdf") {
  CHECK_THAT(two_sided_z(0.05), WithinAbs(1.959963984540054, 1e-13));
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1 - 1e-9})
    CHECK_THAT(normal_cdf(normal_quantile(p)), WithinRel(p, 1e-12));
  CHECK(normal_quantile(0.0) == -kInf);
  CHECK_THROWS_AS(normal_quantile(1.5), std::invalid_argument);
}

TEST_CASE("Gauss-Legendre is exact for polynomials up to degree 2n - 1") {
  const auto rule = gauss_legendre(8);
  CHECK_THAT(rule.weights.sum(), WithinAbs(2.0, 1e-14));
  double s = 0.0;
  for (int i = 0; i < 8; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], 14);
  CHECK_THAT(s, WithinAbs(2.0 / 15.0, 1e-14));
  CHECK_THAT(integrate_gl([](double x) { return std::exp(x); }, 0.0, 1.0, 4),
             WithinAbs(std::numbers::e - 1.0, 1e-14));
}

TEST_CASE("adaptive Simpson") {
  CHECK_THAT(integrate_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-12),
             WithinAbs(2.0, 1e-10));
  CHECK_THAT(integrate_simpson([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-10), WithinAbs(2.0 / 3.0, 1e-8));
}

TEST_CASE("Nelder-Mead finds the Rosenbrock minimum") {
  const auto f = [](const Eigen::VectorXd& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  const auto r = nelder_mead(f, Eigen::Vector2d(-1.2, 1.0), Eigen::Vector2d(0.5, 0.5));
  CHECK(r.converged);
  CHECK_THAT(r.x[0], WithinAbs(1.0, 1e-5));
  CHECK_THAT(r.x[1], WithinAbs(1.0, 1e-5));
}

TEST_CASE("Nelder-Mead treats +inf as infeasible") {
  const auto f = [](const Eigen::VectorXd& x) { return x[0] < 0.5 ? kInf : (x[0] - 1.0) * (x[0] - 1.0); };
  const auto r = nelder_mead(f, Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Constant(1, 0.5));
  CHECK_THAT(r.x[0], WithinAbs(1.0, 1e-5));
}

TEST_CASE("type-7 quantiles") {
  const std::vector<double> xs{4, 1, 3, 2};
  CHECK(empirical_quantile(xs, 0.0) == 1.0);
  CHECK(empirical_quantile(xs, 1.0) == 4.0);
  CHECK_THAT(empirical_quantile(xs, 0.5), WithinAbs(2.5, 1e-15));
  CHECK_THAT(empirical_quantile(xs, 0.1), WithinAbs(1.3, 1e-15));
}

TEST_CASE("descriptive statistics") {
  const std::vector<double> xs{1, 2, 3, 4, 5};
  CHECK(mean(xs) == 3.0);
  CHECK_THAT(sample_sd(xs), WithinAbs(std::sqrt(2.5), 1e-15));
  // lag-1 autocorrelation with 1/n normalisation: sum (x_t - 3)(x_{t+1} - 3) / sum (x_t - 3)^2
  CHECK_THAT(autocorrelation(xs, 1), WithinAbs(4.0 / 10.0, 1e-15));
}

TEST_CASE("effective sample size of an AR(1) chain") {
  Rng rng(5);
  const double rho = 0.8;
  std::vector<double> x(200000);
  double v = 0.0;
  for (double& e : x) e = v = rho * v + std::sqrt(1 - rho * rho) * rng.normal();
  const double expected = x.size() * (1 - rho) / (1 + rho);
  CHECK_THAT(effective_sample_size(x), WithinRel(expected, 0.1));
}

TEST_CASE("seed derivation is deterministic and spreads counters") {
  CHECK(derive_seed(1, 2, 3, 4) == derive_seed(1, 2, 3, 4));
  CHECK(derive_seed(1, 2, 3, 4) != derive_seed(1, 2, 3, 5));
  CHECK(derive_seed(1, 2, 3, 0) != derive_seed(1, 3, 2, 0));
  Rng a(9), b(9);
  for (int i = 0; i < 10; ++i) CHECK(a.uniform() == b.uniform());
}
