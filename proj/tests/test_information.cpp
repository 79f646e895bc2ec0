#include "bmevt/frequentist.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace bmevt;

namespace {

double digamma(double x) {
  double r = 0.0;
  while (x < 8.0) r -= 1.0 / x++;
  const double f = 1.0 / (x * x);
  return r + std::log(x) - 0.5 / x - f * (1.0 / 12 - f * (1.0 / 120 - f * (1.0 / 252 - f * (1.0 / 240))));
}

// Closed-form per-observation information (Prescott and Walden), ordered (gamma, mu, sigma).
Eigen::Matrix3d closed_form_information(double xi, double sigma) {
  const double euler = 0.5772156649015329;
  const double p = (1 + xi) * (1 + xi) * std::tgamma(1 + 2 * xi);
  const double g2 = std::tgamma(2 + xi);
  const double q = g2 * (digamma(1 + xi) + (1 + xi) / xi);
  Eigen::Matrix3d m;
  const double mm = p / (sigma * sigma);
  const double ss = (1 - 2 * g2 + p) / (sigma * sigma * xi * xi);
  const double gg = (std::numbers::pi * std::numbers::pi / 6 + std::pow(1 - euler + 1 / xi, 2) - 2 * q / xi +
                     p / (xi * xi)) / (xi * xi);
  const double ms = -(p - g2) / (sigma * sigma * xi);
  const double mg = -(q - p / xi) / (sigma * xi);
  const double sg = -(1 - euler + (1 - g2) / xi - q + p / xi) / (sigma * xi * xi);
  m << gg, mg, sg,
       mg, mm, ms,
       sg, ms, ss;
  return m;
}

double max_rel_diff(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("expected information matches the closed form") {
  for (double g : {-0.4, -0.2, 0.2, 0.5, 1.0, 2.0}) {
    INFO("gamma = " << g);
    CHECK(max_rel_diff(expected_information({g, 0.0, 1.0}), closed_form_information(g, 1.0)) < 1e-8);
  }
}

TEST_CASE("expected information matches a Monte-Carlo average of finite-difference Hessians") {
  const GevParamsd p{0.2, 0.0, 1.0};
  Rng rng(2024);
  Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
  const int draws = 1000000;
  const double h = 1e-4;
  auto f = [](double x, double g, double m, double s) { return gev_log_density(x, GevParamsd{g, m, s}); };
  for (int n = 0; n < draws; ++n) {
    const double x = gev_draw(p, [&] { return rng.uniform(); });
    double v[3] = {p.gamma, p.mu, p.sigma};
    auto at = [&](int i, double di, int j, double dj) {
      double w[3] = {v[0], v[1], v[2]};
      w[i] += di;
      w[j] += dj;
      return f(x, w[0], w[1], w[2]);
    };
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j <= i; ++j) {
        const double hij = (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4 * h * h);
        acc(i, j) -= hij;
        if (i != j) acc(j, i) -= hij;
      }
  }
  acc /= draws;
  // Diagonal entries are the dominant ones; off-diagonals compared on the same scale.
  CHECK(max_rel_diff(acc, expected_information(p)) < 0.01);
}

TEST_CASE("information transforms with location and scale") {
  const Eigen::Matrix3d base = expected_information({0.3, 0.0, 1.0});
  const double sigma = 2.5;
  const Eigen::Vector3d a_inv(1.0, 1.0 / sigma, 1.0 / sigma);
  const Eigen::Matrix3d scaled = a_inv.asDiagonal() * base * a_inv.asDiagonal();
  CHECK(max_rel_diff(expected_information({0.3, -4.0, sigma}), scaled) < 1e-12);
}

TEST_CASE("information is positive definite across the shape range") {
  for (double g : {-0.4, 0.0, 1.0, 5.0}) {
    INFO("gamma = " << g);
    CHECK(Eigen::LLT<Eigen::Matrix3d>(expected_information({g, 0.0, 1.0})).info() == Eigen::Success);
  }
  CHECK_THROWS_AS(expected_information({-0.5, 0.0, 1.0}), numerical_error);
}

TEST_CASE("information is continuous through the Gumbel case") {
  const Eigen::Matrix3d at0 = expected_information({0.0, 0.0, 1.0});
  CHECK(max_rel_diff(expected_information({1e-7, 0.0, 1.0}), at0) < 1e-5);
  CHECK(max_rel_diff(expected_information({-1e-7, 0.0, 1.0}), at0) < 1e-5);
  CHECK(max_rel_diff(expected_information({2e-6, 0.0, 1.0}), at0) < 1e-4);
  // I_mumu = Gamma(1) = 1 for the Gumbel model
  CHECK(std::abs(at0(1, 1) - 1.0) < 1e-10);
}

TEST_CASE("exact log-density Hessian matches finite differences") {
  const GevParamsd p{-0.25, 0.3, 1.7};
  const double x = 1.1;
  const Eigen::Matrix3d h = log_density_hessian(x, p);
  const double e = 1e-4;
  auto f = [&](double g, double m, double s) { return gev_log_density(x, GevParamsd{g, m, s}); };
  CHECK(std::abs(h(0, 0) - (f(p.gamma + e, p.mu, p.sigma) - 2 * f(p.gamma, p.mu, p.sigma) +
                            f(p.gamma - e, p.mu, p.sigma)) / (e * e)) < 1e-5);
  CHECK(std::abs(h(1, 2) - (f(p.gamma, p.mu + e, p.sigma + e) - f(p.gamma, p.mu + e, p.sigma - e) -
                            f(p.gamma, p.mu - e, p.sigma + e) + f(p.gamma, p.mu - e, p.sigma - e)) / (4 * e * e)) <
        1e-5);
  CHECK_THROWS_AS(log_density_hessian(20.0, p), std::invalid_argument);
}
