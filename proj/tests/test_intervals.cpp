#include "bmevt/frequentist.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace bmevt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

GevFit identity_fit(const GevParamsd& p, std::size_t k) {
  GevFit f;
  f.params = p;
  f.k = k;
  f.info_inv_standardized = Eigen::Matrix3d::Identity();
  f.observed_info = static_cast<double>(k) * Eigen::Matrix3d::Identity();
  f.observed_info(1, 1) /= p.sigma * p.sigma;
  f.observed_info(2, 2) /= p.sigma * p.sigma;
  return f;
}

}  // namespace

TEST_CASE("gamma interval arithmetic") {
  GevFit f = identity_fit({0.3, 0.0, 1.0}, 100);
  const Interval iv = ci_gamma_symmetric(f, 0.05);
  CHECK_THAT(iv.lower, WithinAbs(0.3 - 0.1959964, 1e-7));
  CHECK_THAT(iv.upper, WithinAbs(0.3 + 0.1959964, 1e-7));
  const Interval shifted = ci_gamma_symmetric(f, 0.05, 0.1);
  CHECK_THAT(shifted.lower, WithinAbs(iv.lower - 0.1, 1e-15));
  CHECK_THAT(shifted.upper, WithinAbs(iv.upper - 0.1, 1e-15));
  f.status = FitStatus::singular_information;
  CHECK_THROWS_AS(ci_gamma_symmetric(f, 0.05), numerical_error);
}

TEST_CASE("return level point") {
  CHECK_THAT(return_level_point({0.0, 0.0, 1.0}, 0.9, 30, 30), WithinAbs(2.250367, 1e-6));
  CHECK(return_level_point({0.2, 0.0, 1.0}, 0.9, 30, 300) > return_level_point({0.2, 0.0, 1.0}, 0.9, 30, 30));
  CHECK_THAT(return_level_neglog(0.9, 30, 300), WithinRel(-std::log(0.9) / 10.0, 1e-15));
  CHECK_THROWS_AS(return_level_neglog(0.9, 30, 10), std::invalid_argument);
}

TEST_CASE("return level interval with identity information") {
  const GevFit f = identity_fit({0.0, 0.0, 1.0}, 100);
  RiskQuery q;
  q.tau = 0.9;
  q.m = 1;
  q.m_star = 1;
  const Interval iv = ci_return_level_symmetric(f, q);
  const double ll = std::log(-std::log(0.9));
  const double qd = ll * ll / 2.0;  // q_0(0.9)
  const double Q = -ll;              // Q_0(0.9)
  CHECK_THAT(qd, WithinAbs(2.532, 1e-3));
  const double psi = std::sqrt(1.0 + 1.0 / (qd * qd) + Q * Q / (qd * qd));
  const double half = two_sided_z(0.05) * psi / 10.0 * qd;
  CHECK_THAT(0.5 * (iv.lower + iv.upper), WithinAbs(Q, 1e-12));
  CHECK_THAT(0.5 * iv.width(), WithinAbs(half, 1e-12));
}

TEST_CASE("VaR point") {
  CHECK_THAT(var_point({0.0, 0.0, 1.0}, 0.5, 0.999, 100), WithinAbs(-std::log(-50.0 * std::log(0.999)), 1e-12));
  CHECK_THAT(var_point({0.0, 0.0, 1.0}, 0.5, 0.999, 100), WithinAbs(2.9952, 1e-4));
  const GevParamsd p{0.3, 1.0, 2.0};
  CHECK_THAT(var_point(p, 1.0, 0.99, 1), WithinAbs(gev_model_quantile(0.99, p), 1e-12));
  CHECK_THROWS_AS(var_neglog(0.999, 100, 0.0), std::invalid_argument);
}

TEST_CASE("VaR interval collapses to the GEV quantile term without theta uncertainty") {
  const GevFit f = identity_fit({0.2, 0.0, 1.0}, 100);
  ThetaFit tf;
  tf.theta_hat = 0.5;
  tf.sigma_tilde_sq = 0.0;
  tf.k_tilde = 100;
  RiskQuery q;
  q.tau_e = 0.999;
  q.m = 100;
  const Interval iv = ci_var_symmetric(f, tf, q);
  const double x = -std::log(0.999) * 100 * 0.5;
  const double qd = gev_quantile_dgamma_neglog(x, 0.2);
  // gamma >= 0: v = (1, 0, 0) so psi^2 = (I^{-1})_11 = 1
  CHECK_THAT(0.5 * iv.width(), WithinRel(two_sided_z(0.05) / 10.0 * qd, 1e-12));
  tf.sigma_tilde_sq = 2.0;
  CHECK(ci_var_symmetric(f, tf, q).width() > iv.width());
}

TEST_CASE("asymmetric interval with zero covariance collapses to the point") {
  RiskQuery q;
  q.tau = 0.9;
  q.m = 30;
  q.m_star = 1800;
  const GevParamsd p{0.3, 2.0, 1.5};
  const Interval iv =
      ci_asymmetric_mc(p, Eigen::Matrix3d::Zero(), 10.0, 1.0, 0.0, RiskTarget::return_level, q, 100, 1);
  const double point = return_level_point(p, 0.9, 30, 1800);
  CHECK_THAT(iv.lower, WithinRel(point, 1e-14));
  CHECK_THAT(iv.upper, WithinRel(point, 1e-14));
}

TEST_CASE("asymmetric interval is stable in the number of draws") {
  // Same seed, so the larger run extends the smaller one. Without
  // extrapolation the pushforward is close to symmetric; for m* >> m the upper
  // endpoint's own Monte-Carlo error is already about 0.5% of the width.
  RiskQuery q;
  q.tau = 0.9;
  q.m = 30;
  q.m_star = 30;
  const GevParamsd p{0.3, 2.0, 1.5};
  Eigen::Matrix3d cov;
  cov << 0.01, 0.002, 0.001,
         0.002, 0.04, 0.01,
         0.001, 0.01, 0.03;
  const Interval a = ci_asymmetric_mc(p, cov, 10.0, 1.0, 0.0, RiskTarget::return_level, q, 50000, 4);
  const Interval b = ci_asymmetric_mc(p, cov, 10.0, 1.0, 0.0, RiskTarget::return_level, q, 100000, 4);
  CHECK(std::abs(a.lower - b.lower) < 0.005 * b.width());
  CHECK(std::abs(a.upper - b.upper) < 0.005 * b.width());
  CHECK(a.lower < return_level_point(p, 0.9, 30, 30));
  CHECK(a.upper > return_level_point(p, 0.9, 30, 30));
}

TEST_CASE("asymmetric interval rejects an indefinite covariance") {
  RiskQuery q;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Identity();
  cov(0, 0) = -1.0;
  CHECK_THROWS_AS(ci_asymmetric_mc({0.1, 0.0, 1.0}, cov, 10.0, 1.0, 0.0, RiskTarget::return_level, q, 100, 1),
                  numerical_error);
}
