#include "bmevt/frequentist.hpp"

#include <algorithm>
#include <cmath>

namespace bmevt {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

void require_information(const GevFit& fit) {
  if (!fit.has_information()) throw numerical_error("observed information is singular");
}

Interval ordered(double a, double b) { return a <= b ? Interval{a, b} : Interval{b, a}; }

/// x' Iinv x with a symmetric 3x3 quadratic form.
double quad_form(const Eigen::Matrix3d& m, const Eigen::Vector3d& v) { return v.dot(m * v); }

}  // namespace

Interval ci_gamma_symmetric(const GevFit& fit, double alpha, double b_hat) {
  check_alpha(alpha);
  require_information(fit);
  const double psi = std::sqrt(fit.info_inv_standardized(0, 0));
  const double half = two_sided_z(alpha) * psi / std::sqrt(static_cast<double>(fit.k));
  const double centre = fit.params.gamma - b_hat;
  return {centre - half, centre + half};
}

Interval ci_theta_symmetric(const ThetaFit& theta_fit, double alpha) {
  check_alpha(alpha);
  if (theta_fit.k_tilde == 0) throw std::invalid_argument("theta fit has no blocks");
  const double t = theta_fit.theta_hat;
  const double half = two_sided_z(alpha) * t * t * theta_fit.sigma_tilde() /
                      std::sqrt(static_cast<double>(theta_fit.k_tilde));
  // Intersection with (0, 1]; the lower end stays strictly positive.
  const double lower = std::max(t - half, std::numeric_limits<double>::min());
  return {lower, std::min(t + half, 1.0)};
}

double return_level_neglog(double tau, std::size_t m, std::size_t m_star) {
  detail::check_probability(tau);
  if (m < 1 || m_star < m) throw std::invalid_argument("need 1 <= m <= m_star");
  return -std::log(tau) * static_cast<double>(m) / static_cast<double>(m_star);
}

double var_neglog(double tau_e, std::size_t m, double theta) {
  detail::check_probability(tau_e);
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in (0, 1]");
  const double x = -std::log(tau_e) * static_cast<double>(m) * theta;
  if (!(x > 0.0) || std::exp(-x) == 0.0)
    throw numerical_error("level too extreme for block size");
  return x;
}

double return_level_point(const GevParamsd& params, double tau, std::size_t m,
                          std::size_t m_star) {
  return params.mu +
         params.sigma * gev_quantile_neglog(return_level_neglog(tau, m, m_star), params.gamma);
}

double var_point(const GevParamsd& params, double theta, double tau_e, std::size_t m) {
  return params.mu + params.sigma * gev_quantile_neglog(var_neglog(tau_e, m, theta), params.gamma);
}

Interval ci_return_level_symmetric(const GevFit& fit, const RiskQuery& query) {
  check_alpha(query.alpha);
  require_information(fit);
  const double x = return_level_neglog(query.tau, query.m, query.m_star);
  const double g = fit.params.gamma;
  const double q = gev_quantile_dgamma_neglog(x, g);
  if (q == 0.0) throw numerical_error("degenerate sensitivity");
  const Eigen::Vector3d v(1.0, 1.0 / q, gev_quantile_neglog(x, g) / q);
  const double psi = std::sqrt(quad_form(fit.info_inv_standardized, v));
  const double r_hat = fit.params.mu + fit.params.sigma * gev_quantile_neglog(x, g);
  const double half = two_sided_z(query.alpha) * psi / std::sqrt(static_cast<double>(fit.k));
  const double scale = fit.params.sigma * q;
  return ordered(r_hat - scale * (query.b_hat + half), r_hat - scale * (query.b_hat - half));
}

Interval ci_var_symmetric(const GevFit& fit, const ThetaFit& theta_fit, const RiskQuery& query) {
  check_alpha(query.alpha);
  require_information(fit);
  const double theta = theta_fit.theta_hat;
  const double x = var_neglog(query.tau_e, query.m, theta);
  const double g = fit.params.gamma;
  const double q = gev_quantile_dgamma_neglog(x, g);
  if (q == 0.0) throw numerical_error("degenerate sensitivity");
  const Eigen::Vector3d v = g >= 0.0 ? Eigen::Vector3d(1.0, 0.0, 0.0) : Eigen::Vector3d(1.0, g * g, -g);
  // Finite-sample correction for the estimated extremal index; the base of
  // the power is -log of the level so that it is positive.
  const double denom = std::pow(x, g) * q;
  const double varsigma = theta_fit.sigma_tilde_sq * theta * theta / (denom * denom);
  const double psi = std::sqrt(quad_form(fit.info_inv_standardized, v) + varsigma);
  const double q_hat = fit.params.mu + fit.params.sigma * gev_quantile_neglog(x, g);
  const double half = two_sided_z(query.alpha) * psi / std::sqrt(static_cast<double>(fit.k));
  const double scale = fit.params.sigma * q;
  return ordered(q_hat - scale * (query.b_hat + half), q_hat - scale * (query.b_hat - half));
}

Interval ci_asymmetric_mc(const GevFit& fit, const ThetaFit* theta_fit, RiskTarget target,
                          const RiskQuery& query, std::size_t draws, std::uint64_t seed) {
  require_information(fit);
  if (target == RiskTarget::value_at_risk && theta_fit == nullptr)
    throw std::invalid_argument("VaR interval needs an extremal-index fit");
  const double theta_hat = theta_fit ? theta_fit->theta_hat : 1.0;
  const double theta_var = theta_fit ? theta_fit->var_hat : 0.0;
  return ci_asymmetric_mc(fit.params, fit.covariance(), fit.gamma_upper(), theta_hat, theta_var,
                          target, query, draws, seed);
}

Interval ci_asymmetric_mc(const GevParamsd& center, const Eigen::Matrix3d& covariance,
                          double gamma_upper, double theta_hat, double theta_var,
                          RiskTarget target, const RiskQuery& query, std::size_t draws,
                          std::uint64_t seed) {
  check_alpha(query.alpha);
  if (draws < 2) throw std::invalid_argument("need at least two Monte-Carlo draws");
  if (!(theta_var >= 0.0)) throw std::invalid_argument("theta variance must be non-negative");

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(0.5 * (covariance + covariance.transpose()));
  const Eigen::Vector3d lambda = eig.eigenvalues();
  const double tol = 1e-12 * std::max(1.0, lambda.cwiseAbs().maxCoeff());
  if (!covariance.allFinite() || lambda.minCoeff() < -tol)
    throw numerical_error("covariance not positive semi-definite");
  const Eigen::Matrix3d root =
      eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  const double theta_sd = std::sqrt(theta_var);

  Rng rng(seed);
  const std::size_t max_attempts = 1000 * draws;
  std::size_t attempts = 0;
  auto next_params = [&]() {
    for (;;) {
      if (++attempts > max_attempts) throw numerical_error("Gaussian draws keep leaving Theta_n");
      const Eigen::Vector3d e(rng.normal(), rng.normal(), rng.normal());
      const Eigen::Vector3d d = root * e;
      GevParamsd p{center.gamma + d[0], center.mu + d[1], center.sigma + d[2]};
      if (p.gamma > -0.5 && p.gamma < gamma_upper && p.sigma > 0.0) return p;
    }
  };
  auto next_theta = [&]() {
    if (theta_sd == 0.0) return theta_hat;
    for (;;) {
      if (++attempts > max_attempts) throw numerical_error("theta draws keep leaving (0, 1]");
      const double t = theta_hat + theta_sd * rng.normal();
      if (t > 0.0 && t <= 1.0) return t;
    }
  };

  std::vector<double> values(draws);
  const double rl_x = target == RiskTarget::return_level
                          ? return_level_neglog(query.tau, query.m, query.m_star)
                          : 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    const GevParamsd p = next_params();
    const double x = target == RiskTarget::return_level ? rl_x
                                                       : var_neglog(query.tau_e, query.m, next_theta());
    values[i] = p.mu + p.sigma * gev_quantile_neglog(x, p.gamma);
  }
  std::sort(values.begin(), values.end());
  return {sorted_quantile(values, query.alpha / 2.0), sorted_quantile(values, 1.0 - query.alpha / 2.0)};
}

}  // namespace bmevt
