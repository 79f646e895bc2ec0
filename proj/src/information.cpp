#include "bmevt/frequentist.hpp"

#include <algorithm>
#include <cmath>

namespace bmevt {

namespace {

using J3 = Jet<3>;

Eigen::Matrix3d jet_hessian(const J3& j) { return 0.5 * (j.h + j.h.transpose()); }

/// Log-density at (gamma0, 0, 1) as a Jet, for the observation whose
/// log(-log G) equals s. Written through w = 1 + gamma (x - mu) / sigma,
/// whose value exp(-gamma0 s) is exact even where x sits next to the finite
/// endpoint of the support.
J3 log_density_at_loglog(double s, double gamma0) {
  const double x = std::expm1(-gamma0 * s) / gamma0;
  J3 w(std::exp(-gamma0 * s));
  w.g << x, -gamma0, -gamma0 * x;
  w.h << 0.0, -1.0, -x,
         -1.0, 0.0, gamma0,
         -x, gamma0, 2.0 * gamma0 * x;
  const J3 g = J3::variable(gamma0, 0);
  const J3 sigma = J3::variable(1.0, 2);
  J3 log_w = log(w);
  log_w.v = -gamma0 * s;
  return -(1.0 + 1.0 / g) * log_w - exp(-log_w / g) - log(sigma);
}

}  // namespace

Eigen::Matrix3d log_density_hessian(double x, const GevParamsd& params) {
  const GevParams<J3> p{J3::variable(params.gamma, 0), J3::variable(params.mu, 1),
                        J3::variable(params.sigma, 2)};
  const J3 l = gev_log_density(x, p);
  if (!std::isfinite(l.v)) throw std::invalid_argument("x outside the support");
  return jet_hessian(l);
}

Eigen::Matrix3d expected_information(const GevParamsd& params) {
  const double gamma = params.gamma;
  if (!(params.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(gamma > -0.5)) throw numerical_error("information not positive definite for gamma <= -1/2");

  // E over X ~ G_gamma written as an integral over s = log(-log G(X)) in R,
  // whose density is exp(s - e^s).
  const bool near_gumbel = std::abs(gamma) < kGammaSeriesThreshold;
  // The left tail decays like exp((1 + 2 min(gamma, 0)) s) times a polynomial.
  const double rate = 1.0 + 2.0 * std::min(gamma, 0.0);
  double s_min = -50.0 - 40.0 / rate;
  if (!near_gumbel) s_min = std::max(s_min, -600.0 / std::abs(gamma));
  const double s_max = 5.0;
  const int panels = static_cast<int>(std::ceil((s_max - s_min) / 2.0));

  Eigen::Matrix3d info0;
  const GaussLegendreRule rule = gauss_legendre(32);
  const double half = 0.5 * (s_max - s_min) / panels;
  info0.setZero();
  for (int p = 0; p < panels; ++p) {
    const double mid = s_min + (2 * p + 1) * half;
    for (int i = 0; i < rule.nodes.size(); ++i) {
      const double s = mid + half * rule.nodes[i];
      const double weight = std::exp(s - std::exp(s));
      if (weight == 0.0) continue;
      const Eigen::Matrix3d h = near_gumbel
                                    ? log_density_hessian(-s, GevParamsd{gamma, 0.0, 1.0})
                                    : jet_hessian(log_density_at_loglog(s, gamma));
      info0 -= rule.weights[i] * half * weight * h;
    }
  }

  const Eigen::Vector3d a_inv(1.0, 1.0 / params.sigma, 1.0 / params.sigma);
  return a_inv.asDiagonal() * info0 * a_inv.asDiagonal();
}

}  // namespace bmevt
