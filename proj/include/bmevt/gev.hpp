#pragma once

// Generalized extreme value family G_gamma(z) = exp(-(1 + gamma z)_+^{-1/gamma}).
//
// All functions are templated on the scalar type so that the same code path
// serves plain evaluation (double) and exact differentiation (Jet<N>). Near
// gamma = 0 the closed forms suffer catastrophic cancellation, so for
// |gamma| < kGammaSeriesThreshold they switch to second-order expansions in gamma.

#include "bmevt/jet.hpp"
#include "bmevt/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace bmevt {

inline constexpr double kGammaSeriesThreshold = 1e-6;

template <typename Scalar = double>
struct GevParams {
  Scalar gamma{0.0};
  Scalar mu{0.0};
  Scalar sigma{1.0};
};

using GevParamsd = GevParams<double>;

struct SupportInfo {
  double lower = -kInf;
  double upper = kInf;
};

[[nodiscard]] inline SupportInfo gev_support(const GevParamsd& p) {
  if (p.gamma > 0.0) return {p.mu - p.sigma / p.gamma, kInf};
  if (p.gamma < 0.0) return {-kInf, p.mu - p.sigma / p.gamma};
  return {};
}

namespace detail {

/// log(1 + gamma z) / gamma, with its gamma -> 0 limit z.
template <typename Scalar>
Scalar scaled_log1p(const Scalar& z, const Scalar& gamma) {
  using std::log1p;
  if (std::abs(value_of(gamma)) < kGammaSeriesThreshold)
    return z - gamma * z * z * 0.5 + gamma * gamma * z * z * z * (1.0 / 3.0);
  return log1p(gamma * z) / gamma;
}

/// Q_gamma as a function of L = log(-log p): (exp(-gamma L) - 1) / gamma.
template <typename Scalar>
Scalar quantile_from_loglog(double loglog, const Scalar& gamma) {
  using std::expm1;
  const double L = loglog;
  if (std::abs(value_of(gamma)) < kGammaSeriesThreshold)
    return -L + gamma * (L * L * 0.5) - gamma * gamma * (L * L * L / 6.0);
  return expm1(-gamma * L) / gamma;
}

inline void check_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("probability must lie in (0, 1)");
}

}  // namespace detail

/// Standard GEV cdf G_gamma(z).
template <typename Scalar = double>
[[nodiscard]] Scalar gev_cdf(const Scalar& z, const Scalar& gamma) {
  using std::exp;
  if (std::isnan(value_of(z)) || std::isnan(value_of(gamma)))
    throw std::invalid_argument("gev_cdf: NaN input");
  if (value_of(1.0 + gamma * z) <= 0.0) return Scalar(value_of(gamma) > 0.0 ? 0.0 : 1.0);
  return exp(-exp(-detail::scaled_log1p(z, gamma)));
}

/// log g_vartheta(x) = log g_gamma((x - mu)/sigma) - log sigma; -inf off support.
template <typename Scalar = double>
[[nodiscard]] Scalar gev_log_density(double x, const GevParams<Scalar>& p) {
  using std::exp;
  using std::log;
  using std::log1p;
  const Scalar z = (Scalar(x) - p.mu) / p.sigma;
  const Scalar arg = p.gamma * z;
  if (!(value_of(p.sigma) > 0.0) || !(value_of(arg) > -1.0)) return Scalar(-kInf);
  const Scalar t = detail::scaled_log1p(z, p.gamma);
  return -t - log1p(arg) - exp(-t) - log(p.sigma);
}

/// Q_gamma(p) = ((-log p)^{-gamma} - 1) / gamma, limit -log(-log p).
template <typename Scalar = double>
[[nodiscard]] Scalar gev_quantile(double p, const Scalar& gamma) {
  detail::check_probability(p);
  return detail::quantile_from_loglog(std::log(-std::log(p)), gamma);
}

/// Q_gamma evaluated at p = exp(-x) given x = -log p > 0 directly; avoids
/// forming p when it is extremely close to 1 or to 0.
template <typename Scalar = double>
[[nodiscard]] Scalar gev_quantile_neglog(double neg_log_p, const Scalar& gamma) {
  if (!(neg_log_p > 0.0) || !std::isfinite(neg_log_p))
    throw std::invalid_argument("-log p must be positive and finite");
  return detail::quantile_from_loglog(std::log(neg_log_p), gamma);
}

/// q_gamma(p) = d/dgamma Q_gamma(p), with x = -log p given directly.
[[nodiscard]] inline double gev_quantile_dgamma_neglog(double neg_log_p, double gamma) {
  if (!(neg_log_p > 0.0) || !std::isfinite(neg_log_p))
    throw std::invalid_argument("-log p must be positive and finite");
  const double L = std::log(neg_log_p);
  if (std::abs(gamma) < kGammaSeriesThreshold)
    return L * L * 0.5 - gamma * L * L * L / 3.0 + gamma * gamma * L * L * L * L / 8.0;
  const double u = -gamma * L;
  return (u * std::exp(u) - std::expm1(u)) / (gamma * gamma);
}

[[nodiscard]] inline double gev_quantile_dgamma(double p, double gamma) {
  detail::check_probability(p);
  return gev_quantile_dgamma_neglog(-std::log(p), gamma);
}

/// tau-quantile of G_vartheta: mu + sigma Q_gamma(p).
template <typename Scalar = double>
[[nodiscard]] Scalar gev_model_quantile(double p, const GevParams<Scalar>& params) {
  return params.mu + params.sigma * gev_quantile(p, params.gamma);
}

/// Exact draw from G_vartheta by inversion.
template <typename URBG>
[[nodiscard]] double gev_draw(const GevParamsd& p, URBG&& uniform01) {
  return gev_model_quantile(uniform01(), p);
}

}  // namespace bmevt
