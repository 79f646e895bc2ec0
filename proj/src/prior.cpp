#include "bmevt/bayes.hpp"

#include <cmath>
#include <numbers>

namespace bmevt {

namespace {

double raw_log_shape(double gamma, const PriorSpec& spec) {
  const double z = (gamma - spec.loc) / spec.scale;
  switch (spec.shape) {
    case ShapePrior::student_t: {
      const double v = spec.df;
      return std::lgamma(0.5 * (v + 1.0)) - std::lgamma(0.5 * v) - 0.5 * std::log(v * std::numbers::pi) -
             0.5 * (v + 1.0) * std::log1p(z * z / v) - std::log(spec.scale);
    }
    case ShapePrior::normal:
      return normal_log_pdf(z) - std::log(spec.scale);
    case ShapePrior::uniform:
      return 0.0;
  }
  return 0.0;
}

/// log of the mass of the untruncated shape density on (-1/2, upper).
double log_truncated_mass(const PriorSpec& spec) {
  const double lo = -0.5;
  const double hi = spec.gamma_upper;
  switch (spec.shape) {
    case ShapePrior::normal:
      return std::log(normal_cdf((hi - spec.loc) / spec.scale) -
                      normal_cdf((lo - spec.loc) / spec.scale));
    case ShapePrior::uniform:
      return std::log(hi - lo);
    case ShapePrior::student_t: {
      auto f = [&](double g) { return std::exp(raw_log_shape(g, spec)); };
      const int panels = static_cast<int>(std::ceil((hi - lo) / (0.25 * spec.scale))) + 4;
      return std::log(integrate_gl(f, lo, hi, std::min(panels, 100000)));
    }
  }
  return 0.0;
}

void check_spec(const PriorSpec& spec) {
  if (!(spec.gamma_upper > -0.5) || !std::isfinite(spec.gamma_upper))
    throw std::invalid_argument("shape prior needs a finite upper truncation point");
  if (spec.shape != ShapePrior::uniform && !(spec.scale > 0.0))
    throw std::invalid_argument("shape prior scale must be positive");
  if (spec.shape == ShapePrior::student_t && !(spec.df > 0.0))
    throw std::invalid_argument("Student-t degrees of freedom must be positive");
}

}  // namespace

PriorSpec PriorSpec::anchored_at(const GevFit& fit) {
  PriorSpec spec;
  spec.gamma_upper = fit.gamma_upper();
  spec.anchor_mu = fit.params.mu;
  spec.anchor_sigma = fit.params.sigma;
  return spec;
}

double log_shape_prior(double gamma, const PriorSpec& spec) {
  check_spec(spec);
  if (!(gamma > -0.5 && gamma < spec.gamma_upper)) return -kInf;
  // The truncation mass depends only on the spec; recompute it only when the
  // spec changes between calls on this thread.
  thread_local PriorSpec cached_for;
  thread_local double cached_mass = kNaN;
  if (std::isnan(cached_mass) || cached_for.shape != spec.shape || cached_for.df != spec.df ||
      cached_for.loc != spec.loc || cached_for.scale != spec.scale ||
      cached_for.gamma_upper != spec.gamma_upper) {
    cached_mass = log_truncated_mass(spec);
    cached_for = spec;
  }
  return raw_log_shape(gamma, spec) - cached_mass;
}

double log_prior(const GevParamsd& params, const PriorSpec& spec) {
  if (!spec.anchor_mu || !spec.anchor_sigma || !std::isfinite(*spec.anchor_mu) ||
      !(*spec.anchor_sigma > 0.0) || !std::isfinite(*spec.anchor_sigma))
    throw std::invalid_argument("prior is not anchored at finite (mu_hat, sigma_hat)");
  if (!(params.sigma > 0.0)) return -kInf;
  const double ls = log_shape_prior(params.gamma, spec);
  if (ls == -kInf) return -kInf;
  const double a_mu = *spec.anchor_mu;
  const double a_sigma = *spec.anchor_sigma;
  const double log_loc = normal_log_pdf((params.mu - a_mu) / a_sigma) - std::log(a_sigma);
  const double log_sc = -params.sigma / a_sigma - std::log(a_sigma);
  return ls + log_loc + log_sc;
}

double log_posterior_unnorm(const GevParamsd& params, std::span<const double> maxima,
                            const PriorSpec& spec) {
  const double lp = log_prior(params, spec);
  if (lp == -kInf) return -kInf;
  const double ll = gev_loglik_sum(maxima, params);
  if (ll == -kInf) return -kInf;
  return ll + lp;
}

}  // namespace bmevt
