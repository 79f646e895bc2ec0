#pragma once

#include "bmevt/blocks.hpp"
#include "bmevt/frequentist.hpp"
#include "bmevt/gev.hpp"
#include "bmevt/numeric.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace bmevt {

// ---------------------------------------------------------------------------
// Priors

enum class ShapePrior { student_t, normal, uniform };

/// pi(gamma, mu, sigma) = pi_sh(gamma) pi_loc((mu - mu_hat)/sigma_hat)/sigma_hat
///                        pi_sc(sigma/sigma_hat)/sigma_hat
/// with a standard Gaussian pi_loc and a unit-rate exponential pi_sc. The
/// shape density is truncated to (-1/2, gamma_upper) and renormalised.
struct PriorSpec {
  ShapePrior shape = ShapePrior::student_t;
  double df = 3.0;
  double loc = 0.0;
  double scale = 1.0;
  double gamma_upper = kInf;
  std::optional<double> anchor_mu;
  std::optional<double> anchor_sigma;

  /// Default prior anchored at an MLE, with truncation at k^q.
  [[nodiscard]] static PriorSpec anchored_at(const GevFit& fit);
};

/// log of the truncated shape density; -inf outside (-1/2, gamma_upper).
[[nodiscard]] double log_shape_prior(double gamma, const PriorSpec& spec);
[[nodiscard]] double log_prior(const GevParamsd& params, const PriorSpec& spec);
/// k * gev_loglik + log_prior.
[[nodiscard]] double log_posterior_unnorm(const GevParamsd& params, std::span<const double> maxima,
                                          const PriorSpec& spec);

// ---------------------------------------------------------------------------
// Adaptive random-walk Metropolis-Hastings

struct ChainConfig {
  std::size_t iters = 100000;  // kept iterations after burn-in, before thinning
  std::size_t burn_in = 20000;
  std::size_t thin = 1;
  double target_accept = 0.234;
  std::uint64_t seed = 1;
  std::size_t adapt_interval = 100;
  double shrinkage = 0.05;
  /// Also report the effective sample size of a Gaussian importance sampler
  /// centred at the MLE (diagnostic only; does not change the chain).
  std::size_t importance_draws = 0;
  bool compute_ess = true;
};

struct PosteriorChain {
  std::vector<GevParamsd> draws;
  std::vector<double> log_post;  // unnormalised log posterior of each draw
  double acceptance_rate = 0.0;  // after burn-in
  Eigen::Vector3d ess = Eigen::Vector3d::Zero();
  std::optional<double> importance_ess;
  std::uint64_t seed = 0;

  [[nodiscard]] std::vector<double> gamma() const;
  [[nodiscard]] std::vector<double> mu() const;
  [[nodiscard]] std::vector<double> sigma() const;
};

struct RwmhRun {
  std::vector<Eigen::Vector3d> states;  // kept states after burn-in and thinning
  std::vector<double> log_target;       // target value at each kept state
  double acceptance_rate = 0.0;         // after burn-in
};

/// Adaptive random-walk Metropolis on an arbitrary three-dimensional target
/// (log density up to a constant; -inf outside the support). The proposal
/// starts from `proposal_cov` and adapts during burn-in only.
[[nodiscard]] RwmhRun adaptive_rwmh(const std::function<double(const Eigen::Vector3d&)>& log_target,
                                    const Eigen::Vector3d& start, const Eigen::Matrix3d& proposal_cov,
                                    const ChainConfig& config);

/// Random walk on (gamma, mu, log sigma) started at the MLE. Requires
/// fit.params inside the posterior support.
[[nodiscard]] PosteriorChain sample_posterior(std::span<const double> maxima, const GevFit& fit,
                                              const PriorSpec& prior, const ChainConfig& config);

// ---------------------------------------------------------------------------
// Extremal-index posterior

struct ThetaPriorSpec {
  std::function<double(double)> continuous = [](double) { return 1.0; };  // on (0, 1)
  double atom = 0.1;  // mass at theta = 1
};

/// Posterior of theta from the exponential pseudo-likelihood, optionally with
/// the curvature adjustment theta -> theta_hat + (theta - theta_hat)/(theta_hat sigma_tilde).
/// Evaluated on a fixed grid after normalising by quadrature.
class ThetaPosterior {
 public:
  static constexpr std::size_t kGridSize = 4096;

  ThetaPosterior(const PseudoObs& pseudo, const ThetaPriorSpec& prior, bool adjusted,
                 const ThetaFit* theta_fit);

  /// Density of the continuous part (integrates to 1 - atom_weight()).
  [[nodiscard]] double density(double theta) const;
  [[nodiscard]] double cdf(double theta) const;
  [[nodiscard]] double quantile(double p) const;
  [[nodiscard]] double mean() const { return mean_; }
  [[nodiscard]] double sd() const { return sd_; }
  [[nodiscard]] double atom_weight() const { return atom_weight_; }
  [[nodiscard]] double continuous_mass() const { return continuous_mass_; }
  /// log of the normalising constant of the unnormalised posterior.
  [[nodiscard]] double log_normalizer() const { return log_normalizer_; }
  [[nodiscard]] bool adjusted() const { return adjusted_; }
  [[nodiscard]] const std::vector<double>& grid() const { return grid_; }
  [[nodiscard]] const std::vector<double>& grid_density() const { return grid_density_; }
  [[nodiscard]] const std::vector<double>& grid_cdf() const { return grid_cdf_; }

  [[nodiscard]] double sample(Rng& rng) const { return quantile(rng.uniform()); }

 private:
  [[nodiscard]] double log_unnorm(double theta) const;

  ThetaPriorSpec prior_;
  double prior_log_mass_ = 0.0;
  double y_bar_ = 0.0;
  double k_tilde_ = 0.0;
  bool adjusted_ = false;
  double theta_hat_ = 1.0;
  double sigma_tilde_ = 1.0;
  double log_shift_ = 0.0;
  double lower_ = 0.0;
  double upper_ = 1.0;

  double log_normalizer_ = 0.0;
  double atom_weight_ = 0.0;
  double continuous_mass_ = 1.0;
  double mean_ = 0.0;
  double sd_ = 0.0;
  std::vector<double> grid_;
  std::vector<double> grid_density_;
  std::vector<double> grid_cdf_;
};

// ---------------------------------------------------------------------------
// Induced posteriors and credible intervals

/// mu + sigma Q_gamma(tau^{m/m*}) for every draw.
[[nodiscard]] std::vector<double> rl_posterior(const PosteriorChain& chain, double tau,
                                               std::size_t m, std::size_t m_star);

/// mu + sigma Q_gamma(tau_E^{m theta}) with an independent theta draw per chain draw.
[[nodiscard]] std::vector<double> var_posterior(const PosteriorChain& chain,
                                                const ThetaPosterior& theta_post, double tau_e,
                                                std::size_t m, std::uint64_t seed);

/// [mean - b_hat +- z sd].
[[nodiscard]] Interval credible_interval_symmetric(std::span<const double> samples, double alpha,
                                                   double b_hat = 0.0);
[[nodiscard]] Interval credible_interval_symmetric(const ThetaPosterior& post, double alpha,
                                                   double b_hat = 0.0);
/// Equal-tailed posterior quantiles.
[[nodiscard]] Interval credible_interval_asymmetric(std::span<const double> samples, double alpha);
[[nodiscard]] Interval credible_interval_asymmetric(const ThetaPosterior& post, double alpha);

}  // namespace bmevt
