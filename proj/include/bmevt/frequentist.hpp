#pragma once

#include "bmevt/blocks.hpp"
#include "bmevt/gev.hpp"
#include "bmevt/numeric.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace bmevt {

/// Mean one-observation log-likelihood over the block maxima; -inf as soon
/// as one maximum falls outside the support.
[[nodiscard]] double gev_loglik(std::span<const double> maxima, const GevParamsd& params);

/// Summed log-likelihood k * gev_loglik.
[[nodiscard]] double gev_loglik_sum(std::span<const double> maxima, const GevParamsd& params);

// ---------------------------------------------------------------------------
// GEV maximum likelihood

enum class FitStatus {
  converged,
  singular_information,  // optimum found, observed information not positive definite
};

struct GevFit {
  GevParamsd params;
  double loglik = -kInf;                  // summed log-likelihood at the optimum
  Eigen::Matrix3d observed_info;          // minus the Hessian of the summed log-likelihood
  Eigen::Matrix3d info_inv_standardized;  // (A obs A / k)^{-1}, A = diag(1, sigma, sigma)
  std::size_t k = 0;
  double q = 0.5;
  FitStatus status = FitStatus::converged;
  int evaluations = 0;

  [[nodiscard]] bool has_information() const { return status == FitStatus::converged; }
  /// Upper bound k^q of the restricted shape space.
  [[nodiscard]] double gamma_upper() const;
  /// Covariance of the Gaussian approximation to the MLE: observed_info^{-1}.
  [[nodiscard]] Eigen::Matrix3d covariance() const;
  [[nodiscard]] Eigen::Vector3d standard_errors() const;
};

/// Thrown when no start of the multi-start simplex search converges.
class fit_error : public numerical_error {
 public:
  fit_error(const std::string& what, GevParamsd best) : numerical_error(what), best_(best) {}
  [[nodiscard]] const GevParamsd& best() const { return best_; }

 private:
  GevParamsd best_;
};

struct FitOptions {
  double q = 0.5;
  int perturbed_starts = 4;
  int max_evals_per_start = 20000;
};

/// Probability-weighted-moments starting values.
[[nodiscard]] GevParamsd gev_pwm_estimate(std::span<const double> maxima);

/// MLE over Theta_n = (-1/2, k^q) x R x (0, inf).
[[nodiscard]] GevFit fit_gev_mle(std::span<const double> maxima, const FitOptions& options = {});

/// Central-difference Hessian of the summed log-likelihood at `params`.
/// Returns nullopt if a stencil point leaves the support.
[[nodiscard]] std::optional<Eigen::Matrix3d> loglik_hessian(std::span<const double> maxima,
                                                            const GevParamsd& params);

/// Exact Hessian of the one-observation log-likelihood w.r.t. (gamma, mu, sigma).
[[nodiscard]] Eigen::Matrix3d log_density_hessian(double x, const GevParamsd& params);

/// Expected information I(vartheta) = -E[Hessian of the log-density] under G_vartheta.
[[nodiscard]] Eigen::Matrix3d expected_information(const GevParamsd& params);

// ---------------------------------------------------------------------------
// Extremal index

struct ThetaFit {
  double theta_hat = 1.0;
  double sigma_tilde_sq = 0.0;
  std::size_t K = 10;
  std::size_t k_tilde = 0;
  std::size_t m_tilde = 0;
  double var_hat = 0.0;  // theta^4 sigma_tilde^2 / k_tilde

  [[nodiscard]] double sigma_tilde() const;
};

/// argmax over (0, 1] of log theta - theta mean(Y): min(1, k / sum Y).
[[nodiscard]] double theta_mle(const PseudoObs& pseudo);

/// K-origin sliding estimator of sigma^2(theta_0).
[[nodiscard]] double theta_sliding_variance(std::span<const double> series, std::size_t m_tilde,
                                            std::size_t K);

/// One term sigma^2_{n,j} of the sliding estimator (origin j, 1-based).
[[nodiscard]] double theta_origin_variance(std::span<const double> series, std::size_t m_tilde,
                                           std::size_t origin);

/// Convenience: theta_mle + theta_sliding_variance on the same (series, m_tilde).
[[nodiscard]] ThetaFit fit_theta(std::span<const double> series, std::size_t m_tilde,
                                 std::size_t K = 10);

// ---------------------------------------------------------------------------
// Risk functionals and intervals

struct RiskQuery {
  double tau = 0.9;          // return-level probability
  double tau_e = 0.999;      // extreme VaR level
  std::size_t m = 1;         // block size used for fitting
  std::size_t m_star = 1;    // target block size (return level)
  double alpha = 0.05;
  double b_hat = 0.0;        // bias plug-in
};

[[nodiscard]] Interval ci_gamma_symmetric(const GevFit& fit, double alpha, double b_hat = 0.0);
[[nodiscard]] Interval ci_theta_symmetric(const ThetaFit& theta_fit, double alpha);

/// -log(tau^{m/m*}).
[[nodiscard]] double return_level_neglog(double tau, std::size_t m, std::size_t m_star);
/// -log(tau_E^{m theta}); throws when the level underflows.
[[nodiscard]] double var_neglog(double tau_e, std::size_t m, double theta);

[[nodiscard]] double return_level_point(const GevParamsd& params, double tau, std::size_t m,
                                        std::size_t m_star);
[[nodiscard]] double var_point(const GevParamsd& params, double theta, double tau_e,
                               std::size_t m);

[[nodiscard]] Interval ci_return_level_symmetric(const GevFit& fit, const RiskQuery& query);
[[nodiscard]] Interval ci_var_symmetric(const GevFit& fit, const ThetaFit& theta_fit,
                                        const RiskQuery& query);

enum class RiskTarget { return_level, value_at_risk };

/// Monte-Carlo asymmetric interval: push Gaussian draws around the MLE (and
/// around theta-hat for VaR) through the risk functional, take quantiles.
[[nodiscard]] Interval ci_asymmetric_mc(const GevFit& fit, const ThetaFit* theta_fit,
                                        RiskTarget target, const RiskQuery& query,
                                        std::size_t draws, std::uint64_t seed);

/// Same with an explicit covariance (exposed for testing degenerate cases).
[[nodiscard]] Interval ci_asymmetric_mc(const GevParamsd& center, const Eigen::Matrix3d& covariance,
                                        double gamma_upper, double theta_hat, double theta_var,
                                        RiskTarget target, const RiskQuery& query,
                                        std::size_t draws, std::uint64_t seed);

}  // namespace bmevt
