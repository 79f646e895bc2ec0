#include "bmevt/bayes.hpp"

#include <algorithm>
#include <cmath>

namespace bmevt {

namespace {

constexpr double kEdge = 1e-10;
constexpr double kQuadTol = 1e-13;

}  // namespace

ThetaPosterior::ThetaPosterior(const PseudoObs& pseudo, const ThetaPriorSpec& prior, bool adjusted,
                               const ThetaFit* theta_fit)
    : prior_(prior), adjusted_(adjusted) {
  if (pseudo.y.empty()) throw std::invalid_argument("no pseudo-observations");
  if (!(prior.atom >= 0.0 && prior.atom < 1.0)) throw std::invalid_argument("atom mass must lie in [0, 1)");
  if (!prior.continuous) throw std::invalid_argument("continuous prior density missing");
  y_bar_ = bmevt::mean(pseudo.y);
  k_tilde_ = static_cast<double>(pseudo.y.size());
  if (adjusted) {
    if (theta_fit == nullptr) throw std::invalid_argument("adjusted posterior needs a theta fit");
    theta_hat_ = theta_fit->theta_hat;
    sigma_tilde_ = theta_fit->sigma_tilde();
    if (!(theta_hat_ * sigma_tilde_ > 0.0))
      throw numerical_error("adjustment undefined for a zero variance estimate");
  }

  // Normalise the continuous prior so that a constant factor in it cannot
  // change the balance with the atom.
  const double prior_mass = integrate_simpson(prior.continuous, kEdge, 1.0 - kEdge, 1e-12);
  if (!(prior_mass > 0.0) || !std::isfinite(prior_mass))
    throw std::invalid_argument("continuous prior has no mass on (0, 1)");
  prior_log_mass_ = std::log(prior_mass);

  // The map is increasing, so g(theta) > 0 exactly above theta_hat - theta_hat^2 sigma_tilde.
  lower_ = kEdge;
  upper_ = 1.0 - kEdge;
  if (adjusted_) lower_ = std::max(lower_, theta_hat_ - theta_hat_ * theta_hat_ * sigma_tilde_);

  const double g1 = adjusted_ ? theta_hat_ + (1.0 - theta_hat_) / (theta_hat_ * sigma_tilde_) : 1.0;
  const double log_atom = prior.atom > 0.0 && g1 > 0.0
                              ? std::log(prior.atom) + k_tilde_ * (std::log(g1) - g1 * y_bar_)
                              : -kInf;

  const bool has_continuous = lower_ < upper_;
  grid_.assign(kGridSize, 0.0);
  std::vector<double> log_grid(kGridSize, -kInf);
  double top = log_atom;
  if (has_continuous) {
    const double h = (upper_ - lower_) / static_cast<double>(kGridSize - 1);
    for (std::size_t i = 0; i < kGridSize; ++i) {
      grid_[i] = i + 1 == kGridSize ? upper_ : lower_ + h * static_cast<double>(i);
      log_grid[i] = log_unnorm(grid_[i]);
      top = std::max(top, log_grid[i]);
    }
    // The pseudo-likelihood peaks where g(theta) = 1/y_bar; include that point.
    if (y_bar_ > 0.0) {
      const double g_mode = 1.0 / y_bar_;
      const double mode = adjusted_ ? theta_hat_ + (g_mode - theta_hat_) * theta_hat_ * sigma_tilde_ : g_mode;
      if (mode > lower_ && mode < upper_) top = std::max(top, log_unnorm(mode));
    }
  }
  if (top == -kInf) throw numerical_error("theta posterior has no mass");
  log_shift_ = top;

  auto scaled = [this](double t) {
    const double l = log_unnorm(t);
    return l == -kInf ? 0.0 : std::exp(l - log_shift_);
  };
  const double z_cont = has_continuous ? integrate_simpson(scaled, lower_, upper_, kQuadTol) : 0.0;
  const double z_atom = log_atom == -kInf ? 0.0 : std::exp(log_atom - log_shift_);
  const double z = z_cont + z_atom;
  if (!(z > 0.0)) throw numerical_error("theta posterior normaliser underflow");
  log_normalizer_ = log_shift_ + std::log(z);
  atom_weight_ = z_atom / z;
  continuous_mass_ = z_cont / z;

  grid_density_.assign(kGridSize, 0.0);
  grid_cdf_.assign(kGridSize, 0.0);
  double m1 = atom_weight_, m2 = atom_weight_;
  if (has_continuous) {
    for (std::size_t i = 0; i < kGridSize; ++i)
      grid_density_[i] = log_grid[i] == -kInf ? 0.0 : std::exp(log_grid[i] - log_shift_) / z;
    // Cell-wise Simpson for the cdf, rescaled to the adaptive total.
    double acc = 0.0;
    for (std::size_t i = 1; i < kGridSize; ++i) {
      const double a = grid_[i - 1], b = grid_[i];
      const double mid = scaled(0.5 * (a + b)) / z;
      acc += (b - a) / 6.0 * (grid_density_[i - 1] + 4.0 * mid + grid_density_[i]);
      grid_cdf_[i] = acc;
    }
    if (acc > 0.0)
      for (double& c : grid_cdf_) c *= continuous_mass_ / acc;
    m1 += integrate_simpson([&](double t) { return t * scaled(t); }, lower_, upper_, kQuadTol) / z;
    m2 += integrate_simpson([&](double t) { return t * t * scaled(t); }, lower_, upper_, kQuadTol) / z;
  }
  mean_ = m1;
  sd_ = std::sqrt(std::max(0.0, m2 - m1 * m1));
}

double ThetaPosterior::log_unnorm(double theta) const {
  if (!(theta > 0.0 && theta < 1.0)) return -kInf;
  const double g = adjusted_ ? theta_hat_ + (theta - theta_hat_) / (theta_hat_ * sigma_tilde_) : theta;
  if (!(g > 0.0)) return -kInf;
  const double p = prior_.continuous(theta);
  if (!(p > 0.0)) return -kInf;
  return std::log1p(-prior_.atom) + std::log(p) - prior_log_mass_ + k_tilde_ * (std::log(g) - g * y_bar_);
}

double ThetaPosterior::density(double theta) const {
  const double l = log_unnorm(theta);
  return l == -kInf ? 0.0 : std::exp(l - log_normalizer_);
}

double ThetaPosterior::cdf(double theta) const {
  if (theta >= 1.0) return 1.0;
  if (continuous_mass_ == 0.0 || theta <= grid_.front()) return 0.0;
  if (theta >= grid_.back()) return continuous_mass_;
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), theta);
  const auto i = static_cast<std::size_t>(it - grid_.begin());
  const double w = (theta - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
  return grid_cdf_[i - 1] + w * (grid_cdf_[i] - grid_cdf_[i - 1]);
}

double ThetaPosterior::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability must lie in [0, 1]");
  if (p > continuous_mass_ || continuous_mass_ == 0.0) return 1.0;
  const auto it = std::lower_bound(grid_cdf_.begin(), grid_cdf_.end(), p);
  if (it == grid_cdf_.begin()) return grid_.front();
  if (it == grid_cdf_.end()) return grid_.back();
  const auto i = static_cast<std::size_t>(it - grid_cdf_.begin());
  const double span = grid_cdf_[i] - grid_cdf_[i - 1];
  const double w = span > 0.0 ? (p - grid_cdf_[i - 1]) / span : 0.0;
  return grid_[i - 1] + w * (grid_[i] - grid_[i - 1]);
}

}  // namespace bmevt
