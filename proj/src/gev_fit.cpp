#include "bmevt/frequentist.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <set>

namespace bmevt {

double gev_loglik_sum(std::span<const double> maxima, const GevParamsd& params) {
  double total = 0.0;
  for (double x : maxima) {
    const double l = gev_log_density(x, params);
    if (l == -kInf) return -kInf;
    total += l;
  }
  return total;
}

double gev_loglik(std::span<const double> maxima, const GevParamsd& params) {
  if (maxima.empty()) throw std::invalid_argument("gev_loglik: no maxima");
  const double s = gev_loglik_sum(maxima, params);
  return s == -kInf ? -kInf : s / static_cast<double>(maxima.size());
}

double GevFit::gamma_upper() const { return std::pow(static_cast<double>(k), q); }

Eigen::Matrix3d GevFit::covariance() const {
  if (!has_information()) throw numerical_error("observed information is singular");
  return observed_info.inverse();
}

Eigen::Vector3d GevFit::standard_errors() const { return covariance().diagonal().cwiseSqrt(); }

GevParamsd gev_pwm_estimate(std::span<const double> maxima) {
  std::vector<double> x(maxima.begin(), maxima.end());
  std::sort(x.begin(), x.end());
  const auto n = static_cast<double>(x.size());
  if (x.size() < 3) throw std::invalid_argument("PWM needs at least three values");
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto jj = static_cast<double>(j);
    b0 += x[j];
    b1 += jj / (n - 1.0) * x[j];
    b2 += jj * (jj - 1.0) / ((n - 1.0) * (n - 2.0)) * x[j];
  }
  b0 /= n;
  b1 /= n;
  b2 /= n;
  const double c = (2.0 * b1 - b0) / (3.0 * b2 - b0) - std::log(2.0) / std::log(3.0);
  // Hosking's shape k = -gamma, kept where Gamma(1 + k) is well behaved.
  double kh = std::clamp(7.8590 * c + 2.9554 * c * c, -0.9, 0.45);
  if (!std::isfinite(kh)) kh = 0.0;
  GevParamsd p;
  if (std::abs(kh) < 1e-6) {
    p.sigma = (2.0 * b1 - b0) / std::log(2.0);
    p.mu = b0 - 0.5772156649015329 * p.sigma;
  } else {
    const double g1 = std::tgamma(1.0 + kh);
    p.sigma = (2.0 * b1 - b0) * kh / (g1 * (1.0 - std::pow(2.0, -kh)));
    p.mu = b0 + p.sigma * (g1 - 1.0) / kh;
  }
  p.gamma = -kh;
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
    p.sigma = std::max(sample_sd(x), 1e-12) * std::sqrt(6.0) / std::numbers::pi;
    p.mu = b0 - 0.5772156649015329 * p.sigma;
    p.gamma = 0.0;
  }
  return p;
}

namespace {

using Vec3 = Eigen::Vector3d;

/// Bijection between (gamma, mu, sigma) in Theta_n and R^3.
struct Reparam {
  double lo = -0.5;
  double hi = 1.0;

  [[nodiscard]] GevParamsd to_params(const Eigen::VectorXd& u) const {
    const double s = 1.0 / (1.0 + std::exp(-u[0]));
    return {lo + (hi - lo) * s, u[1], std::exp(u[2])};
  }
  [[nodiscard]] Eigen::VectorXd to_free(const GevParamsd& p) const {
    const double s = std::clamp((p.gamma - lo) / (hi - lo), 1e-9, 1.0 - 1e-9);
    Eigen::VectorXd u(3);
    u << std::log(s / (1.0 - s)), p.mu, std::log(p.sigma);
    return u;
  }
};

/// Move a starting point into the support by shrinking gamma toward 0 (the
/// Gumbel model is supported everywhere).
GevParamsd make_feasible(std::span<const double> z, GevParamsd p) {
  for (int i = 0; i < 60 && gev_loglik_sum(z, p) == -kInf; ++i) {
    p.gamma *= 0.5;
    if (std::abs(p.gamma) < 1e-4) p.gamma = 0.0;
  }
  return p;
}

std::optional<Eigen::Matrix3d> fd_hessian(std::span<const double> data, const GevParamsd& at,
                                          const Vec3& scale) {
  const double base_step = std::cbrt(std::numeric_limits<double>::epsilon());
  Vec3 h = base_step * scale;
  const Vec3 x0(at.gamma, at.mu, at.sigma);
  auto f = [&](const Vec3& x) { return gev_loglik_sum(data, {x[0], x[1], x[2]}); };
  for (int attempt = 0; attempt < 6; ++attempt, h *= 0.25) {
    const double f0 = f(x0);
    Eigen::Matrix3d H;
    bool ok = std::isfinite(f0);
    for (int i = 0; i < 3 && ok; ++i) {
      Vec3 ei = Vec3::Zero();
      ei[i] = h[i];
      const double fp = f(x0 + ei);
      const double fm = f(x0 - ei);
      ok = std::isfinite(fp) && std::isfinite(fm);
      H(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
      for (int j = 0; j < i && ok; ++j) {
        Vec3 ej = Vec3::Zero();
        ej[j] = h[j];
        const double fpp = f(x0 + ei + ej);
        const double fpm = f(x0 + ei - ej);
        const double fmp = f(x0 - ei + ej);
        const double fmm = f(x0 - ei - ej);
        ok = std::isfinite(fpp) && std::isfinite(fpm) && std::isfinite(fmp) && std::isfinite(fmm);
        H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
      }
    }
    if (ok) return H;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Eigen::Matrix3d> loglik_hessian(std::span<const double> maxima,
                                              const GevParamsd& params) {
  return fd_hessian(maxima, params, Vec3(1.0, params.sigma, params.sigma));
}

GevFit fit_gev_mle(std::span<const double> maxima, const FitOptions& options) {
  const std::size_t k = maxima.size();
  if (std::set<double>(maxima.begin(), maxima.end()).size() < 4)
    throw std::invalid_argument("fit_gev_mle needs at least 4 distinct maxima");
  if (!(options.q > 0.0 && options.q < 1.0))
    throw std::invalid_argument("restriction exponent q must lie in (0, 1)");

  // Work on standardised data; the likelihood is location-scale equivariant.
  const double centre = mean(maxima);
  const double scale = sample_sd(maxima);
  std::vector<double> z(k);
  for (std::size_t i = 0; i < k; ++i) z[i] = (maxima[i] - centre) / scale;

  const Reparam rp{-0.5, std::pow(static_cast<double>(k), options.q)};
  auto objective = [&](const Eigen::VectorXd& u) {
    const double l = gev_loglik_sum(z, rp.to_params(u));
    return l == -kInf ? kInf : -l;
  };

  GevParamsd pwm = gev_pwm_estimate(z);
  pwm.gamma = std::clamp(pwm.gamma, -0.45, 0.9 * rp.hi);
  std::vector<GevParamsd> starts{pwm};
  const double shifts[][2] = {{0.25, 1.3}, {-0.25, 0.75}, {0.5, 1.0}, {-0.1, 1.6}};
  for (int i = 0; i < options.perturbed_starts && i < 4; ++i) {
    GevParamsd s = pwm;
    s.gamma = std::clamp(s.gamma + shifts[i][0], -0.45, 0.9 * rp.hi);
    s.sigma *= shifts[i][1];
    starts.push_back(s);
  }

  NelderMeadOptions nm;
  nm.max_evals = options.max_evals_per_start;
  NelderMeadResult best;
  int evaluations = 0;
  for (const GevParamsd& start : starts) {
    const GevParamsd feasible = make_feasible(z, start);
    if (gev_loglik_sum(z, feasible) == -kInf) continue;
    Eigen::VectorXd u = rp.to_free(feasible);
    Eigen::VectorXd step(3);
    step << 0.5, 0.2 * feasible.sigma, 0.2;
    NelderMeadResult run = nelder_mead(objective, u, step, nm);
    evaluations += run.evals;
    // Restart from the optimum until the value stops improving.
    for (int restart = 0; restart < 8 && run.converged; ++restart) {
      step << 0.05, 0.02 * std::exp(run.x[2]), 0.02;
      NelderMeadResult again = nelder_mead(objective, run.x, step, nm);
      evaluations += again.evals;
      const bool improved = again.value < run.value - 1e-11 * (1.0 + std::abs(run.value));
      if (again.value <= run.value) run = again;
      if (!improved) break;
    }
    if (run.converged && (!best.converged || run.value < best.value)) best = run;
    else if (!best.converged && run.value < best.value) best = run;
  }

  if (!std::isfinite(best.value)) throw fit_error("no feasible starting point", pwm);
  GevParamsd zfit = rp.to_params(best.x);
  GevParamsd fitted{zfit.gamma, centre + scale * zfit.mu, scale * zfit.sigma};
  if (!best.converged) throw fit_error("simplex search did not converge", fitted);

  GevFit fit;
  fit.params = fitted;
  fit.k = k;
  fit.q = options.q;
  fit.evaluations = evaluations;
  fit.loglik = gev_loglik_sum(maxima, fitted);
  assert(fitted.gamma > -0.5 && fitted.gamma < fit.gamma_upper() && fitted.sigma > 0.0);

  const auto hz = fd_hessian(z, zfit, Vec3(1.0, zfit.sigma, zfit.sigma));
  if (!hz) {
    fit.status = FitStatus::singular_information;
    fit.observed_info.setConstant(kNaN);
    fit.info_inv_standardized.setConstant(kNaN);
    return fit;
  }
  const Eigen::Vector3d d(1.0, 1.0 / scale, 1.0 / scale);
  fit.observed_info = -(d.asDiagonal() * (*hz) * d.asDiagonal());
  fit.observed_info = 0.5 * (fit.observed_info + fit.observed_info.transpose()).eval();

  const Eigen::Vector3d a(1.0, fitted.sigma, fitted.sigma);
  const Eigen::Matrix3d standardized =
      a.asDiagonal() * fit.observed_info * a.asDiagonal() / static_cast<double>(k);
  Eigen::LLT<Eigen::Matrix3d> llt(standardized);
  if (llt.info() != Eigen::Success) {
    fit.status = FitStatus::singular_information;
    fit.info_inv_standardized.setConstant(kNaN);
    return fit;
  }
  fit.info_inv_standardized = llt.solve(Eigen::Matrix3d::Identity());
  return fit;
}

}  // namespace bmevt
