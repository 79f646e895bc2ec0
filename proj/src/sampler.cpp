#include "bmevt/bayes.hpp"

#include <algorithm>
#include <cmath>

namespace bmevt {

std::vector<double> PosteriorChain::gamma() const {
  std::vector<double> out(draws.size());
  std::transform(draws.begin(), draws.end(), out.begin(), [](const auto& d) { return d.gamma; });
  return out;
}

std::vector<double> PosteriorChain::mu() const {
  std::vector<double> out(draws.size());
  std::transform(draws.begin(), draws.end(), out.begin(), [](const auto& d) { return d.mu; });
  return out;
}

std::vector<double> PosteriorChain::sigma() const {
  std::vector<double> out(draws.size());
  std::transform(draws.begin(), draws.end(), out.begin(), [](const auto& d) { return d.sigma; });
  return out;
}

namespace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

GevParamsd from_walk(const Vec3& u) { return {u[0], u[1], std::exp(u[2])}; }

std::optional<Mat3> cholesky(const Mat3& c) {
  Eigen::LLT<Mat3> llt(c);
  if (llt.info() != Eigen::Success) return std::nullopt;
  return Mat3(llt.matrixL());
}

double importance_ess(std::span<const double> maxima, const GevFit& fit, const PriorSpec& prior,
                      std::size_t draws, std::uint64_t seed) {
  const auto chol = cholesky(fit.covariance());
  if (!chol) return kNaN;
  const Mat3& L = *chol;
  Rng rng(seed);
  std::vector<double> log_w(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    const Vec3 e(rng.normal(), rng.normal(), rng.normal());
    const Vec3 d = L * e;
    const GevParamsd p{fit.params.gamma + d[0], fit.params.mu + d[1], fit.params.sigma + d[2]};
    // The proposal's log density up to a constant is -|e|^2/2.
    log_w[i] = log_posterior_unnorm(p, maxima, prior) + 0.5 * e.squaredNorm();
  }
  const double top = *std::max_element(log_w.begin(), log_w.end());
  if (top == -kInf) return 0.0;
  double s1 = 0.0, s2 = 0.0;
  for (double lw : log_w) {
    const double w = std::exp(lw - top);
    s1 += w;
    s2 += w * w;
  }
  return s1 * s1 / s2;
}

}  // namespace

RwmhRun adaptive_rwmh(const std::function<double(const Vec3&)>& log_target, const Vec3& start,
                      const Mat3& proposal_cov, const ChainConfig& config) {
  if (config.iters == 0 || config.thin == 0) throw std::invalid_argument("iters and thin must be positive");
  if (!(config.target_accept > 0.0 && config.target_accept < 1.0))
    throw std::invalid_argument("target acceptance must lie in (0, 1)");
  if (config.adapt_interval == 0) throw std::invalid_argument("adaptation interval must be positive");
  const auto initial = cholesky(proposal_cov);
  if (!initial) throw std::invalid_argument("proposal covariance is not positive definite");

  constexpr int dim = 3;
  Vec3 u = start;
  double current = log_target(u);
  if (!std::isfinite(current)) throw std::invalid_argument("chain start has zero posterior density");

  Mat3 chol = *initial;
  double log_scale = std::log(2.38 * 2.38 / dim);

  Vec3 sum = Vec3::Zero();
  Mat3 outer = Mat3::Zero();
  std::size_t seen = 0;

  Rng rng(config.seed);
  RwmhRun run;
  run.states.reserve(config.iters / config.thin + 1);
  run.log_target.reserve(config.iters / config.thin + 1);

  const std::size_t total = config.burn_in + config.iters;
  const std::size_t stuck_windows = 10 * dim;
  std::size_t window_accepts = 0, empty_windows = 0, kept_accepts = 0;

  for (std::size_t t = 0; t < total; ++t) {
    const Vec3 e(rng.normal(), rng.normal(), rng.normal());
    const Vec3 proposal = u + std::exp(0.5 * log_scale) * (chol * e);
    const double cand = log_target(proposal);
    const double log_ratio = cand - current;
    const double accept_prob = cand == -kInf ? 0.0 : std::min(1.0, std::exp(log_ratio));
    if (accept_prob > 0.0 && rng.uniform() < accept_prob) {
      u = proposal;
      current = cand;
      ++window_accepts;
      if (t >= config.burn_in) ++kept_accepts;
    }

    const bool burning = t < config.burn_in;
    if (burning) {
      log_scale += std::pow(static_cast<double>(t + 1), -0.6) * (accept_prob - config.target_accept);
      sum += u;
      outer += u * u.transpose();
      ++seen;
    }
    if ((t + 1) % config.adapt_interval == 0) {
      empty_windows = window_accepts == 0 ? empty_windows + 1 : 0;
      window_accepts = 0;
      if (empty_windows >= stuck_windows) throw numerical_error("sampler stuck");
      if (burning && seen > 2 * dim) {
        const Vec3 mean = sum / static_cast<double>(seen);
        Mat3 s = (outer - static_cast<double>(seen) * mean * mean.transpose()) /
                 static_cast<double>(seen - 1);
        s = (1.0 - config.shrinkage) * s + config.shrinkage * (s.trace() / dim) * Mat3::Identity();
        if (auto c = cholesky(s)) chol = *c;
      }
    }

    if (!burning && (t - config.burn_in) % config.thin == 0) {
      run.states.push_back(u);
      run.log_target.push_back(current);
    }
  }
  run.acceptance_rate = static_cast<double>(kept_accepts) / static_cast<double>(config.iters);
  return run;
}

PosteriorChain sample_posterior(std::span<const double> maxima, const GevFit& fit,
                                const PriorSpec& prior, const ChainConfig& config) {
  auto log_target = [&](const Vec3& u) {
    const double lp = log_posterior_unnorm(from_walk(u), maxima, prior);
    return lp == -kInf ? -kInf : lp + u[2];  // Jacobian of sigma = exp(u2)
  };

  // Initial proposal shape from the observed information, mapped to log sigma.
  Mat3 cov = Vec3(0.01, 0.01 * fit.params.sigma * fit.params.sigma, 0.01).asDiagonal();
  if (fit.has_information()) {
    const Vec3 j(1.0, 1.0, 1.0 / fit.params.sigma);
    const Mat3 c = j.asDiagonal() * fit.covariance() * j.asDiagonal();
    if (cholesky(c)) cov = c;
  }

  const Vec3 start(fit.params.gamma, fit.params.mu, std::log(fit.params.sigma));
  const RwmhRun run = adaptive_rwmh(log_target, start, cov, config);

  PosteriorChain chain;
  chain.seed = config.seed;
  chain.acceptance_rate = run.acceptance_rate;
  chain.draws.reserve(run.states.size());
  chain.log_post.reserve(run.states.size());
  for (std::size_t i = 0; i < run.states.size(); ++i) {
    chain.draws.push_back(from_walk(run.states[i]));
    chain.log_post.push_back(run.log_target[i] - run.states[i][2]);
  }
  if (config.compute_ess) {
    const auto g = chain.gamma(), m = chain.mu(), s = chain.sigma();
    chain.ess = Vec3(effective_sample_size(g), effective_sample_size(m), effective_sample_size(s));
  }
  if (config.importance_draws > 0 && fit.has_information())
    chain.importance_ess =
        importance_ess(maxima, fit, prior, config.importance_draws, derive_seed(config.seed, 1));
  return chain;
}

}  // namespace bmevt
