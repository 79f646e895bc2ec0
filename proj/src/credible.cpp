#include "bmevt/bayes.hpp"

#include <algorithm>
#include <cmath>

namespace bmevt {

std::vector<double> rl_posterior(const PosteriorChain& chain, double tau, std::size_t m,
                                 std::size_t m_star) {
  if (chain.draws.empty()) throw std::invalid_argument("empty chain");
  const double x = return_level_neglog(tau, m, m_star);
  std::vector<double> out;
  out.reserve(chain.draws.size());
  for (const GevParamsd& p : chain.draws) out.push_back(p.mu + p.sigma * gev_quantile_neglog(x, p.gamma));
  return out;
}

std::vector<double> var_posterior(const PosteriorChain& chain, const ThetaPosterior& theta_post,
                                  double tau_e, std::size_t m, std::uint64_t seed) {
  if (chain.draws.empty()) throw std::invalid_argument("empty chain");
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(chain.draws.size());
  for (const GevParamsd& p : chain.draws) {
    const double x = var_neglog(tau_e, m, theta_post.sample(rng));
    out.push_back(p.mu + p.sigma * gev_quantile_neglog(x, p.gamma));
  }
  return out;
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

}  // namespace

Interval credible_interval_symmetric(std::span<const double> samples, double alpha, double b_hat) {
  check_alpha(alpha);
  if (samples.size() < 2) throw std::invalid_argument("need at least two posterior draws");
  const double centre = mean(samples) - b_hat;
  const double half = two_sided_z(alpha) * sample_sd(samples);
  return {centre - half, centre + half};
}

Interval credible_interval_symmetric(const ThetaPosterior& post, double alpha, double b_hat) {
  check_alpha(alpha);
  const double centre = post.mean() - b_hat;
  const double half = two_sided_z(alpha) * post.sd();
  return {centre - half, centre + half};
}

Interval credible_interval_asymmetric(std::span<const double> samples, double alpha) {
  check_alpha(alpha);
  if (samples.empty()) throw std::invalid_argument("no posterior draws");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return {sorted_quantile(sorted, alpha / 2.0), sorted_quantile(sorted, 1.0 - alpha / 2.0)};
}

Interval credible_interval_asymmetric(const ThetaPosterior& post, double alpha) {
  check_alpha(alpha);
  return {post.quantile(alpha / 2.0), post.quantile(1.0 - alpha / 2.0)};
}

}  // namespace bmevt
