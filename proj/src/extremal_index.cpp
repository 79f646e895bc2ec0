#include "bmevt/frequentist.hpp"

#include <algorithm>
#include <cmath>

namespace bmevt {

namespace {

/// Variance term built from the first `blocks` disjoint blocks of length m of
/// `suffix`, with the ecdf of the whole suffix.
double origin_term(std::span<const double> suffix, std::size_t m, std::size_t blocks) {
  const Ecdf fn(suffix);
  const auto kb = static_cast<double>(blocks);
  std::vector<double> maxima(blocks), f(blocks), y(blocks);
  std::vector<std::vector<double>> sorted_blocks(blocks);
  for (std::size_t i = 0; i < blocks; ++i) {
    const auto block = suffix.subspan(i * m, m);
    sorted_blocks[i].assign(block.begin(), block.end());
    std::sort(sorted_blocks[i].begin(), sorted_blocks[i].end());
    maxima[i] = sorted_blocks[i].back();
    f[i] = fn(maxima[i]);
    y[i] = 0.0 - static_cast<double>(m) * std::log(f[i]);
  }
  const double y_bar = mean(y);

  double total = 0.0;
  for (std::size_t i = 0; i < blocks; ++i) {
    // sum over s in block i of (1/kb) sum_l [1 - 1(X_s <= M_l) / F(M_l)]
    double correction = 0.0;
    for (std::size_t l = 0; l < blocks; ++l) {
      const auto& b = sorted_blocks[i];
      const auto count = static_cast<double>(std::upper_bound(b.begin(), b.end(), maxima[l]) - b.begin());
      correction += static_cast<double>(m) - count / f[l];
    }
    const double d = y[i] - y_bar + correction / kb;
    total += d * d;
  }
  return total / kb;
}

}  // namespace

double ThetaFit::sigma_tilde() const { return std::sqrt(sigma_tilde_sq); }

double theta_mle(const PseudoObs& pseudo) {
  if (pseudo.y.empty()) throw std::invalid_argument("no pseudo-observations");
  double sum = 0.0;
  for (double v : pseudo.y) sum += v;
  if (!(sum > 0.0)) return 1.0;
  return std::min(1.0, static_cast<double>(pseudo.y.size()) / sum);
}

double theta_origin_variance(std::span<const double> series, std::size_t m_tilde,
                             std::size_t origin) {
  if (m_tilde < 1) throw std::invalid_argument("m_tilde must be at least 1");
  if (origin < 1 || origin > series.size()) throw std::invalid_argument("origin out of range");
  const std::size_t k_tilde = series.size() / m_tilde;
  if (k_tilde < 2) throw std::invalid_argument("need at least two blocks of size m_tilde");
  if (origin == 1) return origin_term(series, m_tilde, k_tilde);
  const auto suffix = series.subspan(origin - 1);
  if (suffix.size() < (k_tilde - 1) * m_tilde) throw std::invalid_argument("origin too late");
  return origin_term(suffix, m_tilde, k_tilde - 1);
}

double theta_sliding_variance(std::span<const double> series, std::size_t m_tilde, std::size_t K) {
  if (K < 1) throw std::invalid_argument("K must be at least 1");
  double total = theta_origin_variance(series, m_tilde, 1);
  for (std::size_t i = 2; i <= K; ++i) {
    const std::size_t shift = ((i - 1) * m_tilde + K - 1) / K;  // ceil((i-1) m / K)
    total += theta_origin_variance(series, m_tilde, shift + 1);
  }
  return total / static_cast<double>(K);
}

ThetaFit fit_theta(std::span<const double> series, std::size_t m_tilde, std::size_t K) {
  ThetaFit out;
  const PseudoObs pseudo = pseudo_observations(series, m_tilde);
  out.theta_hat = theta_mle(pseudo);
  out.sigma_tilde_sq = theta_sliding_variance(series, m_tilde, K);
  out.K = K;
  out.k_tilde = pseudo.k_tilde;
  out.m_tilde = m_tilde;
  out.var_hat = std::pow(out.theta_hat, 4) * out.sigma_tilde_sq / static_cast<double>(out.k_tilde);
  return out;
}

}  // namespace bmevt
