#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bmevt {

/// Big-block / small-block layout: k blocks of m + l consecutive observations,
/// the maximum taken over the first m of each.
struct BlockConfig {
  std::size_t m = 1;
  std::size_t l = 0;

  /// k = floor(n / (m + l)); the trailing partial block is discarded.
  [[nodiscard]] std::size_t block_count(std::size_t n) const { return n / (m + l); }
};

/// M_{i,m} = max(X_{1+(i-1)(m+l)}, ..., X_{m+(i-1)(m+l)}), i = 1..k (1-based).
[[nodiscard]] std::vector<double> block_maxima(std::span<const double> series,
                                               const BlockConfig& config);

/// Right-closed empirical cdf of the suffix series[j..n] (1-based origin j).
/// j = 1 gives the full-sample F_n.
class Ecdf {
 public:
  Ecdf(std::span<const double> series, std::size_t origin = 1);

  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

/// Pseudo-observations Y_i = -m_tilde log F_n^{(j)}(M_{i,m_tilde}^{(j)}) built from
/// l = 0 blocks of the suffix starting at origin j.
struct PseudoObs {
  std::vector<double> y;
  std::size_t m_tilde = 0;
  std::size_t k_tilde = 0;
};

[[nodiscard]] PseudoObs pseudo_observations(std::span<const double> series, std::size_t m_tilde,
                                            std::size_t origin = 1);

}  // namespace bmevt
