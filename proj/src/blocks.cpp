#include "bmevt/blocks.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace bmevt {

std::vector<double> block_maxima(std::span<const double> series, const BlockConfig& config) {
  if (config.m < 1) throw std::invalid_argument("block size m must be at least 1");
  const std::size_t n = series.size();
  if (n < config.m + config.l) throw std::invalid_argument("series too short");
  const std::size_t k = config.block_count(n);
  const std::size_t stride = config.m + config.l;
  std::vector<double> maxima(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto first = series.begin() + static_cast<std::ptrdiff_t>(i * stride);
    maxima[i] = *std::max_element(first, first + static_cast<std::ptrdiff_t>(config.m));
  }
  return maxima;
}

Ecdf::Ecdf(std::span<const double> series, std::size_t origin) {
  if (origin < 1 || origin > series.size())
    throw std::invalid_argument("ecdf origin out of range");
  sorted_.assign(series.begin() + static_cast<std::ptrdiff_t>(origin - 1), series.end());
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
  const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(count) / static_cast<double>(sorted_.size());
}

PseudoObs pseudo_observations(std::span<const double> series, std::size_t m_tilde,
                              std::size_t origin) {
  if (m_tilde < 1) throw std::invalid_argument("m_tilde must be at least 1");
  if (origin < 1 || origin > series.size())
    throw std::invalid_argument("origin out of range");
  const auto suffix = series.subspan(origin - 1);
  if (suffix.size() < m_tilde) throw std::invalid_argument("series too short");

  const Ecdf fn(series, origin);
  PseudoObs out;
  out.m_tilde = m_tilde;
  const auto maxima = block_maxima(suffix, {m_tilde, 0});
  out.k_tilde = maxima.size();
  out.y.reserve(maxima.size());
  for (double mx : maxima) {
    const double f = fn(mx);
    assert(f > 0.0);
    // log(1) is exactly 0, so blocks holding the suffix maximum give Y = +0.
    out.y.push_back(0.0 - static_cast<double>(m_tilde) * std::log(f));
  }
  return out;
}

}  // namespace bmevt
