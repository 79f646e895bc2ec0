#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bmevt {

/// Raised when a computation is well-posed but fails numerically
/// (singular information, optimizer failure, underflow).
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  [[nodiscard]] double width() const { return upper - lower; }
  [[nodiscard]] bool contains(double x) const { return lower <= x && x <= upper; }
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------------------
// Random numbers

/// SplitMix64 finalizer; used to derive independent stream seeds from a
/// (base seed, counter...) tuple.
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t x);
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                        std::uint64_t c = 0);

/// Thin wrapper around mt19937_64 with explicit open-interval uniforms so that
/// inverse-cdf samplers never see 0 or 1.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() {
    for (;;) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }
  double normal() { return normal_(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// ---------------------------------------------------------------------------
// Standard normal

[[nodiscard]] double normal_cdf(double x);
[[nodiscard]] double normal_log_pdf(double x);
/// Inverse standard normal cdf, accurate to ~1e-15 (rational start + Halley step).
[[nodiscard]] double normal_quantile(double p);
/// z_{1-alpha/2}.
[[nodiscard]] double two_sided_z(double alpha);

// ---------------------------------------------------------------------------
// Quadrature

struct GaussLegendreRule {
  Eigen::VectorXd nodes;    // on [-1, 1]
  Eigen::VectorXd weights;
};

/// Golub-Welsch: nodes are the eigenvalues of the symmetric Jacobi matrix.
[[nodiscard]] GaussLegendreRule gauss_legendre(int n);

/// Composite Gauss-Legendre on [a, b] with `panels` equal panels of `order` nodes.
[[nodiscard]] double integrate_gl(const std::function<double(double)>& f, double a, double b,
                                  int panels, int order = 32);

/// Adaptive Simpson with absolute tolerance, capped recursion depth.
[[nodiscard]] double integrate_simpson(const std::function<double(double)>& f, double a, double b,
                                       double tol, int max_depth = 50);

// ---------------------------------------------------------------------------
// Optimisation

struct NelderMeadOptions {
  int max_evals = 20000;
  double f_tol = 1e-12;  // spread of simplex values
  double x_tol = 1e-10;  // simplex diameter
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = kInf;
  int evals = 0;
  bool converged = false;
};

/// Derivative-free simplex minimisation; +inf values are accepted and treated
/// as infeasible points.
[[nodiscard]] NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                           const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                                           const NelderMeadOptions& opts = {});

// ---------------------------------------------------------------------------
// Descriptive statistics

/// Type-7 (linear interpolation) sample quantile; input need not be sorted.
[[nodiscard]] double empirical_quantile(std::span<const double> xs, double p);
/// Same on an already sorted sample.
[[nodiscard]] double sorted_quantile(std::span<const double> sorted, double p);
[[nodiscard]] double mean(std::span<const double> xs);
[[nodiscard]] double sample_sd(std::span<const double> xs);
/// Lag-h sample autocorrelation with the usual 1/n normalisation.
[[nodiscard]] double autocorrelation(std::span<const double> xs, int lag);
/// Effective sample size via Geyer's initial positive sequence.
[[nodiscard]] double effective_sample_size(std::span<const double> xs);

}  // namespace bmevt
