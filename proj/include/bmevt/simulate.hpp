#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bmevt {

enum class Model { armax, clayton_markov, arch };
enum class Marginal { implied, frechet, exponential, powerlaw };

[[nodiscard]] std::string to_string(Model model);
[[nodiscard]] std::string to_string(Marginal marginal);
[[nodiscard]] Model parse_model(const std::string& name);
[[nodiscard]] Marginal parse_marginal(const std::string& name);

struct DgpSpec {
  Model model = Model::armax;
  double eta = 0.5;
  Marginal marginal = Marginal::implied;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  std::size_t burn_in = 1000;  // arch only
};

struct GroundTruth {
  double gamma0 = 0.0;
  double theta0 = 1.0;  // NaN when no reference value is known
  /// Stationary marginal quantile; empty when only an empirical value exists.
  std::function<double(double)> marginal_quantile;
  /// a_m = b_m = norming_factor * m when the norming constants are explicit.
  std::optional<double> norming_factor;
  std::string notes;
};

/// Throws std::invalid_argument on a parameter outside the model's range or
/// an unsupported marginal.
void validate(const DgpSpec& spec);

/// X_1 unit Frechet, X_{t+1} = max(eta X_t, (1 - eta) Z_{t+1}).
[[nodiscard]] std::vector<double> simulate_armax(std::size_t n, double eta, std::uint64_t seed);
/// Clayton(eta) Markov chain on the uniform scale mapped through the marginal quantile.
[[nodiscard]] std::vector<double> simulate_clayton_markov(std::size_t n, double eta, Marginal marginal,
                                                          std::uint64_t seed);
/// X_{t+1} = sqrt(2e-5 + eta X_t^2) Z_{t+1}, Z standard normal, after burn_in steps.
[[nodiscard]] std::vector<double> simulate_arch(std::size_t n, double eta, std::uint64_t seed,
                                                std::size_t burn_in = 1000);
[[nodiscard]] std::vector<double> simulate(const DgpSpec& spec);

/// Uniform-scale Clayton chain V_t (before the marginal transform).
[[nodiscard]] std::vector<double> simulate_clayton_uniform(std::size_t n, double eta, std::uint64_t seed);

[[nodiscard]] GroundTruth ground_truth(const DgpSpec& spec);

/// Stationary tau_e-quantile: closed form where available, otherwise a
/// long-run empirical quantile (cached).
[[nodiscard]] double eq_truth(const DgpSpec& spec, double tau_e);

struct RlTruth {
  double value = 0.0;
  double mc_se = 0.0;  // 0 for closed forms
  bool exact = false;
};

/// tau-quantile of the maximum over `block` consecutive observations.
/// ARMAX has a closed form; other models use rl_truth_monte_carlo (cached).
[[nodiscard]] RlTruth rl_truth(const DgpSpec& spec, double tau, std::size_t block);

/// Brute-force: empirical tau-quantile of `reps` independent block maxima.
[[nodiscard]] RlTruth rl_truth_monte_carlo(const DgpSpec& spec, double tau, std::size_t block,
                                           std::size_t reps, std::uint64_t seed);

}  // namespace bmevt
