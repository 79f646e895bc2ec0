#pragma once

#include "bmevt/bayes.hpp"
#include "bmevt/frequentist.hpp"
#include "bmevt/simulate.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bmevt {

enum class Method { BS, BA, FS, FA };
enum class Target { gamma, theta, rl, eq };

inline constexpr std::array<Method, 4> kAllMethods{Method::BS, Method::BA, Method::FS, Method::FA};
inline constexpr std::array<Target, 4> kAllTargets{Target::gamma, Target::theta, Target::rl, Target::eq};

[[nodiscard]] std::string to_string(Method method);
[[nodiscard]] std::string to_string(Target target);
[[nodiscard]] Method parse_method(const std::string& name);
[[nodiscard]] Target parse_target(const std::string& name);

struct GridCell {
  std::size_t n = 0;
  std::size_t m = 1;
  std::size_t l = 0;

  [[nodiscard]] std::size_t k() const { return n / (m + l); }
};

struct ExperimentConfig {
  DgpSpec dgp;  // n and seed are overridden per cell and replication
  std::vector<GridCell> grid;
  std::size_t replications = 1000;
  double alpha = 0.05;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  std::vector<Target> targets{kAllTargets.begin(), kAllTargets.end()};
  double rl_tau = 0.9;
  std::optional<std::size_t> rl_mstar;  // defaults to n
  std::size_t K = 10;
  double q = 0.5;
  ChainConfig mcmc;
  ThetaPriorSpec theta_prior;
  std::size_t draws = 50000;
  std::uint64_t base_seed = 1;
  std::size_t workers = 1;

  [[nodiscard]] bool wants(Method m) const;
  [[nodiscard]] bool wants(Target t) const;
  /// Throws std::invalid_argument when the config cannot run.
  void validate() const;
};

/// Flat `key = value` text with `[a, b]` arrays and `#` comments. The grid is
/// given by equal-length arrays n, m and l (l may be a scalar).
[[nodiscard]] ExperimentConfig parse_config(const std::string& text);
[[nodiscard]] ExperimentConfig load_config(const std::string& path);

/// Worker count after the BM_EVT_WORKERS override.
[[nodiscard]] std::size_t effective_workers(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Per-replication output

struct ReplicationResult {
  std::string failure;  // empty on success; reason code otherwise
  std::array<std::array<std::optional<Interval>, 4>, 4> intervals;  // [method][target]
  std::array<std::array<std::string, 4>, 4> interval_failure;
  std::array<double, 4> mle{kNaN, kNaN, kNaN, kNaN};
  std::array<double, 4> posterior_median{kNaN, kNaN, kNaN, kNaN};
};

struct CellTruth {
  double gamma0 = kNaN;
  double theta0 = kNaN;
  double rl = kNaN;
  double rl_mc_se = 0.0;
  double eq = kNaN;

  [[nodiscard]] double operator[](Target t) const;
};

/// One replication of the full pipeline. Never throws for numerical
/// trouble; failures are recorded with reason codes.
[[nodiscard]] ReplicationResult run_replication(const ExperimentConfig& config, std::size_t cell_index,
                                                std::size_t replication);

struct CoverageRow {
  GridCell cell;
  Method method;
  Target target;
  double coverage = kNaN;
  double width = kNaN;
  std::size_t scored = 0;
  std::size_t failed = 0;
  double mc_se = kNaN;
};

struct MseRow {
  GridCell cell;
  Target target;
  double mse_posterior = kNaN;
  double mse_mle = kNaN;
  double ratio = kNaN;
  std::size_t scored = 0;
};

struct CellResult {
  GridCell cell;
  CellTruth truth;
  std::size_t failed_replications = 0;
  std::vector<std::string> failure_reasons;  // one per failed replication, in order
  std::vector<CoverageRow> coverage;
  std::vector<MseRow> mse;
};

struct ExperimentReport {
  std::vector<CellResult> cells;
};

[[nodiscard]] CellTruth cell_truth(const ExperimentConfig& config, const GridCell& cell);

/// Runs every replication of every cell across worker threads and reduces in
/// replication order, so the report does not depend on the worker count.
/// Throws numerical_error when more than 20% of a cell's replications fail.
[[nodiscard]] ExperimentReport run_experiment(const ExperimentConfig& config);

/// Coverage rows only (convenience over run_experiment).
[[nodiscard]] std::vector<CoverageRow> run_coverage(const ExperimentConfig& config);
/// MSE ratios of posterior medians against the MLE.
[[nodiscard]] std::vector<MseRow> run_mse_ratio(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Block-size diagnostics

struct StabilityRow {
  std::size_t m = 0;
  std::size_t k = 0;
  double theta_hat = kNaN;
  Interval theta_ci{kNaN, kNaN};
  double gamma_hat = kNaN;
  Interval gamma_ci{kNaN, kNaN};
};

struct AcfRow {
  std::size_t m = 0;
  int lag = 0;
  double acf = kNaN;
  double acf_squared = kNaN;
  double band = kNaN;  // z_{1-alpha/2} / sqrt(k)
};

struct QqRow {
  std::size_t m = 0;
  std::size_t i = 0;
  double uniform = kNaN;  // i / (k + 1)
  double empirical = kNaN;  // sorted F_n(M_i)^{theta_hat m}
};

struct BlockDiagnostics {
  std::vector<StabilityRow> stability;
  std::vector<AcfRow> acf;
  std::vector<QqRow> qq;
};

[[nodiscard]] BlockDiagnostics diagnose_blocks(std::span<const double> series,
                                               const std::vector<std::size_t>& m_values, double alpha,
                                               int max_lag = 10, double q = 0.5, std::size_t K = 10);

// ---------------------------------------------------------------------------
// Output

void write_coverage_csv(std::ostream& os, const std::vector<CoverageRow>& rows);
void write_mse_csv(std::ostream& os, const std::vector<MseRow>& rows);
[[nodiscard]] std::string report_json(const ExperimentConfig& config, const ExperimentReport& report);
void write_diagnostics_csv(const std::string& prefix, const BlockDiagnostics& diagnostics);
void write_chain_csv(std::ostream& os, const PosteriorChain& chain);
void write_theta_posterior_csv(std::ostream& os, const ThetaPosterior& post);
[[nodiscard]] std::string theta_posterior_json(const ThetaPosterior& post);

/// One value per line; blank lines and '#' comments skipped.
[[nodiscard]] std::vector<double> read_series(std::istream& is);
[[nodiscard]] std::vector<double> read_series_file(const std::string& path);
void write_series(std::ostream& os, std::span<const double> series);

}  // namespace bmevt
