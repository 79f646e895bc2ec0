#include "bmevt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace bmevt {

double CellTruth::operator[](Target t) const {
  switch (t) {
    case Target::gamma: return gamma0;
    case Target::theta: return theta0;
    case Target::rl: return rl;
    case Target::eq: return eq;
  }
  return kNaN;
}

namespace {

constexpr std::size_t idx(Method m) { return static_cast<std::size_t>(m); }
constexpr std::size_t idx(Target t) { return static_cast<std::size_t>(t); }

std::size_t m_star_for(const ExperimentConfig& config, const GridCell& cell) {
  return config.rl_mstar.value_or(cell.n);
}

double eq_level(const GridCell& cell) { return 1.0 - 1.0 / static_cast<double>(cell.n); }

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  return sorted_quantile(xs, 0.5);
}

/// Runs `f` and stores either its interval or the failure reason.
template <typename F>
void attempt(ReplicationResult& r, Method m, Target t, F&& f) {
  try {
    r.intervals[idx(m)][idx(t)] = f();
  } catch (const std::exception& e) {
    r.interval_failure[idx(m)][idx(t)] = e.what();
  }
}

void fail_all(ReplicationResult& r, const std::string& reason) {
  r.failure = reason;
  for (auto& row : r.interval_failure)
    for (auto& cell : row)
      if (cell.empty()) cell = reason;
}

}  // namespace

CellTruth cell_truth(const ExperimentConfig& config, const GridCell& cell) {
  DgpSpec spec = config.dgp;
  spec.n = cell.n;
  const GroundTruth g = ground_truth(spec);
  CellTruth truth;
  truth.gamma0 = g.gamma0;
  truth.theta0 = g.theta0;
  if (config.wants(Target::rl)) {
    const RlTruth rl = rl_truth(spec, config.rl_tau, m_star_for(config, cell));
    truth.rl = rl.value;
    truth.rl_mc_se = rl.mc_se;
  }
  if (config.wants(Target::eq)) truth.eq = eq_truth(spec, eq_level(cell));
  return truth;
}

ReplicationResult run_replication(const ExperimentConfig& config, std::size_t cell_index,
                                  std::size_t replication) {
  const GridCell& cell = config.grid.at(cell_index);
  const auto seed = [&](std::uint64_t stream) {
    return derive_seed(config.base_seed, cell_index, replication, stream);
  };
  ReplicationResult r;

  DgpSpec spec = config.dgp;
  spec.n = cell.n;
  spec.seed = seed(0);
  const std::vector<double> series = simulate(spec);
  const std::vector<double> maxima = block_maxima(series, {cell.m, cell.l});

  GevFit fit;
  try {
    fit = fit_gev_mle(maxima, {.q = config.q});
  } catch (const std::exception& e) {
    fail_all(r, std::string("mle: ") + e.what());
    return r;
  }
  ThetaFit theta_fit;
  PseudoObs pseudo;
  try {
    theta_fit = fit_theta(series, cell.m, config.K);
    pseudo = pseudo_observations(series, cell.m);
  } catch (const std::exception& e) {
    fail_all(r, std::string("theta: ") + e.what());
    return r;
  }

  RiskQuery query;
  query.tau = config.rl_tau;
  query.tau_e = eq_level(cell);
  query.m = cell.m;
  query.m_star = m_star_for(config, cell);
  query.alpha = config.alpha;

  r.mle[idx(Target::gamma)] = fit.params.gamma;
  r.mle[idx(Target::theta)] = theta_fit.theta_hat;
  r.mle[idx(Target::rl)] = return_level_point(fit.params, query.tau, query.m, query.m_star);
  try {
    r.mle[idx(Target::eq)] = var_point(fit.params, theta_fit.theta_hat, query.tau_e, query.m);
  } catch (const std::exception&) {
  }

  if (config.wants(Method::FS)) {
    attempt(r, Method::FS, Target::gamma, [&] { return ci_gamma_symmetric(fit, config.alpha); });
    attempt(r, Method::FS, Target::theta, [&] { return ci_theta_symmetric(theta_fit, config.alpha); });
    attempt(r, Method::FS, Target::rl, [&] { return ci_return_level_symmetric(fit, query); });
    attempt(r, Method::FS, Target::eq, [&] { return ci_var_symmetric(fit, theta_fit, query); });
  }
  if (config.wants(Method::FA)) {
    // No asymmetric frequentist construction exists for gamma and theta.
    r.interval_failure[idx(Method::FA)][idx(Target::gamma)] = "not defined";
    r.interval_failure[idx(Method::FA)][idx(Target::theta)] = "not defined";
    attempt(r, Method::FA, Target::rl, [&] {
      return ci_asymmetric_mc(fit, nullptr, RiskTarget::return_level, query, config.draws, seed(1));
    });
    attempt(r, Method::FA, Target::eq, [&] {
      return ci_asymmetric_mc(fit, &theta_fit, RiskTarget::value_at_risk, query, config.draws, seed(2));
    });
  }

  const bool bayes = config.wants(Method::BS) || config.wants(Method::BA);
  if (bayes) {
    PosteriorChain chain;
    ChainConfig cc = config.mcmc;
    cc.seed = seed(3);
    cc.compute_ess = false;
    try {
      chain = sample_posterior(maxima, fit, PriorSpec::anchored_at(fit), cc);
    } catch (const std::exception& e) {
      const std::string reason = std::string("mcmc: ") + e.what();
      r.failure = reason;
      for (Method m : {Method::BS, Method::BA})
        for (Target t : kAllTargets) r.interval_failure[idx(m)][idx(t)] = reason;
      return r;
    }
    std::optional<ThetaPosterior> theta_post;
    std::string theta_failure;
    try {
      theta_post.emplace(pseudo, config.theta_prior, true, &theta_fit);
    } catch (const std::exception& e) {
      theta_failure = std::string("theta posterior: ") + e.what();
    }

    const std::vector<double> gammas = chain.gamma();
    const std::vector<double> rls = rl_posterior(chain, query.tau, query.m, query.m_star);
    std::vector<double> vars;
    std::string var_failure = theta_failure;
    if (theta_post) {
      try {
        vars = var_posterior(chain, *theta_post, query.tau_e, query.m, seed(4));
      } catch (const std::exception& e) {
        var_failure = std::string("var posterior: ") + e.what();
      }
    }

    r.posterior_median[idx(Target::gamma)] = median(gammas);
    r.posterior_median[idx(Target::rl)] = median(rls);
    if (theta_post) r.posterior_median[idx(Target::theta)] = theta_post->quantile(0.5);
    if (!vars.empty()) r.posterior_median[idx(Target::eq)] = median(vars);

    const auto theta_or_fail = [&]() -> const ThetaPosterior& {
      if (!theta_post) throw numerical_error(theta_failure);
      return *theta_post;
    };
    const auto vars_or_fail = [&]() -> const std::vector<double>& {
      if (vars.empty()) throw numerical_error(var_failure);
      return vars;
    };
    if (config.wants(Method::BS)) {
      attempt(r, Method::BS, Target::gamma, [&] { return credible_interval_symmetric(gammas, config.alpha); });
      attempt(r, Method::BS, Target::theta,
              [&] { return credible_interval_symmetric(theta_or_fail(), config.alpha); });
      attempt(r, Method::BS, Target::rl, [&] { return credible_interval_symmetric(rls, config.alpha); });
      attempt(r, Method::BS, Target::eq,
              [&] { return credible_interval_symmetric(vars_or_fail(), config.alpha); });
    }
    if (config.wants(Method::BA)) {
      attempt(r, Method::BA, Target::gamma, [&] { return credible_interval_asymmetric(gammas, config.alpha); });
      attempt(r, Method::BA, Target::theta,
              [&] { return credible_interval_asymmetric(theta_or_fail(), config.alpha); });
      attempt(r, Method::BA, Target::rl, [&] { return credible_interval_asymmetric(rls, config.alpha); });
      attempt(r, Method::BA, Target::eq,
              [&] { return credible_interval_asymmetric(vars_or_fail(), config.alpha); });
    }
  }
  return r;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t workers = effective_workers(config);
  ExperimentReport report;

  for (std::size_t c = 0; c < config.grid.size(); ++c) {
    const GridCell& cell = config.grid[c];
    CellResult out;
    out.cell = cell;
    out.truth = cell_truth(config, cell);

    std::vector<ReplicationResult> results(config.replications);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i = next.fetch_add(1); i < results.size(); i = next.fetch_add(1))
        results[i] = run_replication(config, c, i);
    };
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      const std::size_t count = std::min(workers, results.size());
      pool.reserve(count);
      for (std::size_t w = 0; w < count; ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }

    for (const ReplicationResult& r : results)
      if (!r.failure.empty()) {
        ++out.failed_replications;
        out.failure_reasons.push_back(r.failure);
      }
    if (5 * out.failed_replications > config.replications)
      throw numerical_error("more than 20% of replications failed in cell n=" + std::to_string(cell.n) +
                            " m=" + std::to_string(cell.m) + "; first reason: " + out.failure_reasons.front());

    for (Method m : config.methods) {
      for (Target t : config.targets) {
        CoverageRow row{cell, m, t};
        const double truth = out.truth[t];
        std::size_t covered = 0;
        double width = 0.0;
        for (const ReplicationResult& r : results) {
          const auto& iv = r.intervals[idx(m)][idx(t)];
          if (!iv || std::isnan(truth)) {
            ++row.failed;
            continue;
          }
          ++row.scored;
          covered += iv->contains(truth) ? 1 : 0;
          width += iv->width();
        }
        if (row.scored > 0) {
          row.coverage = static_cast<double>(covered) / static_cast<double>(row.scored);
          row.width = width / static_cast<double>(row.scored);
          row.mc_se = std::sqrt(row.coverage * (1.0 - row.coverage) / static_cast<double>(row.scored));
        }
        out.coverage.push_back(row);
      }
    }

    if (config.wants(Method::BS) || config.wants(Method::BA)) {
      for (Target t : config.targets) {
        MseRow row{cell, t};
        const double truth = out.truth[t];
        double se_post = 0.0, se_mle = 0.0;
        for (const ReplicationResult& r : results) {
          const double a = r.posterior_median[idx(t)], b = r.mle[idx(t)];
          if (std::isnan(a) || std::isnan(b) || std::isnan(truth)) continue;
          ++row.scored;
          se_post += (a - truth) * (a - truth);
          se_mle += (b - truth) * (b - truth);
        }
        if (row.scored > 0) {
          row.mse_posterior = se_post / static_cast<double>(row.scored);
          row.mse_mle = se_mle / static_cast<double>(row.scored);
          row.ratio = row.mse_posterior / row.mse_mle;
        }
        out.mse.push_back(row);
      }
    }
    report.cells.push_back(std::move(out));
  }
  return report;
}

std::vector<CoverageRow> run_coverage(const ExperimentConfig& config) {
  std::vector<CoverageRow> rows;
  for (auto& c : run_experiment(config).cells) rows.insert(rows.end(), c.coverage.begin(), c.coverage.end());
  return rows;
}

std::vector<MseRow> run_mse_ratio(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  // Medians need the posterior; intervals are not scored here.
  cfg.methods = {Method::BS};
  std::vector<MseRow> rows;
  for (auto& c : run_experiment(cfg).cells) rows.insert(rows.end(), c.mse.begin(), c.mse.end());
  return rows;
}

BlockDiagnostics diagnose_blocks(std::span<const double> series, const std::vector<std::size_t>& m_values,
                                 double alpha, int max_lag, double q, std::size_t K) {
  if (m_values.empty()) throw std::invalid_argument("no block sizes given");
  if (max_lag < 1) throw std::invalid_argument("max_lag must be at least 1");
  const std::size_t largest = *std::max_element(m_values.begin(), m_values.end());
  if (series.size() < largest) throw std::invalid_argument("series too short");
  const Ecdf fn(series);
  const double z = two_sided_z(alpha);

  BlockDiagnostics out;
  for (std::size_t m : m_values) {
    const std::vector<double> maxima = block_maxima(series, {m, 0});
    const std::size_t k = maxima.size();
    StabilityRow row;
    row.m = m;
    row.k = k;
    double theta_hat = kNaN;
    try {
      const ThetaFit tf = fit_theta(series, m, K);
      theta_hat = tf.theta_hat;
      row.theta_hat = tf.theta_hat;
      row.theta_ci = ci_theta_symmetric(tf, alpha);
    } catch (const std::exception&) {
    }
    try {
      const GevFit fit = fit_gev_mle(maxima, {.q = q});
      row.gamma_hat = fit.params.gamma;
      if (fit.has_information()) row.gamma_ci = ci_gamma_symmetric(fit, alpha);
    } catch (const std::exception&) {
    }
    out.stability.push_back(row);

    std::vector<double> squares(k);
    std::transform(maxima.begin(), maxima.end(), squares.begin(), [](double v) { return v * v; });
    for (int lag = 1; lag <= max_lag && static_cast<std::size_t>(lag) < k; ++lag)
      out.acf.push_back({m, lag, autocorrelation(maxima, lag), autocorrelation(squares, lag),
                         z / std::sqrt(static_cast<double>(k))});

    if (!std::isnan(theta_hat)) {
      std::vector<double> u(k);
      for (std::size_t i = 0; i < k; ++i)
        u[i] = std::pow(fn(maxima[i]), theta_hat * static_cast<double>(m));
      std::sort(u.begin(), u.end());
      for (std::size_t i = 0; i < k; ++i)
        out.qq.push_back({m, i + 1, static_cast<double>(i + 1) / static_cast<double>(k + 1), u[i]});
    }
  }
  return out;
}

}  // namespace bmevt
