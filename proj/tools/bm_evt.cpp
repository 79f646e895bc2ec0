// bm-evt: block-maxima inference for stationary series from the command line.

#include "bmevt/bayes.hpp"
#include "bmevt/frequentist.hpp"
#include "bmevt/harness.hpp"
#include "bmevt/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace bmevt;
using nlohmann::json;

namespace {

/// Writes to `path`, or stdout when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << text;
}

json interval_json(const Interval& iv) { return json::array({iv.lower, iv.upper}); }

json params_json(const GevParamsd& p) { return {{"gamma", p.gamma}, {"mu", p.mu}, {"sigma", p.sigma}}; }

json matrix_json(const Eigen::Matrix3d& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
  return rows;
}

struct SeriesArgs {
  std::string input;
  std::size_t m = 1;
  std::size_t l = 0;
  double q = 0.5;
  std::size_t K = 10;
  double alpha = 0.05;
};

struct BayesArgs {
  std::size_t iters = 100000;
  std::size_t burn_in = 20000;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
  double atom = 0.1;
};

void add_series_options(CLI::App* cmd, SeriesArgs& a, bool blocks = true) {
  cmd->add_option("--input", a.input, "series file, one value per line")->required()->check(CLI::ExistingFile);
  if (blocks) {
    cmd->add_option("--m", a.m, "big-block size")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--l", a.l, "small-block size")->capture_default_str();
    cmd->add_option("--q", a.q, "restriction exponent (gamma < k^q)")->capture_default_str();
  }
  cmd->add_option("--K", a.K, "origins in the sliding variance estimator")->capture_default_str();
  cmd->add_option("--alpha", a.alpha, "interval level 1 - alpha")->capture_default_str();
}

void add_bayes_options(CLI::App* cmd, BayesArgs& b) {
  cmd->add_option("--iters", b.iters, "post-burn-in MCMC iterations")->capture_default_str();
  cmd->add_option("--burn-in", b.burn_in, "adaptive burn-in iterations")->capture_default_str();
  cmd->add_option("--thin", b.thin, "keep every thin-th draw")->capture_default_str();
  cmd->add_option("--seed", b.seed, "random seed")->capture_default_str();
  cmd->add_option("--atom", b.atom, "prior mass of theta = 1")->capture_default_str();
}

ChainConfig chain_config(const BayesArgs& b) {
  ChainConfig cc;
  cc.iters = b.iters;
  cc.burn_in = b.burn_in;
  cc.thin = b.thin;
  cc.seed = b.seed;
  return cc;
}

/// Fit, theta fit and (lazily) the posterior objects shared by rl and var.
struct Analysis {
  std::vector<double> series;
  std::vector<double> maxima;
  GevFit fit;
  ThetaFit theta_fit;

  Analysis(const SeriesArgs& a) {
    series = read_series_file(a.input);
    maxima = block_maxima(series, {a.m, a.l});
    fit = fit_gev_mle(maxima, {.q = a.q});
    theta_fit = fit_theta(series, a.m, a.K);
  }
};

int run_risk(const SeriesArgs& a, const BayesArgs& b, RiskTarget target, double level,
             std::optional<std::size_t> m_star, const std::string& method, std::size_t draws,
             const std::string& out) {
  const Analysis an(a);
  RiskQuery query;
  query.m = a.m;
  query.alpha = a.alpha;
  double point = 0.0;
  if (target == RiskTarget::return_level) {
    query.tau = level;
    query.m_star = m_star.value_or(a.m);
    point = return_level_point(an.fit.params, query.tau, query.m, query.m_star);
  } else {
    query.tau_e = level;
    point = var_point(an.fit.params, an.theta_fit.theta_hat, query.tau_e, query.m);
  }

  const Method mth = parse_method(method);
  Interval iv;
  std::optional<double> posterior_median;
  if (mth == Method::FS) {
    iv = target == RiskTarget::return_level ? ci_return_level_symmetric(an.fit, query)
                                            : ci_var_symmetric(an.fit, an.theta_fit, query);
  } else if (mth == Method::FA) {
    iv = ci_asymmetric_mc(an.fit, &an.theta_fit, target, query, draws, b.seed);
  } else {
    const PosteriorChain chain =
        sample_posterior(an.maxima, an.fit, PriorSpec::anchored_at(an.fit), chain_config(b));
    std::vector<double> values;
    if (target == RiskTarget::return_level) {
      values = rl_posterior(chain, query.tau, query.m, query.m_star);
    } else {
      const ThetaPosterior tp(pseudo_observations(an.series, a.m), {.atom = b.atom}, true, &an.theta_fit);
      values = var_posterior(chain, tp, query.tau_e, query.m, derive_seed(b.seed, 1));
    }
    iv = mth == Method::BS ? credible_interval_symmetric(values, a.alpha) : credible_interval_asymmetric(values, a.alpha);
    posterior_median = empirical_quantile(values, 0.5);
  }
  json j{{"point", point}, {"interval", interval_json(iv)}, {"method", method}, {"alpha", a.alpha}};
  if (posterior_median) j["posterior_median"] = *posterior_median;
  emit(out, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-maxima inference for stationary time series"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate a series from a reference model");
  std::string model = "armax", marginal = "implied", sim_out, truth_out;
  double eta = 0.5;
  std::size_t n = 1000, arch_burn = 1000;
  std::uint64_t sim_seed = 1;
  sim->add_option("--model", model, "armax | clayton_markov | arch")->capture_default_str();
  sim->add_option("--eta", eta, "dependence parameter")->capture_default_str();
  sim->add_option("--marginal", marginal, "implied | frechet | exponential | powerlaw")->capture_default_str();
  sim->add_option("--n", n, "series length")->capture_default_str();
  sim->add_option("--seed", sim_seed, "random seed")->capture_default_str();
  sim->add_option("--burn-in", arch_burn, "ARCH burn-in")->capture_default_str();
  sim->add_option("--out", sim_out, "output series file (default stdout)");
  sim->add_option("--truth", truth_out, "write the ground-truth record as JSON");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "GEV maximum likelihood on block maxima");
  SeriesArgs fit_args;
  std::string fit_out;
  add_series_options(fit_cmd, fit_args);
  fit_cmd->add_option("--out", fit_out, "output JSON (default stdout)");

  // theta
  auto* theta_cmd = app.add_subcommand("theta", "extremal index estimate and interval");
  SeriesArgs theta_args;
  std::string theta_out;
  theta_cmd->add_option("--input", theta_args.input, "series file")->required()->check(CLI::ExistingFile);
  theta_cmd->add_option("--m", theta_args.m, "block size for the pseudo-observations")->required()->check(CLI::PositiveNumber);
  theta_cmd->add_option("--K", theta_args.K, "origins in the sliding variance estimator")->capture_default_str();
  theta_cmd->add_option("--alpha", theta_args.alpha, "interval level 1 - alpha")->capture_default_str();
  theta_cmd->add_option("--out", theta_out, "output JSON (default stdout)");

  // rl / var
  SeriesArgs risk_args;
  BayesArgs risk_bayes;
  std::string risk_method = "FS", risk_out;
  std::size_t risk_draws = 50000;
  double tau = 0.9, tau_e = 0.999;
  std::optional<std::size_t> m_star;
  auto* rl_cmd = app.add_subcommand("rl", "return level point estimate and interval");
  add_series_options(rl_cmd, risk_args);
  add_bayes_options(rl_cmd, risk_bayes);
  rl_cmd->add_option("--tau", tau, "return-level probability")->capture_default_str();
  rl_cmd->add_option("--m-star", m_star, "target block size (default m)");
  rl_cmd->add_option("--method", risk_method, "FS | FA | BS | BA")->capture_default_str();
  rl_cmd->add_option("--draws", risk_draws, "Monte-Carlo draws for FA")->capture_default_str();
  rl_cmd->add_option("--out", risk_out, "output JSON (default stdout)");
  auto* var_cmd = app.add_subcommand("var", "extreme value-at-risk point estimate and interval");
  add_series_options(var_cmd, risk_args);
  add_bayes_options(var_cmd, risk_bayes);
  var_cmd->add_option("--tau-e", tau_e, "extreme level")->capture_default_str();
  var_cmd->add_option("--method", risk_method, "FS | FA | BS | BA")->capture_default_str();
  var_cmd->add_option("--draws", risk_draws, "Monte-Carlo draws for FA")->capture_default_str();
  var_cmd->add_option("--out", risk_out, "output JSON (default stdout)");

  // posterior
  auto* post_cmd = app.add_subcommand("posterior", "sample the GEV posterior and the theta posterior");
  SeriesArgs post_args;
  BayesArgs post_bayes;
  std::string chain_out, theta_post_out;
  std::size_t is_draws = 0;
  add_series_options(post_cmd, post_args);
  add_bayes_options(post_cmd, post_bayes);
  post_cmd->add_option("--out", chain_out, "chain CSV (default stdout)");
  post_cmd->add_option("--theta-out", theta_post_out, "theta posterior grid CSV; a .json sidecar holds the atom");
  post_cmd->add_option("--importance-draws", is_draws, "report an importance-sampling ESS diagnostic");

  // coverage / mse
  auto* cov_cmd = app.add_subcommand("coverage", "Monte-Carlo coverage study");
  auto* mse_cmd = app.add_subcommand("mse", "MSE ratio of posterior medians against the MLE");
  std::string config_path, study_out, study_json;
  std::optional<std::size_t> workers;
  for (auto* cmd : {cov_cmd, mse_cmd}) {
    cmd->add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", study_out, "output CSV (default stdout)");
    cmd->add_option("--json", study_json, "also write a JSON report");
    cmd->add_option("--workers", workers, "worker threads (BM_EVT_WORKERS overrides)");
  }

  // diagnose
  auto* diag_cmd = app.add_subcommand("diagnose", "block-size diagnostics");
  std::string diag_input, diag_out = "diagnose";
  std::vector<std::size_t> diag_m;
  double diag_alpha = 0.05, diag_q = 0.5;
  int max_lag = 10;
  std::size_t diag_K = 10;
  diag_cmd->add_option("--input", diag_input, "series file")->required()->check(CLI::ExistingFile);
  diag_cmd->add_option("--m", diag_m, "block sizes to scan")->required()->expected(1, -1);
  diag_cmd->add_option("--alpha", diag_alpha, "band level")->capture_default_str();
  diag_cmd->add_option("--max-lag", max_lag, "largest autocorrelation lag")->capture_default_str();
  diag_cmd->add_option("--q", diag_q, "restriction exponent")->capture_default_str();
  diag_cmd->add_option("--K", diag_K, "origins in the sliding variance estimator")->capture_default_str();
  diag_cmd->add_option("--out", diag_out, "output prefix for the three CSV files")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) {
      DgpSpec spec{parse_model(model), eta, parse_marginal(marginal), n, sim_seed, arch_burn};
      std::ostringstream os;
      write_series(os, simulate(spec));
      emit(sim_out, os.str());
      if (!truth_out.empty()) {
        const GroundTruth g = ground_truth(spec);
        const json t{{"model", to_string(spec.model)},
                     {"eta", spec.eta},
                     {"gamma0", std::isfinite(g.gamma0) ? json(g.gamma0) : json(nullptr)},
                     {"theta0", std::isfinite(g.theta0) ? json(g.theta0) : json(nullptr)},
                     {"notes", g.notes}};
        emit(truth_out, t.dump(2) + "\n");
      }
    } else if (fit_cmd->parsed()) {
      const auto series = read_series_file(fit_args.input);
      const auto maxima = block_maxima(series, {fit_args.m, fit_args.l});
      const GevFit fit = fit_gev_mle(maxima, {.q = fit_args.q});
      json j{{"params", params_json(fit.params)},
             {"loglik", fit.loglik},
             {"k", fit.k},
             {"gamma_upper", fit.gamma_upper()},
             {"status", fit.has_information() ? "converged" : "singular_information"}};
      if (fit.has_information()) {
        const Eigen::Vector3d se = fit.standard_errors();
        j["standard_errors"] = {{"gamma", se[0]}, {"mu", se[1]}, {"sigma", se[2]}};
        j["observed_info"] = matrix_json(fit.observed_info);
        j["info_inv_standardized"] = matrix_json(fit.info_inv_standardized);
        j["gamma_interval"] = interval_json(ci_gamma_symmetric(fit, fit_args.alpha));
      }
      emit(fit_out, j.dump(2) + "\n");
      if (!fit.has_information()) return 2;
    } else if (theta_cmd->parsed()) {
      const auto series = read_series_file(theta_args.input);
      const ThetaFit tf = fit_theta(series, theta_args.m, theta_args.K);
      const json j{{"theta_hat", tf.theta_hat},
                   {"sigma_tilde_sq", tf.sigma_tilde_sq},
                   {"var_hat", tf.var_hat},
                   {"k_tilde", tf.k_tilde},
                   {"m_tilde", tf.m_tilde},
                   {"K", tf.K},
                   {"interval", interval_json(ci_theta_symmetric(tf, theta_args.alpha))}};
      emit(theta_out, j.dump(2) + "\n");
    } else if (rl_cmd->parsed()) {
      return run_risk(risk_args, risk_bayes, RiskTarget::return_level, tau, m_star, risk_method, risk_draws,
                      risk_out);
    } else if (var_cmd->parsed()) {
      return run_risk(risk_args, risk_bayes, RiskTarget::value_at_risk, tau_e, std::nullopt, risk_method,
                      risk_draws, risk_out);
    } else if (post_cmd->parsed()) {
      const Analysis an(post_args);
      ChainConfig cc = chain_config(post_bayes);
      cc.importance_draws = is_draws;
      const PosteriorChain chain = sample_posterior(an.maxima, an.fit, PriorSpec::anchored_at(an.fit), cc);
      std::ostringstream os;
      write_chain_csv(os, chain);
      emit(chain_out, os.str());
      std::cerr << "acceptance " << chain.acceptance_rate << ", ess (" << chain.ess[0] << ", " << chain.ess[1]
                << ", " << chain.ess[2] << ")";
      if (chain.importance_ess) std::cerr << ", importance ess " << *chain.importance_ess;
      std::cerr << '\n';
      if (!theta_post_out.empty()) {
        const ThetaPosterior tp(pseudo_observations(an.series, post_args.m), {.atom = post_bayes.atom}, true,
                                &an.theta_fit);
        std::ostringstream grid;
        write_theta_posterior_csv(grid, tp);
        emit(theta_post_out, grid.str());
        emit(theta_post_out + ".json", theta_posterior_json(tp) + "\n");
      }
    } else if (cov_cmd->parsed() || mse_cmd->parsed()) {
      ExperimentConfig cfg = load_config(config_path);
      if (workers) cfg.workers = *workers;
      std::ostringstream os;
      if (cov_cmd->parsed()) {
        const ExperimentReport report = run_experiment(cfg);
        std::vector<CoverageRow> rows;
        for (const auto& c : report.cells) rows.insert(rows.end(), c.coverage.begin(), c.coverage.end());
        write_coverage_csv(os, rows);
        if (!study_json.empty()) emit(study_json, report_json(cfg, report) + "\n");
      } else {
        cfg.methods = {Method::BS};
        const ExperimentReport report = run_experiment(cfg);
        std::vector<MseRow> rows;
        for (const auto& c : report.cells) rows.insert(rows.end(), c.mse.begin(), c.mse.end());
        write_mse_csv(os, rows);
        if (!study_json.empty()) emit(study_json, report_json(cfg, report) + "\n");
      }
      emit(study_out, os.str());
    } else if (diag_cmd->parsed()) {
      const auto series = read_series_file(diag_input);
      write_diagnostics_csv(diag_out, diagnose_blocks(series, diag_m, diag_alpha, max_lag, diag_q, diag_K));
    }
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n' << app.help();
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
