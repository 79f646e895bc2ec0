#include "bmevt/harness.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace bmevt {

namespace {

/// Round-trip formatting; NaN written as an empty CSV field.
std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json json_num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out.exceptions(std::ios::badbit | std::ios::failbit);
  return out;
}

}  // namespace

void write_coverage_csv(std::ostream& os, const std::vector<CoverageRow>& rows) {
  os << "n,k,m,method,target,coverage,width,reps,failed,mc_se\n";
  for (const CoverageRow& r : rows)
    os << r.cell.n << ',' << r.cell.k() << ',' << r.cell.m << ',' << to_string(r.method) << ','
       << to_string(r.target) << ',' << num(r.coverage) << ',' << num(r.width) << ',' << r.scored << ','
       << r.failed << ',' << num(r.mc_se) << '\n';
}

void write_mse_csv(std::ostream& os, const std::vector<MseRow>& rows) {
  os << "n,k,m,target,mse_posterior_median,mse_mle,ratio,reps\n";
  for (const MseRow& r : rows)
    os << r.cell.n << ',' << r.cell.k() << ',' << r.cell.m << ',' << to_string(r.target) << ','
       << num(r.mse_posterior) << ',' << num(r.mse_mle) << ',' << num(r.ratio) << ',' << r.scored << '\n';
}

std::string report_json(const ExperimentConfig& config, const ExperimentReport& report) {
  nlohmann::json j;
  j["model"] = to_string(config.dgp.model);
  j["eta"] = config.dgp.eta;
  j["marginal"] = to_string(config.dgp.marginal);
  j["replications"] = config.replications;
  j["alpha"] = config.alpha;
  j["base_seed"] = config.base_seed;
  j["cells"] = nlohmann::json::array();
  for (const CellResult& c : report.cells) {
    nlohmann::json cell;
    cell["n"] = c.cell.n;
    cell["k"] = c.cell.k();
    cell["m"] = c.cell.m;
    cell["l"] = c.cell.l;
    cell["truth"] = {{"gamma0", json_num(c.truth.gamma0)}, {"theta0", json_num(c.truth.theta0)},
                     {"rl", json_num(c.truth.rl)},         {"rl_mc_se", json_num(c.truth.rl_mc_se)},
                     {"eq", json_num(c.truth.eq)}};
    cell["failed_replications"] = c.failed_replications;
    cell["failure_reasons"] = c.failure_reasons;
    for (const CoverageRow& r : c.coverage)
      cell["coverage"].push_back({{"method", to_string(r.method)},
                                  {"target", to_string(r.target)},
                                  {"coverage", json_num(r.coverage)},
                                  {"width", json_num(r.width)},
                                  {"reps", r.scored},
                                  {"failed", r.failed},
                                  {"mc_se", json_num(r.mc_se)}});
    for (const MseRow& r : c.mse)
      cell["mse"].push_back({{"target", to_string(r.target)},
                             {"mse_posterior_median", json_num(r.mse_posterior)},
                             {"mse_mle", json_num(r.mse_mle)},
                             {"ratio", json_num(r.ratio)},
                             {"reps", r.scored}});
    j["cells"].push_back(cell);
  }
  return j.dump(2);
}

void write_diagnostics_csv(const std::string& prefix, const BlockDiagnostics& d) {
  {
    auto out = open_out(prefix + "_stability.csv");
    out << "m,k,theta_hat,theta_lower,theta_upper,gamma_hat,gamma_lower,gamma_upper\n";
    for (const auto& r : d.stability)
      out << r.m << ',' << r.k << ',' << num(r.theta_hat) << ',' << num(r.theta_ci.lower) << ','
          << num(r.theta_ci.upper) << ',' << num(r.gamma_hat) << ',' << num(r.gamma_ci.lower) << ','
          << num(r.gamma_ci.upper) << '\n';
  }
  {
    auto out = open_out(prefix + "_acf.csv");
    out << "m,lag,acf,acf_squared,band\n";
    for (const auto& r : d.acf)
      out << r.m << ',' << r.lag << ',' << num(r.acf) << ',' << num(r.acf_squared) << ',' << num(r.band) << '\n';
  }
  {
    auto out = open_out(prefix + "_qq.csv");
    out << "m,i,uniform,empirical\n";
    for (const auto& r : d.qq) out << r.m << ',' << r.i << ',' << num(r.uniform) << ',' << num(r.empirical) << '\n';
  }
}

void write_chain_csv(std::ostream& os, const PosteriorChain& chain) {
  os << "iter,gamma,mu,sigma,log_post\n";
  for (std::size_t i = 0; i < chain.draws.size(); ++i) {
    const auto& d = chain.draws[i];
    os << i << ',' << num(d.gamma) << ',' << num(d.mu) << ',' << num(d.sigma) << ',' << num(chain.log_post[i])
       << '\n';
  }
}

void write_theta_posterior_csv(std::ostream& os, const ThetaPosterior& post) {
  os << "theta,density,cdf\n";
  for (std::size_t i = 0; i < post.grid().size(); ++i)
    os << num(post.grid()[i]) << ',' << num(post.grid_density()[i]) << ',' << num(post.grid_cdf()[i]) << '\n';
}

std::string theta_posterior_json(const ThetaPosterior& post) {
  nlohmann::json j{{"atom_weight", post.atom_weight()},
                   {"continuous_mass", post.continuous_mass()},
                   {"log_normalizer", post.log_normalizer()},
                   {"mean", post.mean()},
                   {"sd", post.sd()},
                   {"adjusted", post.adjusted()}};
  return j.dump(2);
}

std::vector<double> read_series(std::istream& is) {
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(b, e - b + 1);
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != token.size() || !std::isfinite(v))
      throw std::invalid_argument("line " + std::to_string(line_no) + ": not a finite number");
    out.push_back(v);
  }
  return out;
}

std::vector<double> read_series_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open series '" + path + "'");
  return read_series(in);
}

void write_series(std::ostream& os, std::span<const double> series) {
  for (double v : series) os << num(v) << '\n';
}

}  // namespace bmevt
