#include "bmevt/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace bmevt {

std::string to_string(Method method) {
  switch (method) {
    case Method::BS: return "BS";
    case Method::BA: return "BA";
    case Method::FS: return "FS";
    case Method::FA: return "FA";
  }
  return "?";
}

std::string to_string(Target target) {
  switch (target) {
    case Target::gamma: return "gamma";
    case Target::theta: return "theta";
    case Target::rl: return "RL";
    case Target::eq: return "EQ";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : kAllMethods)
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown method '" + name + "'");
}

Target parse_target(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "gamma") return Target::gamma;
  if (lower == "theta") return Target::theta;
  if (lower == "rl") return Target::rl;
  if (lower == "eq" || lower == "var") return Target::eq;
  throw std::invalid_argument("unknown target '" + name + "'");
}

bool ExperimentConfig::wants(Method m) const {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

bool ExperimentConfig::wants(Target t) const {
  return std::find(targets.begin(), targets.end(), t) != targets.end();
}

void ExperimentConfig::validate() const {
  DgpSpec probe = dgp;
  bmevt::validate(probe);
  if (grid.empty()) throw std::invalid_argument("experiment grid is empty");
  for (const GridCell& c : grid) {
    if (c.m < 1) throw std::invalid_argument("block size m must be at least 1");
    if (c.k() < 4) throw std::invalid_argument("every grid cell needs k = n / (m + l) >= 4");
    if (rl_mstar && *rl_mstar < c.m) throw std::invalid_argument("rl_mstar must be at least m");
  }
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(rl_tau > 0.0 && rl_tau < 1.0)) throw std::invalid_argument("rl_tau must lie in (0, 1)");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0, 1)");
  if (K < 1) throw std::invalid_argument("K must be at least 1");
  if (draws < 2) throw std::invalid_argument("draws must be at least 2");
  if (methods.empty() || targets.empty()) throw std::invalid_argument("no methods or targets selected");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    return s.substr(1, s.size() - 2);
  return s;
}

std::string strip_comment(const std::string& line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

std::vector<std::string> split_values(const std::string& raw) {
  const std::string v = trim(raw);
  if (v.empty()) throw std::invalid_argument("missing value");
  if (v.front() != '[') return {unquote(v)};
  if (v.back() != ']') throw std::invalid_argument("unterminated array: " + v);
  std::vector<std::string> out;
  std::stringstream ss(v.substr(1, v.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(unquote(item));
  }
  return out;
}

double to_double(const std::string& key, const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) throw std::invalid_argument("'" + key + "' expects a number, got '" + s + "'");
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    if (!s.empty() && s.front() != '-') v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty())
    throw std::invalid_argument("'" + key + "' expects a non-negative integer, got '" + s + "'");
  return v;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, std::vector<std::string>> kv;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty() || line.front() == '[') continue;  // blank or table header
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    kv[key] = split_values(line.substr(eq + 1));
  }

  ExperimentConfig cfg;
  std::vector<std::uint64_t> ns, ms, ls;
  auto single = [&](const std::string& key) -> const std::string& {
    const auto& v = kv.at(key);
    if (v.size() != 1) throw std::invalid_argument("'" + key + "' expects a single value");
    return v.front();
  };
  for (const auto& [key, values] : kv) {
    if (key == "model") cfg.dgp.model = parse_model(single(key));
    else if (key == "eta") cfg.dgp.eta = to_double(key, single(key));
    else if (key == "marginal") cfg.dgp.marginal = parse_marginal(single(key));
    else if (key == "arch_burn_in") cfg.dgp.burn_in = to_uint(key, single(key));
    else if (key == "n") for (const auto& v : values) ns.push_back(to_uint(key, v));
    else if (key == "m") for (const auto& v : values) ms.push_back(to_uint(key, v));
    else if (key == "l") for (const auto& v : values) ls.push_back(to_uint(key, v));
    else if (key == "replications") cfg.replications = to_uint(key, single(key));
    else if (key == "alpha") cfg.alpha = to_double(key, single(key));
    else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& v : values) cfg.methods.push_back(parse_method(v));
    } else if (key == "targets") {
      cfg.targets.clear();
      for (const auto& v : values) cfg.targets.push_back(parse_target(v));
    }
    else if (key == "K") cfg.K = to_uint(key, single(key));
    else if (key == "q") cfg.q = to_double(key, single(key));
    else if (key == "iters") cfg.mcmc.iters = to_uint(key, single(key));
    else if (key == "burn_in") cfg.mcmc.burn_in = to_uint(key, single(key));
    else if (key == "thin") cfg.mcmc.thin = to_uint(key, single(key));
    else if (key == "draws") cfg.draws = to_uint(key, single(key));
    else if (key == "base_seed") cfg.base_seed = to_uint(key, single(key));
    else if (key == "workers") cfg.workers = to_uint(key, single(key));
    else if (key == "rl_tau") cfg.rl_tau = to_double(key, single(key));
    else if (key == "rl_mstar") cfg.rl_mstar = to_uint(key, single(key));
    else if (key == "theta_atom") cfg.theta_prior.atom = to_double(key, single(key));
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }

  if (ns.size() != ms.size()) throw std::invalid_argument("n and m arrays must have equal length");
  if (ls.empty()) ls.assign(ns.size(), 0);
  if (ls.size() == 1 && ns.size() > 1) ls.assign(ns.size(), ls.front());
  if (ls.size() != ns.size()) throw std::invalid_argument("l must be a scalar or match n in length");
  for (std::size_t i = 0; i < ns.size(); ++i) cfg.grid.push_back({ns[i], ms[i], ls[i]});
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::size_t effective_workers(const ExperimentConfig& config) {
  if (const char* env = std::getenv("BM_EVT_WORKERS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != nullptr && *end == '\0' && v > 0) return v;
  }
  return std::max<std::size_t>(1, config.workers);
}

}  // namespace bmevt
