#include "bmevt/harness.hpp"

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <sstream>

using namespace bmevt;

namespace {

const char* kSmall = R"(
# tiny ARMAX cell
model = "armax"
eta = 0.5
n = [360]
m = [30]
replications = 6
iters = 2000
burn_in = 500
draws = 2000
base_seed = 17
)";

std::string coverage_csv(const ExperimentConfig& cfg) {
  std::ostringstream os;
  write_coverage_csv(os, run_coverage(cfg));
  return os.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig cfg = parse_config(R"(
[experiment]
model = clayton_markov   # trailing comment
eta = 1.06
marginal = exponential
n = [3600, 7200]
m = [90, 180]
l = 2
methods = ["FA", "FS"]
targets = [rl, eq]
alpha = 0.1
rl_tau = 0.95
rl_mstar = 720
theta_atom = 0.25
)");
  CHECK(cfg.dgp.model == Model::clayton_markov);
  CHECK(cfg.dgp.marginal == Marginal::exponential);
  CHECK(cfg.dgp.eta == 1.06);
  REQUIRE(cfg.grid.size() == 2);
  CHECK(cfg.grid[1].n == 7200);
  CHECK(cfg.grid[1].m == 180);
  CHECK(cfg.grid[0].l == 2);
  CHECK(cfg.grid[1].l == 2);
  CHECK(cfg.grid[0].k() == 3600 / 92);
  CHECK(cfg.wants(Method::FA));
  CHECK(!cfg.wants(Method::BS));
  CHECK(cfg.wants(Target::eq));
  CHECK(!cfg.wants(Target::gamma));
  CHECK(cfg.alpha == 0.1);
  CHECK(cfg.rl_tau == 0.95);
  CHECK(*cfg.rl_mstar == 720);
  CHECK(cfg.theta_prior.atom == 0.25);

  const ExperimentConfig defaults = parse_config("n = [1000]\nm = [10]\n");
  CHECK(defaults.replications == 1000);
  CHECK(defaults.methods.size() == 4);
  CHECK(defaults.K == 10);
  CHECK(defaults.mcmc.iters == 100000);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("n = [100]\nm = [10]\nbogus = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("n = [100, 200]\nm = [10]\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("n = [100, 200]\nm = [10, 20]\nl = [1, 2, 3]\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("n = [30]\nm = [10]\n"), std::invalid_argument);  // k < 4
  CHECK_THROWS_AS(parse_config("n = [100]\nm = [10]\nalpha = 1.5\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("n = [100]\nm = [10]\nmethods = [XS]\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("n = [100]\nm = [10]\nreplications = -3\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("n = [100]\nm = [10]\njust words\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("m = [10]\n"), std::invalid_argument);
  CHECK_THROWS_AS(load_config("/nonexistent/config.toml"), std::invalid_argument);
}

TEST_CASE("worker override from the environment") {
  ExperimentConfig cfg = parse_config(kSmall);
  cfg.workers = 3;
  ::unsetenv("BM_EVT_WORKERS");
  CHECK(effective_workers(cfg) == 3);
  ::setenv("BM_EVT_WORKERS", "5", 1);
  CHECK(effective_workers(cfg) == 5);
  ::setenv("BM_EVT_WORKERS", "junk", 1);
  CHECK(effective_workers(cfg) == 3);
  ::unsetenv("BM_EVT_WORKERS");
  cfg.workers = 0;
  CHECK(effective_workers(cfg) == 1);
}

TEST_CASE("single replication bookkeeping") {
  ExperimentConfig cfg = parse_config(kSmall);
  cfg.replications = 1;
  const ExperimentReport rep = run_experiment(cfg);
  REQUIRE(rep.cells.size() == 1);
  CHECK(rep.cells[0].coverage.size() == 16);
  for (const CoverageRow& row : rep.cells[0].coverage) {
    INFO(to_string(row.method) << " " << to_string(row.target));
    CHECK(row.scored + row.failed == 1);
    if (row.scored == 1) CHECK((row.coverage == 0.0 || row.coverage == 1.0));
  }
  CHECK(rep.cells[0].truth.theta0 == 0.5);
  CHECK(rep.cells[0].truth.gamma0 == 1.0);
}

TEST_CASE("coverage output does not depend on the worker count") {
  ExperimentConfig cfg = parse_config(kSmall);
  ::unsetenv("BM_EVT_WORKERS");
  cfg.workers = 1;
  const std::string one = coverage_csv(cfg);
  cfg.workers = 4;
  const std::string four = coverage_csv(cfg);
  CHECK(one == four);
  CHECK(one.rfind("n,k,m,method,target,coverage,width,reps,failed,mc_se\n", 0) == 0);
}

TEST_CASE("replications are reproducible in isolation") {
  const ExperimentConfig cfg = parse_config(kSmall);
  const ReplicationResult a = run_replication(cfg, 0, 3);
  const ReplicationResult b = run_replication(cfg, 0, 3);
  CHECK(a.failure == b.failure);
  for (std::size_t t = 0; t < 4; ++t) {
    if (std::isnan(a.mle[t])) CHECK(std::isnan(b.mle[t]));
    else CHECK(a.mle[t] == b.mle[t]);
  }
}

TEST_CASE("mse ratio rows") {
  ExperimentConfig cfg = parse_config(kSmall);
  cfg.methods = {Method::BS};
  const std::vector<MseRow> rows = run_mse_ratio(cfg);
  REQUIRE(rows.size() == 4);
  for (const MseRow& r : rows) {
    INFO(to_string(r.target));
    CHECK(r.scored <= cfg.replications);
    if (r.scored > 0) CHECK(r.ratio == r.mse_posterior / r.mse_mle);
  }
  std::ostringstream os;
  write_mse_csv(os, rows);
  CHECK(os.str().rfind("n,k,m,target,mse_posterior_median,mse_mle,ratio,reps\n", 0) == 0);
}

TEST_CASE("block diagnostics on independent data") {
  Rng rng(4);
  std::vector<double> x(20000);
  for (double& v : x) v = rng.uniform();
  const BlockDiagnostics d = diagnose_blocks(x, {20, 50}, 0.05, 5);
  REQUIRE(d.stability.size() == 2);
  CHECK(d.stability[0].k == 1000);
  CHECK(d.stability[0].theta_hat > 0.85);
  CHECK(d.acf.size() == 10);
  int outside = 0;
  for (const AcfRow& r : d.acf)
    if (std::abs(r.acf) > r.band) ++outside;
  CHECK(outside <= 2);
  REQUIRE(d.qq.size() == 1000 + 400);
  CHECK(d.qq.front().uniform == 1.0 / 1001.0);
  for (std::size_t i = 1; i < 1000; ++i) CHECK(d.qq[i].empirical >= d.qq[i - 1].empirical);
}

TEST_CASE("series input") {
  std::istringstream is("# header\n1.5\n\n  -2e-3\n# more\n4\n");
  const std::vector<double> x = read_series(is);
  REQUIRE(x.size() == 3);
  CHECK(x[1] == -2e-3);
  std::istringstream bad("1.0\nabc\n");
  CHECK_THROWS_AS(read_series(bad), std::invalid_argument);
  CHECK_THROWS_AS(read_series_file("/nonexistent/series.txt"), std::invalid_argument);

  std::ostringstream os;
  write_series(os, x);
  std::istringstream back(os.str());
  CHECK(read_series(back) == x);
}

TEST_CASE("method and target names") {
  for (Method m : kAllMethods) CHECK(parse_method(to_string(m)) == m);
  for (Target t : kAllTargets) CHECK(parse_target(to_string(t)) == t);
  CHECK_THROWS_AS(parse_method("XX"), std::invalid_argument);
}
