#include "fairprice/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "fairprice/closed_form.hpp"
#include "fairprice/errors.hpp"
#include "fairprice/markets.hpp"
#include "fairprice/oracle.hpp"
#include "fairprice/trace_io.hpp"

namespace fairprice::experiment {

int worker_threads() {
  if (const char* env = std::getenv("FAIRPRICE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::unique_ptr<sim::Agent> make_agent(const config::AgentSpec& agent, const MarketConfig& market,
                                       std::int64_t horizon, std::uint64_t seed) {
  if (agent.kind == sim::AgentKind::fpa) {
    return std::make_unique<sim::FpaRunner>(config::fpa_config(agent, market, horizon, seed));
  }
  return sim::make_baseline(agent.kind, market, seed);
}

std::vector<CellResult> run_cells(const config::ExperimentSpec& spec, const MarketConfig& market,
                                  double oracle_revenue, const std::vector<Cell>& cells,
                                  std::int64_t record_every, int threads) {
  std::vector<CellResult> out(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t i) {
    out[i].cell = cells[i];
    sim::SimConfig sim(market, cells[i].horizon, cells[i].seed);
    sim.record_every = record_every;
    try {
      auto agent = make_agent(spec.agent, market, cells[i].horizon, cells[i].seed);
      out[i].trace = sim::run_episode(*agent, sim, oracle_revenue);
    } catch (const DegenerateDemandError& e) {
      out[i].failure = e.what();
    }
  });
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  const double n = static_cast<double>(x.size());
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw DomainError("slope needs distinct x values");
  return sxy / sxx;
}

std::pair<double, double> mean_stderr(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double n = static_cast<double>(values.size());
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

SweepResult sweep(const config::ExperimentSpec& spec, int threads) {
  if (spec.horizons.size() < 3) throw DomainError("sweep needs at least 3 horizons");
  if (spec.seeds.size() < 5) throw DomainError("sweep needs at least 5 seeds");
  const MarketConfig market = config::build_market(spec.environment);
  SweepResult result;
  result.oracle_revenue = oracle::solve_fair_optimal(market).revenue;

  std::vector<Cell> cells;
  for (auto t : spec.horizons) {
    for (auto s : spec.seeds) cells.push_back({t, s});
  }
  result.cells = run_cells(spec, market, result.oracle_revenue, cells, 0, threads);

  std::vector<double> xs, regrets, ss;
  for (auto t : spec.horizons) {
    std::vector<double> r, s, u;
    for (const auto& c : result.cells) {
      if (c.cell.horizon != t || !c.failure.empty()) continue;
      r.push_back(c.trace.cumulative_regret);
      s.push_back(c.trace.cumulative_S);
      u.push_back(c.trace.cumulative_U);
    }
    CurvePoint p;
    p.horizon = t;
    p.runs = r.size();
    std::tie(p.mean_regret, p.stderr_regret) = mean_stderr(r);
    std::tie(p.mean_S, p.stderr_S) = mean_stderr(s);
    p.mean_U = mean_stderr(u).first;
    result.points.push_back(p);
    xs.push_back(static_cast<double>(t));
    regrets.push_back(p.mean_regret);
    ss.push_back(p.mean_S);
  }
  result.regret_slope = loglog_slope(xs, regrets);
  result.S_slope = loglog_slope(xs, ss);
  return result;
}

std::string curve_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "horizon,runs,mean_regret,stderr_regret,mean_S,stderr_S,mean_U\n";
  for (const auto& p : result.points) {
    out << p.horizon << ',' << p.runs << ',' << sim::format_real(p.mean_regret) << ','
        << sim::format_real(p.stderr_regret) << ',' << sim::format_real(p.mean_S) << ','
        << sim::format_real(p.stderr_S) << ',' << sim::format_real(p.mean_U) << '\n';
  }
  return out.str();
}

namespace {

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const SweepResult& result) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : result.points) {
    points.push_back({{"horizon", p.horizon},
                      {"runs", p.runs},
                      {"mean_regret", p.mean_regret},
                      {"stderr_regret", p.stderr_regret},
                      {"mean_S", p.mean_S},
                      {"stderr_S", p.stderr_S},
                      {"mean_U", p.mean_U}});
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& c : result.cells) {
    if (!c.failure.empty()) failures.push_back({{"horizon", c.cell.horizon}, {"seed", c.cell.seed}, {"error", c.failure}});
  }
  return {{"oracle_revenue", result.oracle_revenue},
          {"points", points},
          {"regret_slope", finite_or_null(result.regret_slope)},
          {"S_slope", finite_or_null(result.S_slope)},
          {"failures", failures}};
}

nlohmann::json solve_report(const config::EnvironmentSpec& env, const oracle::OracleConfig& cfg) {
  const MarketConfig market = config::build_market(env);
  const auto sol = oracle::solve_fair_optimal(market, cfg);
  nlohmann::json report = {{"preset", env.preset},
                           {"revenue", sol.revenue},
                           {"policy", sim::to_json(sol.policy)},
                           {"accepted_mean", sol.params.accepted_price},
                           {"proposed_mean", sol.params.proposed_price()},
                           {"gap", sol.params.gap},
                           {"procedural_unfairness", procedural_unfairness(sol.policy, market.grid)},
                           {"substantive_unfairness", substantive_unfairness(sol.policy, market)}};
  if (env.preset == "example1" || env.preset == "example-eps") {
    const double eps = env.preset == "example1" ? 0.0 : env.eps;
    if (eps <= closed_form::kMaxEps) {
      const auto cf = closed_form::closed_form_example_optimum(eps);
      report["closed_form"] = {{"eps", eps},
                               {"revenue", cf.revenue},
                               {"policy", sim::to_json(cf.policy)},
                               {"accepted_mean", cf.accepted_price},
                               {"proposed_mean", cf.accepted_price + cf.gap},
                               {"revenue_error", std::abs(cf.revenue - sol.revenue)},
                               {"policy_linf_error", cf.policy.distance_linf(sol.policy)},
                               {"outside_proven_range", cf.outside_proven_range}};
    }
  }
  return report;
}

namespace {

CompareArm run_arm(const config::AgentSpec& agent, const MarketConfig& market, std::int64_t horizon,
                   const std::vector<std::uint64_t>& seeds, int threads) {
  CompareArm arm;
  const auto sol = oracle::solve_fair_optimal(market);
  arm.oracle_revenue = sol.revenue;
  arm.optimal_proposed_mean = proposed_mean(sol.policy.group1(), market.grid);
  config::ExperimentSpec spec;
  spec.agent = agent;
  std::vector<Cell> cells;
  for (auto s : seeds) cells.push_back({horizon, s});
  const auto results = run_cells(spec, market, arm.oracle_revenue, cells, 0, threads);
  std::vector<double> r, s;
  for (const auto& c : results) {
    if (!c.failure.empty()) {
      ++arm.failures;
      continue;
    }
    r.push_back(c.trace.cumulative_regret);
    s.push_back(c.trace.cumulative_S);
  }
  std::tie(arm.mean_regret, arm.stderr_regret) = mean_stderr(r);
  std::tie(arm.mean_S, arm.stderr_S) = mean_stderr(s);
  return arm;
}

}  // namespace

CompareReport compare_lb(const config::AgentSpec& agent, double eps, std::int64_t horizon,
                         const std::vector<std::uint64_t>& seeds, int threads) {
  if (eps < 0.0) throw DomainError("eps must be nonnegative");
  CompareReport report;
  report.eps = eps;
  report.horizon = horizon;
  report.seeds = seeds;
  report.base = run_arm(agent, sim::example1_market(), horizon, seeds, threads);
  report.perturbed = run_arm(agent, sim::example_eps_market(eps), horizon, seeds, threads);
  report.proposed_mean_gap = std::abs(report.base.optimal_proposed_mean - report.perturbed.optimal_proposed_mean);
  report.closed_form_gap = closed_form::example_proposed_mean_gap(eps);
  return report;
}

nlohmann::json to_json(const CompareReport& report) {
  auto arm = [](const CompareArm& a) {
    return nlohmann::json{{"oracle_revenue", a.oracle_revenue},
                          {"optimal_proposed_mean", a.optimal_proposed_mean},
                          {"mean_regret", a.mean_regret},
                          {"stderr_regret", a.stderr_regret},
                          {"mean_S", a.mean_S},
                          {"stderr_S", a.stderr_S},
                          {"failures", a.failures}};
  };
  return {{"eps", report.eps},
          {"horizon", report.horizon},
          {"seeds", report.seeds},
          {"base", arm(report.base)},
          {"perturbed", arm(report.perturbed)},
          {"proposed_mean_gap", report.proposed_mean_gap},
          {"closed_form_gap", report.closed_form_gap}};
}

}  // namespace fairprice::experiment
