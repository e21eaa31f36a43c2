#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairprice/agents.hpp"
#include "fairprice/config_doc.hpp"
#include "fairprice/simulator.hpp"

namespace fairprice::experiment {

/// FAIRPRICE_THREADS if set and positive, otherwise the hardware concurrency.
int worker_threads();

/// Runs task(0..n-1) on up to `threads` workers. The first exception thrown
/// by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& task);

std::unique_ptr<sim::Agent> make_agent(const config::AgentSpec& agent, const MarketConfig& market,
                                       std::int64_t horizon, std::uint64_t seed);

struct Cell {
  std::int64_t horizon = 0;
  std::uint64_t seed = 0;
};

struct CellResult {
  Cell cell;
  sim::RunTrace trace;
  /// Non-empty when the agent aborted (e.g. degenerate demand); the trace is then empty.
  std::string failure;
};

/// One episode per cell; results keep the order of `cells`.
std::vector<CellResult> run_cells(const config::ExperimentSpec& spec, const MarketConfig& market,
                                  double oracle_revenue, const std::vector<Cell>& cells,
                                  std::int64_t record_every, int threads);

struct CurvePoint {
  std::int64_t horizon = 0;
  std::size_t runs = 0;
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  double mean_S = 0.0;
  double stderr_S = 0.0;
  double mean_U = 0.0;
};

struct SweepResult {
  double oracle_revenue = 0.0;
  std::vector<CurvePoint> points;
  double regret_slope = 0.0;
  double S_slope = 0.0;
  std::vector<CellResult> cells;
};

/// Least-squares slope of log(y) against log(x); NaN if any y <= 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Mean and standard error of the mean.
std::pair<double, double> mean_stderr(const std::vector<double>& values);

/// Horizon x seed grid. Throws DomainError for fewer than 3 horizons or 5 seeds.
SweepResult sweep(const config::ExperimentSpec& spec, int threads);

std::string curve_csv(const SweepResult& result);
nlohmann::json to_json(const SweepResult& result);

/// Optimal fair policy with its accepted/proposed means; closed-form
/// comparison for the example-eps family.
nlohmann::json solve_report(const config::EnvironmentSpec& env, const oracle::OracleConfig& cfg = {});

struct CompareArm {
  double oracle_revenue = 0.0;
  double optimal_proposed_mean = 0.0;
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  double mean_S = 0.0;
  double stderr_S = 0.0;
  std::size_t failures = 0;
};

struct CompareReport {
  double eps = 0.0;
  std::int64_t horizon = 0;
  std::vector<std::uint64_t> seeds;
  CompareArm base;
  CompareArm perturbed;
  double proposed_mean_gap = 0.0;
  double closed_form_gap = 0.0;
};

/// Same agent on example1 and example-eps with paired environment seeds.
CompareReport compare_lb(const config::AgentSpec& agent, double eps, std::int64_t horizon,
                         const std::vector<std::uint64_t>& seeds, int threads);

nlohmann::json to_json(const CompareReport& report);

}  // namespace fairprice::experiment
