#include <benchmark/benchmark.h>

#include "fairprice/agents.hpp"
#include "fairprice/linear.hpp"
#include "fairprice/markets.hpp"
#include "fairprice/oracle.hpp"
#include "fairprice/simulator.hpp"

using namespace fairprice;

static void BM_GroupSubproblem(benchmark::State& state) {
  const auto lp = oracle::group_subproblem(sim::example1_market(), Group::two, 8.0 / 11, 9.0 / 638);
  for (auto _ : state) benchmark::DoNotOptimize(lp::lp_maximize(lp));
}
BENCHMARK(BM_GroupSubproblem);

static void BM_VertexEnumerate(benchmark::State& state) {
  const auto lp = oracle::group_subproblem(sim::example1_market(), Group::two, 8.0 / 11, 9.0 / 638);
  for (auto _ : state) benchmark::DoNotOptimize(lp::vertex_enumerate(lp));
}
BENCHMARK(BM_VertexEnumerate);

static void BM_FairOptimal(benchmark::State& state) {
  const auto market = sim::example1_market();
  oracle::OracleConfig cfg;
  cfg.grid_steps_vs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(oracle::solve_fair_optimal(market, cfg));
}
BENCHMARK(BM_FairOptimal)->Arg(400)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_MaxProbability(benchmark::State& state) {
  const auto market = sim::example1_market();
  oracle::EliminationLedger ledger;
  ledger.append({1, market.model, 0.02, 0.49});
  ledger.append({2, market.model, 0.01, 0.50});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        oracle::max_probability_policy(0, Group::two, ledger, nullptr, 0.01, market.grid, market.q, {400, 3, 1e-7, 4}));
  }
}
BENCHMARK(BM_MaxProbability)->Unit(benchmark::kMillisecond);

static void BM_FpaEpisode(benchmark::State& state) {
  const auto market = sim::example1_market();
  const auto horizon = state.range(0);
  for (auto _ : state) {
    fpa::FpaConfig cfg(market.grid);
    cfg.horizon = horizon;
    cfg.q = market.q;
    cfg.seed = 1;
    sim::FpaRunner agent(cfg);
    sim::SimConfig sim(market, horizon, 1);
    sim.record_every = 0;
    benchmark::DoNotOptimize(sim::run_episode(agent, sim, 74.0 / 145));
  }
  state.SetItemsProcessed(state.iterations() * horizon);
}
BENCHMARK(BM_FpaEpisode)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_StaticEpisode(benchmark::State& state) {
  const auto market = sim::example1_market();
  for (auto _ : state) {
    sim::StaticPolicyAgent agent("top", PolicyPair::fixed_price(3, 2), 1);
    sim::SimConfig sim(market, 100000, 1);
    sim.record_every = 0;
    benchmark::DoNotOptimize(sim::run_episode(agent, sim, 74.0 / 145));
  }
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_StaticEpisode)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
