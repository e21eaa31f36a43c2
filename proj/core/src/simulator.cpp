#include "fairprice/simulator.hpp"

#include "fairprice/errors.hpp"
#include "fairprice/rng.hpp"

namespace fairprice::sim {

RunTrace run_episode(Agent& agent, const SimConfig& sim, std::optional<double> oracle_revenue,
                     const oracle::OracleConfig& cfg) {
  if (sim.horizon < 1) throw DomainError("horizon must be at least 1");
  if (sim.record_every < 0) throw DomainError("record_every must be nonnegative");
  const MarketConfig& market = sim.market;
  RunTrace trace;
  trace.oracle_revenue = oracle_revenue ? *oracle_revenue : oracle::solve_fair_optimal(market, cfg).revenue;
  if (sim.record_every > 0) trace.records.reserve(static_cast<std::size_t>(sim.horizon / sim.record_every + 1));

  Rng env(sim.seed, Stream::environment);
  std::optional<PolicyPair> cached;
  double regret = 0.0, s = 0.0, u = 0.0;

  for (std::int64_t t = 1; t <= sim.horizon; ++t) {
    const PolicyPair& policy = agent.current_policy();
    if (!cached || !(*cached == policy)) {
      cached = policy;
      regret = per_round_regret(policy, market, trace.oracle_revenue);
      u = procedural_unfairness(policy, market.grid);
      s = substantive_unfairness(policy, market);
    }
    const int epoch = agent.epoch();
    const Group group = env.uniform() < market.q ? Group::one : Group::two;
    const std::size_t i = agent.propose(group);
    if (i >= market.grid.size()) throw DimensionError("agent proposed an index outside the grid");
    const bool accepted = env.uniform() < market.model.accept(group, i);
    agent.observe(group, i, accepted);

    const double reward = accepted ? market.grid[i] : 0.0;
    trace.cumulative_reward += reward;
    trace.cumulative_regret += regret;
    trace.cumulative_S += s;
    trace.cumulative_U += u;
    if (sim.record_every > 0 && (t - 1) % sim.record_every == 0) {
      trace.records.push_back(RoundRecord{t, group, i, accepted, reward, regret, s, u, epoch});
    }
  }
  trace.rounds = sim.horizon;
  trace.agent_meta = agent.meta();
  return trace;
}

}  // namespace fairprice::sim
