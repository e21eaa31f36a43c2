#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairprice/agents.hpp"
#include "fairprice/oracle.hpp"
#include "fairprice/pricing.hpp"

namespace fairprice::sim {

struct SimConfig {
  SimConfig(MarketConfig market_in, std::int64_t horizon_in, std::uint64_t seed_in)
      : market(std::move(market_in)), horizon(horizon_in), seed(seed_in) {}

  MarketConfig market;
  std::int64_t horizon = 1;
  std::uint64_t seed = 0;
  /// Keep every n-th round in the trace; 0 keeps none (cumulative metrics
  /// are always exact).
  std::int64_t record_every = 1;
};

struct RoundRecord {
  std::int64_t t = 0;
  Group group = Group::one;
  std::size_t price_index = 0;
  bool accepted = false;
  double reward = 0.0;
  double inst_regret = 0.0;
  double inst_S = 0.0;
  double inst_U = 0.0;
  int epoch = 0;
};

struct RunTrace {
  std::vector<RoundRecord> records;
  std::int64_t rounds = 0;
  double cumulative_reward = 0.0;
  double cumulative_regret = 0.0;
  double cumulative_S = 0.0;
  double cumulative_U = 0.0;
  double oracle_revenue = 0.0;
  nlohmann::json agent_meta;
};

/// Runs T rounds. Instantaneous regret/U/S are evaluated in expectation for
/// the policy in force against the true market. `oracle_revenue` defaults to
/// solve_fair_optimal(market).revenue.
RunTrace run_episode(Agent& agent, const SimConfig& sim, std::optional<double> oracle_revenue = std::nullopt,
                     const oracle::OracleConfig& cfg = {});

}  // namespace fairprice::sim
