#include <cmath>

#include <gtest/gtest.h>

#include "fairprice/errors.hpp"
#include "fairprice/fpa.hpp"
#include "fairprice/markets.hpp"
#include "fairprice/oracle.hpp"

using namespace fairprice;
using namespace fairprice::fpa;

namespace {

FpaConfig example_config(std::int64_t horizon, std::uint64_t seed = 1) {
  const auto m = sim::example1_market();
  FpaConfig cfg(m.grid);
  cfg.horizon = horizon;
  cfg.q = m.q;
  cfg.seed = seed;
  return cfg;
}

// Drives the agent against a market with its own arrival stream.
void play(FpaAgent& agent, const MarketConfig& market, std::int64_t rounds, Rng& rng) {
  for (std::int64_t t = 0; t < rounds && !agent.done(); ++t) {
    const Group g = rng.bernoulli(market.q) ? Group::one : Group::two;
    const std::size_t i = agent.propose_price(g);
    agent.observe(g, i, rng.bernoulli(market.model.accept(g, i)));
  }
}

// Feeds the pre-epoch with prescribed acceptance counts.
void feed_pre_epoch(FpaAgent& agent, int n1, int a1, int n2, int a2) {
  const std::size_t top = agent.config().grid.size() - 1;
  for (int k = 0; k < n1; ++k) {
    ASSERT_EQ(agent.propose_price(Group::one), top);
    agent.observe(Group::one, top, k < a1);
  }
  for (int k = 0; k < n2; ++k) {
    ASSERT_EQ(agent.propose_price(Group::two), top);
    agent.observe(Group::two, top, k < a2);
  }
}

}  // namespace

TEST(Constants, Formulas) {
  EXPECT_DOUBLE_EQ(group_share_constant(0.3), 10.0);
  EXPECT_NEAR(fmin_constant(0.25), std::sqrt(12.0), 1e-12);
  EXPECT_DOUBLE_EQ(fmin_constant(0.5), 3.0);
  EXPECT_EQ(pre_epoch_rounds(10000, 0.05), 107);
  EXPECT_EQ(pre_epoch_rounds(10000, 0.05), static_cast<std::int64_t>(std::ceil(2 * std::log(1e4) * std::log(320.0))));
}

TEST(EpochParams, PaperModeExceedsHorizon) {
  auto cfg = example_config(1000000);
  cfg.mode = ConstantsMode::paper;
  const auto p = epoch_params(1, cfg, 0.25);
  const double ell = std::log(16.0 * 3 * std::log(1e6) / 0.05);
  const double tau = (280.0 / 3) * 3 * 1000 * ell * 2;
  EXPECT_NEAR(static_cast<double>(p.tau), std::ceil(tau), 1.0);
  EXPECT_GT(p.tau, cfg.horizon);
  const double shrink = ell * std::pow(3.0, 1.5) * std::sqrt(10.0 / tau);
  EXPECT_NEAR(p.delta_r, 4 * std::sqrt(12.0) * shrink, 1e-12);
  EXPECT_NEAR(p.delta_s, 32 * std::sqrt(12.0) / 0.0625 * shrink, 1e-9);
}

TEST(EpochParams, ScaledModeDoublesAndShrinks) {
  const auto cfg = example_config(1000000);
  const auto p1 = epoch_params(1, cfg, 0.25);
  const auto p2 = epoch_params(2, cfg, 0.25);
  EXPECT_EQ(p1.tau, 4000);
  EXPECT_EQ(p2.tau, 8000);
  EXPECT_NEAR(p1.delta_r / p2.delta_r, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(p1.delta_s / p2.delta_s, std::sqrt(2.0), 1e-12);
  EXPECT_THROW(epoch_params(0, cfg, 0.25), DomainError);
  EXPECT_THROW(epoch_params(1, cfg, 0.0), DomainError);
}

TEST(FpaConfig, Validation) {
  auto cfg = example_config(100);
  cfg.error_prob = 1.0;
  EXPECT_THROW(FpaAgent{cfg}, DomainError);
  cfg = example_config(0);
  EXPECT_THROW(FpaAgent{cfg}, DomainError);
  cfg = example_config(100);
  cfg.relaxation_constant = 0.0;
  EXPECT_THROW(FpaAgent{cfg}, DomainError);
  EXPECT_EQ(parse_mode("paper"), ConstantsMode::paper);
  EXPECT_THROW(parse_mode("fast"), DomainError);
}

TEST(FpaConfig, LargeGridWarning) {
  FpaConfig cfg(PriceGrid({0.1, 0.2, 0.3, 0.4, 0.5, 0.6}));
  cfg.horizon = 100;
  EXPECT_EQ(cfg.warnings().size(), 1u);
  cfg.horizon = 1000;
  EXPECT_TRUE(cfg.warnings().empty());
}

TEST(FpaAgent, StartsAtTopPrice) {
  FpaAgent agent(example_config(10000));
  EXPECT_EQ(agent.stage(), Stage::pre_epoch);
  EXPECT_EQ(agent.pre_epoch_budget(), 107);
  EXPECT_EQ(agent.current_policy(), PolicyPair::fixed_price(3, 2));
  EXPECT_EQ(agent.propose_price(Group::two), 2u);
}

TEST(FpaAgent, SingleRoundHorizon) {
  FpaAgent agent(example_config(1));
  EXPECT_EQ(agent.pre_epoch_budget(), 1);
  EXPECT_EQ(agent.propose_price(Group::one), 2u);
  agent.observe(Group::one, 2, false);
  EXPECT_TRUE(agent.done());
  EXPECT_THROW(agent.propose_price(Group::one), ExhaustedError);
}

TEST(FpaAgent, ProtocolIsEnforced) {
  FpaAgent agent(example_config(1000));
  EXPECT_THROW(agent.observe(Group::one, 2, true), ProtocolError);
  agent.propose_price(Group::one);
  EXPECT_THROW(agent.propose_price(Group::one), ProtocolError);
  EXPECT_THROW(agent.observe(Group::two, 2, true), ProtocolError);
  EXPECT_NO_THROW(agent.observe(Group::one, 2, true));
}

TEST(FpaAgent, FminEstimateFromPreEpoch) {
  FpaAgent agent(example_config(10000));
  feed_pre_epoch(agent, 80, 60, 27, 20);
  ASSERT_EQ(agent.stage(), Stage::in_epoch);
  EXPECT_NEAR(agent.fmin_hat(), std::min(60.0 / 80, 20.0 / 27) / 2, 1e-15);
  EXPECT_NEAR(agent.fmin_hat(), 0.37037, 1e-5);
}

TEST(FpaAgent, DegenerateDemand) {
  FpaAgent none(example_config(10000));
  EXPECT_THROW(feed_pre_epoch(none, 80, 0, 27, 0), DegenerateDemandError);
  FpaAgent one_group(example_config(10000));
  EXPECT_THROW(feed_pre_epoch(one_group, 107, 50, 0, 0), DegenerateDemandError);
}

TEST(FpaAgent, FirstEpochPlaysEveryFixedPrice) {
  FpaAgent agent(example_config(10000));
  feed_pre_epoch(agent, 80, 60, 27, 20);
  ASSERT_EQ(agent.history().size(), 1u);
  const auto& active = agent.history()[0].active;
  ASSERT_EQ(active.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(std::find(active.begin(), active.end(), PolicyPair::fixed_price(3, i)) != active.end());
  }
}

TEST(FpaAgent, BatchRotationAtEqualShares) {
  const PriceGrid grid({0.3, 0.5, 0.7, 0.9});
  FpaConfig cfg(grid);
  cfg.horizon = 10000;  // tau_1 = 2 * 100 * 2 = 400 with four fixed prices
  cfg.q = 0.5;
  FpaAgent agent(cfg);
  const int pre = static_cast<int>(agent.pre_epoch_budget());
  feed_pre_epoch(agent, pre / 2, pre / 4, pre - pre / 2, pre / 4);
  ASSERT_EQ(agent.active_set().size(), 4u);
  EXPECT_EQ(agent.batch_lengths(), (std::vector<std::int64_t>{100, 100, 100, 100}));
  std::vector<int> switches;
  PolicyPair last = agent.current_policy();
  for (int t = 1; t <= 400; ++t) {
    const std::size_t i = agent.propose_price(Group::one);
    agent.observe(Group::one, i, true);
    if (t < 400 && !(agent.current_policy() == last)) {
      switches.push_back(t);
      last = agent.current_policy();
    }
  }
  EXPECT_EQ(switches, (std::vector<int>{100, 200, 300}));
  EXPECT_EQ(agent.epoch(), 2);
}

TEST(FpaAgent, SamplesFromBatchPolicy) {
  const auto market = sim::example1_market();
  FpaAgent agent(example_config(1000000, 3));
  Rng env(3, Stream::environment);
  play(agent, market, agent.pre_epoch_budget(), env);
  // Find a batch with a genuinely mixed Group-2 policy, then sample it.
  for (int guard = 0; guard < 200000 && !agent.done(); ++guard) {
    const auto& w = agent.current_policy().group2().weights();
    const bool mixed = std::count_if(w.begin(), w.end(), [](double x) { return x > 0.05; }) >= 2;
    if (mixed && agent.rounds_left_in_batch() >= 20000) break;
    play(agent, market, 1, env);
  }
  ASSERT_FALSE(agent.done());
  const auto& w = agent.current_policy().group2().weights();
  ASSERT_GE(agent.rounds_left_in_batch(), 20000);
  const int n = 20000;
  std::vector<int> counts(3, 0);
  for (int t = 0; t < n; ++t) {
    const std::size_t i = agent.propose_price(Group::two);
    agent.observe(Group::two, i, false);
    ++counts[i];
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const double sigma = std::sqrt(n * w[i] * (1 - w[i]));
    EXPECT_NEAR(counts[i], n * w[i], 4 * sigma + 1e-9) << "price " << i;
  }
}

TEST(FpaAgent, EveryPolicyIsProcedurallyFair) {
  const auto market = sim::example1_market();
  FpaAgent agent(example_config(200000, 5));
  Rng env(5, Stream::environment);
  play(agent, market, 200000, env);
  ASSERT_TRUE(agent.done());
  EXPECT_GE(agent.history().size(), 3u);
  for (const auto& epoch : agent.history()) {
    for (const auto& p : epoch.active) EXPECT_LE(procedural_unfairness(p, market.grid), 1e-12);
  }
  EXPECT_TRUE(agent.history().back().truncated);
  EXPECT_FALSE(agent.history().back().eliminated);
  EXPECT_EQ(agent.ledger().size(), agent.history().size() - 1);
}

TEST(FpaAgent, EpochLengthsFollowSchedule) {
  const auto market = sim::example1_market();
  FpaAgent agent(example_config(100000, 2));
  Rng env(2, Stream::environment);
  play(agent, market, 100000, env);
  std::int64_t total = agent.pre_epoch_budget();
  const auto& h = agent.history();
  for (std::size_t k = 0; k + 1 < h.size(); ++k) {
    EXPECT_EQ(h[k].rounds, h[k].params.tau);
    total += h[k].rounds;
  }
  total += h.back().rounds;
  EXPECT_EQ(total, 100000);
  EXPECT_LE(h.back().rounds, h.back().params.tau);
}

TEST(Estimates, UnseenPricesFallBackToFloor) {
  Counters c(3);
  c.proposed[0] = {100, 0, 50};
  c.accepted[0] = {60, 0, 0};
  c.proposed[1] = {10, 10, 10};
  c.accepted[1] = {8, 8, 5};
  IndexSets tracked{std::vector<std::size_t>{0, 1, 2}, std::vector<std::size_t>{0, 2}};
  const auto f = estimate_acceptance(c, tracked, 0.2);
  EXPECT_DOUBLE_EQ(f.accept(Group::one, 0), 0.6);
  EXPECT_DOUBLE_EQ(f.accept(Group::one, 1), 0.2);  // M = 0
  EXPECT_DOUBLE_EQ(f.accept(Group::one, 2), 0.2);  // N / M = 0 is floored
  EXPECT_DOUBLE_EQ(f.accept(Group::two, 1), 0.2);  // not tracked
  EXPECT_DOUBLE_EQ(f.accept(Group::two, 2), 0.5);
}

TEST(Estimates, ExactCountsRecoverTheOptimum) {
  const auto market = sim::example1_market();
  Counters c(3);
  const std::int64_t m = 1000000;
  for (std::size_t e = 0; e < 2; ++e) {
    const Group g = e == 0 ? Group::one : Group::two;
    for (std::size_t i = 0; i < 3; ++i) {
      c.proposed[e][i] = m;
      c.accepted[e][i] = std::llround(market.model.accept(g, i) * m);
    }
  }
  IndexSets all{std::vector<std::size_t>{0, 1, 2}, std::vector<std::size_t>{0, 1, 2}};
  const auto fhat = estimate_acceptance(c, all, 0.25);
  auto cfg = example_config(1000000);
  const auto p = epoch_params(3, cfg, 0.25);
  const auto best = oracle::empirical_optimizer(fhat, market.q, market.grid, p.delta_s, oracle::EliminationLedger{});
  ASSERT_TRUE(best.has_value());
  const double slack = p.delta_r + cfg.relaxation_constant * p.delta_s;
  EXPECT_NEAR(best->revenue, 74.0 / 145, slack);
  EXPECT_GE(best->revenue, 74.0 / 145 - 1e-3);
}

TEST(ActiveSet, DropsImprobableIndices) {
  const auto market = sim::example1_market();
  oracle::EliminationLedger ledger;
  // Under the true model only price 3 comes within 0.005 of the fixed-price optimum.
  ledger.append({1, market.model, 1e-4, 0.505});
  IndexSets all{std::vector<std::size_t>{0, 1, 2}, std::vector<std::size_t>{0, 1, 2}};
  const auto r = build_active_set(ledger, all, 1000000, market.grid, market.q, {400, 3, 1e-7, 4});
  EXPECT_FALSE(r.policies.empty());
  for (const auto& p : r.policies) EXPECT_TRUE(oracle::member(p, ledger, market.grid, market.q));
  for (std::size_t e = 0; e < 2; ++e) EXPECT_LE(r.tracked[e].size(), 3u);
  for (std::size_t a = 0; a < r.policies.size(); ++a) {
    for (std::size_t b = a + 1; b < r.policies.size(); ++b) {
      EXPECT_GT(r.policies[a].distance_linf(r.policies[b]), 1e-6);
    }
  }
}
