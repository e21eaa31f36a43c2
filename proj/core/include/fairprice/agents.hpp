#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "fairprice/fpa.hpp"
#include "fairprice/oracle.hpp"
#include "fairprice/pricing.hpp"
#include "fairprice/rng.hpp"

namespace fairprice::sim {

/// Anything that can price a stream of customers. Calls strictly alternate
/// propose -> observe; `current_policy` is the policy that will generate the
/// next proposal.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual std::string name() const = 0;
  virtual std::size_t propose(Group group) = 0;
  virtual void observe(Group group, std::size_t price_index, bool accepted) = 0;
  virtual const PolicyPair& current_policy() const = 0;
  virtual int epoch() const { return 0; }
  /// Snapshot of internal state for run summaries.
  virtual nlohmann::json meta() const { return nlohmann::json::object(); }
};

enum class AgentKind { fpa, best_fixed_oracle, ucb_fixed, groupwise_unconstrained_oracle, fair_oracle };

const char* to_string(AgentKind kind) noexcept;
AgentKind parse_agent_kind(const std::string& text);

/// Plays a fixed randomized policy forever.
class StaticPolicyAgent : public Agent {
 public:
  StaticPolicyAgent(std::string name, PolicyPair policy, std::uint64_t seed);

  std::string name() const override { return name_; }
  std::size_t propose(Group group) override;
  void observe(Group group, std::size_t price_index, bool accepted) override;
  const PolicyPair& current_policy() const override { return policy_; }
  nlohmann::json meta() const override;

 private:
  std::string name_;
  PolicyPair policy_;
  Rng rng_;
  std::optional<std::pair<Group, std::size_t>> pending_;
};

/// UCB1 over the d prices, offering the same price to both groups. Rewards
/// are v_i * 1{accepted} in [0, 1].
class UcbFixedAgent : public Agent {
 public:
  explicit UcbFixedAgent(PriceGrid grid);

  std::string name() const override { return "ucb_fixed"; }
  std::size_t propose(Group group) override;
  void observe(Group group, std::size_t price_index, bool accepted) override;
  const PolicyPair& current_policy() const override { return policy_; }
  nlohmann::json meta() const override;

 private:
  void choose();

  PriceGrid grid_;
  std::vector<std::int64_t> pulls_;
  std::vector<double> reward_sum_;
  std::int64_t rounds_ = 0;
  std::size_t arm_ = 0;
  PolicyPair policy_;
  std::optional<std::size_t> pending_;
};

/// Adapter exposing the FPA state machine through the Agent interface.
class FpaRunner : public Agent {
 public:
  explicit FpaRunner(fpa::FpaConfig cfg) : agent_(std::move(cfg)) {}

  std::string name() const override { return "fpa"; }
  std::size_t propose(Group group) override { return agent_.propose_price(group); }
  void observe(Group group, std::size_t price_index, bool accepted) override {
    agent_.observe(group, price_index, accepted);
  }
  const PolicyPair& current_policy() const override { return agent_.current_policy(); }
  int epoch() const override { return agent_.epoch(); }
  nlohmann::json meta() const override;

  const fpa::FpaAgent& state() const noexcept { return agent_; }

 private:
  fpa::FpaAgent agent_;
};

/// Baselines. Oracle variants see the true market; ucb_fixed uses only its grid.
std::unique_ptr<Agent> make_baseline(AgentKind kind, const MarketConfig& market, std::uint64_t seed,
                                     const oracle::OracleConfig& cfg = {});

nlohmann::json to_json(const PolicyPair& policy);
nlohmann::json to_json(const AcceptanceModel& model);

}  // namespace fairprice::sim
