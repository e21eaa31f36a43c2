#include "fairprice/agents.hpp"

#include <cmath>
#include <limits>

#include "fairprice/errors.hpp"

namespace fairprice::sim {

namespace {

std::size_t sample(const GroupDistribution& dist, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] <= 0.0) continue;
    acc += dist[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

nlohmann::json weights(std::span<const double> w) { return nlohmann::json(std::vector<double>(w.begin(), w.end())); }

}  // namespace

const char* to_string(AgentKind kind) noexcept {
  switch (kind) {
    case AgentKind::fpa: return "fpa";
    case AgentKind::best_fixed_oracle: return "best_fixed_oracle";
    case AgentKind::ucb_fixed: return "ucb_fixed";
    case AgentKind::groupwise_unconstrained_oracle: return "groupwise_unconstrained_oracle";
    case AgentKind::fair_oracle: return "fair_oracle";
  }
  return "unknown";
}

AgentKind parse_agent_kind(const std::string& text) {
  for (AgentKind k : {AgentKind::fpa, AgentKind::best_fixed_oracle, AgentKind::ucb_fixed,
                      AgentKind::groupwise_unconstrained_oracle, AgentKind::fair_oracle}) {
    if (text == to_string(k)) return k;
  }
  throw DomainError("unknown agent kind '" + text + "'");
}

nlohmann::json to_json(const PolicyPair& policy) {
  return {{"group1", weights(policy.group1().weights())}, {"group2", weights(policy.group2().weights())}};
}

nlohmann::json to_json(const AcceptanceModel& model) {
  return {{"group1", weights(model.curve(Group::one))}, {"group2", weights(model.curve(Group::two))}};
}

StaticPolicyAgent::StaticPolicyAgent(std::string name, PolicyPair policy, std::uint64_t seed)
    : name_(std::move(name)), policy_(std::move(policy)), rng_(seed, Stream::agent) {}

std::size_t StaticPolicyAgent::propose(Group group) {
  if (pending_) throw ProtocolError("propose called twice without observe");
  const std::size_t i = sample(policy_[group], rng_);
  pending_ = std::make_pair(group, i);
  return i;
}

void StaticPolicyAgent::observe(Group group, std::size_t price_index, bool) {
  if (!pending_ || pending_->first != group || pending_->second != price_index) {
    throw ProtocolError("observe does not match the preceding proposal");
  }
  pending_.reset();
}

nlohmann::json StaticPolicyAgent::meta() const { return {{"policy", to_json(policy_)}}; }

UcbFixedAgent::UcbFixedAgent(PriceGrid grid)
    : grid_(std::move(grid)),
      pulls_(grid_.size(), 0),
      reward_sum_(grid_.size(), 0.0),
      policy_(PolicyPair::fixed_price(grid_.size(), 0)) {}

void UcbFixedAgent::choose() {
  for (std::size_t i = 0; i < pulls_.size(); ++i) {
    if (pulls_[i] == 0) {
      arm_ = i;
      policy_ = PolicyPair::fixed_price(grid_.size(), arm_);
      return;
    }
  }
  const double log_t = std::log(static_cast<double>(rounds_));
  double best = -std::numeric_limits<double>::infinity();
  std::size_t pick = 0;
  for (std::size_t i = 0; i < pulls_.size(); ++i) {
    const double n = static_cast<double>(pulls_[i]);
    const double index = reward_sum_[i] / n + std::sqrt(2.0 * log_t / n);
    if (index > best) {
      best = index;
      pick = i;
    }
  }
  if (pick != arm_) {
    arm_ = pick;
    policy_ = PolicyPair::fixed_price(grid_.size(), arm_);
  }
}

std::size_t UcbFixedAgent::propose(Group) {
  if (pending_) throw ProtocolError("propose called twice without observe");
  pending_ = arm_;
  return arm_;
}

void UcbFixedAgent::observe(Group, std::size_t price_index, bool accepted) {
  if (!pending_ || *pending_ != price_index) throw ProtocolError("observe does not match the preceding proposal");
  pending_.reset();
  ++rounds_;
  ++pulls_[price_index];
  if (accepted) reward_sum_[price_index] += grid_[price_index];
  choose();
}

nlohmann::json UcbFixedAgent::meta() const {
  nlohmann::json arms = nlohmann::json::array();
  for (std::size_t i = 0; i < pulls_.size(); ++i) {
    arms.push_back({{"price_index", i}, {"pulls", pulls_[i]},
                    {"mean_reward", pulls_[i] ? reward_sum_[i] / static_cast<double>(pulls_[i]) : 0.0}});
  }
  return {{"arms", arms}};
}

nlohmann::json FpaRunner::meta() const {
  const auto& a = agent_;
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& s : a.history()) {
    nlohmann::json e = {{"epoch", s.epoch},
                        {"tau", s.params.tau},
                        {"delta_r", s.params.delta_r},
                        {"delta_s", s.params.delta_s},
                        {"rounds", s.rounds},
                        {"active_size", s.active_size},
                        {"eliminated", s.eliminated},
                        {"ledger_infeasible", s.ledger_infeasible},
                        {"active_fallback", s.active_fallback},
                        {"truncated", s.truncated}};
    if (s.fhat) e["fhat"] = to_json(*s.fhat);
    if (s.empirical_optimum) {
      e["empirical_optimum"] = to_json(*s.empirical_optimum);
      e["empirical_revenue"] = s.empirical_revenue;
      e["revenue_floor"] = s.revenue_floor;
    }
    epochs.push_back(std::move(e));
  }
  const auto& cfg = a.config();
  return {{"mode", fpa::to_string(cfg.mode)},
          {"pre_epoch_rounds", a.pre_epoch_budget()},
          {"fmin_hat", a.fmin_hat()},
          {"epochs_executed", a.history().size()},
          {"ledger_size", a.ledger().size()},
          {"index_set_sizes", {a.index_sets()[0].size(), a.index_sets()[1].size()}},
          {"epochs", epochs},
          {"warnings", a.warnings()}};
}

std::unique_ptr<Agent> make_baseline(AgentKind kind, const MarketConfig& market, std::uint64_t seed,
                                     const oracle::OracleConfig& cfg) {
  const std::size_t d = market.grid.size();
  switch (kind) {
    case AgentKind::best_fixed_oracle:
      return std::make_unique<StaticPolicyAgent>("best_fixed_oracle",
                                                 PolicyPair::fixed_price(d, best_fixed_price(market)), seed);
    case AgentKind::ucb_fixed:
      return std::make_unique<UcbFixedAgent>(market.grid);
    case AgentKind::groupwise_unconstrained_oracle:
      return std::make_unique<StaticPolicyAgent>(
          "groupwise_unconstrained_oracle",
          PolicyPair(GroupDistribution::point_mass(d, best_group_price(market, Group::one)),
                     GroupDistribution::point_mass(d, best_group_price(market, Group::two))),
          seed);
    case AgentKind::fair_oracle:
      return std::make_unique<StaticPolicyAgent>("fair_oracle", oracle::solve_fair_optimal(market, cfg).policy,
                                                 seed);
    case AgentKind::fpa:
      break;
  }
  throw DomainError("make_baseline does not build FPA agents");
}

}  // namespace fairprice::sim
