#include "fairprice/fpa.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fairprice/errors.hpp"

namespace fairprice::fpa {

namespace {

constexpr double kDuplicateTolerance = 1e-6;

// log(16 d log T / epsilon), the common logarithmic factor of the radii.
double log_factor(const FpaConfig& cfg) {
  const double d = static_cast<double>(cfg.grid.size());
  const double log_t = std::log(static_cast<double>(std::max<std::int64_t>(cfg.horizon, 3)));
  return std::log(16.0 * d * log_t / cfg.error_prob);
}

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

}  // namespace

const char* to_string(ConstantsMode mode) noexcept {
  return mode == ConstantsMode::paper ? "paper" : "scaled";
}

ConstantsMode parse_mode(const std::string& text) {
  if (text == "paper") return ConstantsMode::paper;
  if (text == "scaled") return ConstantsMode::scaled;
  throw DomainError("unknown constants mode '" + text + "' (expected paper or scaled)");
}

void FpaConfig::validate() const {
  if (horizon < 1) throw DomainError("horizon must be at least 1");
  if (!(error_prob > 0.0 && error_prob < 1.0)) throw DomainError("error_prob must lie in (0, 1)");
  if (!(relaxation_constant > 0.0)) throw DomainError("relaxation constant L must be positive");
  if (!(q > 0.0 && q < 1.0)) throw DomainError("q must lie in (0, 1)");
  if (!(scale_factor > 0.0)) throw DomainError("scale factor must be positive");
  if (!(reward_radius_scale > 0.0) || !(fairness_radius_scale > 0.0)) {
    throw DomainError("radius scales must be positive");
  }
}

std::vector<std::string> FpaConfig::warnings() const {
  std::vector<std::string> out;
  const double d = static_cast<double>(grid.size());
  if (d > std::cbrt(static_cast<double>(horizon))) {
    std::ostringstream msg;
    msg << "grid size " << grid.size() << " exceeds T^(1/3) = " << std::cbrt(static_cast<double>(horizon));
    out.push_back(msg.str());
  }
  return out;
}

double group_share_constant(double q) { return 3.0 * std::max(1.0 / q, 1.0 / (1.0 - q)); }

double fmin_constant(double fmin_hat) { return std::max(3.0, std::sqrt(3.0 / fmin_hat)); }

std::int64_t pre_epoch_rounds(std::int64_t horizon, double error_prob) {
  const double raw = 2.0 * std::log(static_cast<double>(horizon)) * std::log(16.0 / error_prob);
  return static_cast<std::int64_t>(std::ceil(raw));
}

EpochParams epoch_params(int k, const FpaConfig& cfg, double fmin_hat) {
  if (k < 1) throw DomainError("epoch index must be at least 1");
  if (!(fmin_hat > 0.0)) throw DomainError("fmin_hat must be positive");
  const double cq = group_share_constant(cfg.q);
  const double ct = fmin_constant(fmin_hat);
  const double d = static_cast<double>(cfg.grid.size());
  const double ell = log_factor(cfg);
  const double root_t = std::sqrt(static_cast<double>(cfg.horizon));
  const double doubling = std::ldexp(1.0, k);

  EpochParams p;
  double tau = 0.0;
  if (cfg.mode == ConstantsMode::paper) {
    tau = (28.0 * cq / 3.0) * d * root_t * ell * doubling;
    const double shrink = ell * std::pow(d, 1.5) * std::sqrt(cq / tau);
    p.delta_r = 4.0 * ct * shrink;
    p.delta_s = (32.0 * ct / (fmin_hat * fmin_hat)) * shrink;
  } else {
    tau = cfg.scale_factor * root_t * doubling;
    const double shrink = std::sqrt(cq * ell / tau);
    p.delta_r = cfg.reward_radius_scale * ct * shrink;
    p.delta_s = cfg.fairness_radius_scale * ct * shrink;
  }
  p.tau = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(tau)));
  return p;
}

std::int64_t Counters::total_proposed(Group g) const {
  const auto& row = proposed[group_index(g)];
  std::int64_t total = 0;
  for (auto m : row) total += m;
  return total;
}

AcceptanceModel estimate_acceptance(const Counters& counters, const IndexSets& tracked, double fmin_hat) {
  const std::size_t d = counters.proposed[0].size();
  std::array<std::vector<double>, 2> curves{std::vector<double>(d, fmin_hat),
                                            std::vector<double>(d, fmin_hat)};
  for (std::size_t e = 0; e < 2; ++e) {
    for (std::size_t i : tracked[e]) {
      const auto m = counters.proposed[e][i];
      if (m <= 0) continue;
      const double rate = static_cast<double>(counters.accepted[e][i]) / static_cast<double>(m);
      curves[e][i] = std::max(rate, fmin_hat);
    }
  }
  return AcceptanceModel(std::move(curves[0]), std::move(curves[1]), std::min(fmin_hat, 1.0),
                         AcceptanceModel::Check::estimate);
}

ActiveSetResult build_active_set(const oracle::EliminationLedger& ledger, const IndexSets& tracked,
                                 std::int64_t horizon, const PriceGrid& grid, double q,
                                 const oracle::OracleConfig& cfg) {
  ActiveSetResult out;
  const double threshold = 1.0 / std::sqrt(static_cast<double>(horizon));
  for (std::size_t e = 0; e < 2; ++e) {
    const Group g = e == 0 ? Group::one : Group::two;
    for (std::size_t i : tracked[e]) {
      auto best = oracle::max_probability_policy(i, g, ledger, nullptr, 0.0, grid, q, cfg);
      if (!best) {
        // Search failure is not evidence against the price; keep tracking it.
        out.search_failed = true;
        out.tracked[e].push_back(i);
        continue;
      }
      if (best->achieved_prob < threshold) continue;
      out.tracked[e].push_back(i);
      const bool duplicate = std::any_of(out.policies.begin(), out.policies.end(), [&](const PolicyPair& p) {
        return p.distance_linf(best->policy) <= kDuplicateTolerance;
      });
      if (!duplicate) out.policies.push_back(std::move(best->policy));
    }
  }
  return out;
}

FpaAgent::FpaAgent(FpaConfig cfg)
    : cfg_(std::move(cfg)),
      rng_(cfg_.seed, Stream::agent),
      counters_(cfg_.grid.size()),
      top_price_(PolicyPair::fixed_price(cfg_.grid.size(), cfg_.grid.size() - 1)) {
  cfg_.validate();
  warnings_ = cfg_.warnings();
  const std::int64_t tau0 = pre_epoch_rounds(cfg_.horizon, cfg_.error_prob);
  pre_rounds_ = std::clamp<std::int64_t>(tau0, 1, cfg_.horizon);
  for (std::size_t e = 0; e < 2; ++e) {
    for (std::size_t i = 0; i < cfg_.grid.size(); ++i) tracked_[e].push_back(i);
  }
}

const PolicyPair& FpaAgent::current_policy() const {
  switch (stage_) {
    case Stage::pre_epoch:
      return top_price_;
    case Stage::in_epoch:
      return active_[batch_];
    case Stage::done:
      break;
  }
  throw ExhaustedError("agent has finished its horizon");
}

std::size_t FpaAgent::propose_price(Group group) {
  if (stage_ == Stage::done) throw ExhaustedError("agent has finished its horizon");
  if (pending_) throw ProtocolError("propose_price called twice without observe");
  std::size_t index = cfg_.grid.size() - 1;
  const std::size_t e = group_index(group);
  if (stage_ == Stage::pre_epoch) {
    ++pre_proposed_[e];
  } else {
    index = sample(active_[batch_][group], rng_);
    ++counters_.proposed[e][index];
  }
  pending_ = std::make_pair(group, index);
  return index;
}

void FpaAgent::observe(Group group, std::size_t price_index, bool accepted) {
  if (!pending_ || pending_->first != group || pending_->second != price_index) {
    throw ProtocolError("observe does not match the preceding proposal");
  }
  pending_.reset();
  const std::size_t e = group_index(group);
  ++played_;
  if (stage_ == Stage::pre_epoch) {
    if (accepted) ++pre_accepted_[e];
    if (played_ == pre_rounds_) finish_pre_epoch();
    return;
  }
  if (accepted) ++counters_.accepted[e][price_index];
  --batch_left_;
  if (played_ == cfg_.horizon) {
    finalize_epoch(true);
    stage_ = Stage::done;
    return;
  }
  if (batch_left_ == 0) advance_batch();
}

void FpaAgent::finish_pre_epoch() {
  if (played_ == cfg_.horizon) {
    stage_ = Stage::done;
    return;
  }
  double worst = 1.0;
  for (std::size_t e = 0; e < 2; ++e) {
    if (pre_proposed_[e] == 0) {
      throw DegenerateDemandError("no group-" + std::to_string(e + 1) + " arrivals before the first epoch");
    }
    worst = std::min(worst, static_cast<double>(pre_accepted_[e]) / static_cast<double>(pre_proposed_[e]));
  }
  fmin_hat_ = worst / 2.0;
  if (!(fmin_hat_ > 0.0)) {
    throw DegenerateDemandError("highest price never accepted before the first epoch");
  }
  start_epoch(1);
}

void FpaAgent::start_epoch(int k) {
  epoch_ = k;
  params_ = epoch_params(k, cfg_, fmin_hat_);
  epoch_rounds_ = std::min(params_.tau, cfg_.horizon - played_);

  ActiveSetResult built = build_active_set(ledger_, tracked_, cfg_.horizon, cfg_.grid, cfg_.q, cfg_.oracle);
  tracked_ = std::move(built.tracked);
  active_ = std::move(built.policies);
  EpochSummary summary;
  summary.epoch = k;
  summary.params = params_;
  summary.active_fallback = built.search_failed;
  if (active_.empty()) {
    summary.active_fallback = true;
    active_.push_back(incumbent_ ? *incumbent_ : top_price_);
  }
  summary.active_size = active_.size();
  summary.active = active_;
  history_.push_back(std::move(summary));

  const auto count = static_cast<std::int64_t>(active_.size());
  batch_lengths_.assign(active_.size(), epoch_rounds_ / count);
  batch_lengths_.back() += epoch_rounds_ % count;
  counters_ = Counters(cfg_.grid.size());
  batch_ = 0;
  batch_left_ = batch_lengths_[0];
  stage_ = Stage::in_epoch;
  if (batch_left_ == 0) advance_batch();
}

void FpaAgent::advance_batch() {
  while (batch_left_ == 0) {
    if (batch_ + 1 == batch_lengths_.size()) {
      finalize_epoch(false);
      return;
    }
    ++batch_;
    batch_left_ = batch_lengths_[batch_];
  }
}

void FpaAgent::finalize_epoch(bool truncated) {
  EpochSummary& summary = history_.back();
  summary.rounds = counters_.total_proposed(Group::one) + counters_.total_proposed(Group::two);
  summary.truncated = truncated;
  AcceptanceModel fhat = estimate_acceptance(counters_, tracked_, fmin_hat_);
  auto best = oracle::empirical_optimizer(fhat, cfg_.q, cfg_.grid, params_.delta_s, ledger_,
                                          cfg_.oracle, incumbent_ ? &*incumbent_ : nullptr);
  summary.fhat = fhat;
  if (!best) {
    summary.ledger_infeasible = true;
  } else {
    const MarketConfig estimated(cfg_.grid, fhat, cfg_.q);
    summary.empirical_optimum = best->policy;
    summary.empirical_revenue = expected_revenue(best->policy, estimated);
    summary.revenue_floor = std::clamp(
        summary.empirical_revenue - params_.delta_r - cfg_.relaxation_constant * params_.delta_s, -1.0, 1.0);
  }
  if (truncated) return;  // diagnostics only: no further epoch will use it

  if (best) {
    ledger_.append(oracle::LedgerEntry{epoch_, fhat, params_.delta_s, summary.revenue_floor});
    summary.eliminated = true;
    incumbent_ = std::move(best->policy);
  }
  start_epoch(epoch_ + 1);
}

}  // namespace fairprice::fpa
