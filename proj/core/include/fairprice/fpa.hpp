#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairprice/ledger.hpp"
#include "fairprice/oracle.hpp"
#include "fairprice/pricing.hpp"
#include "fairprice/rng.hpp"

namespace fairprice::fpa {

/// `paper` uses the theoretical epoch schedule and confidence radii verbatim;
/// `scaled` keeps their shape (doubling epochs, 1/sqrt(tau) radii) with
/// desk-scale constants.
enum class ConstantsMode { paper, scaled };

const char* to_string(ConstantsMode mode) noexcept;
ConstantsMode parse_mode(const std::string& text);

struct FpaConfig {
  explicit FpaConfig(PriceGrid grid_in) : grid(std::move(grid_in)) {}

  std::int64_t horizon = 10000;
  double error_prob = 0.05;           // epsilon in (0, 1)
  double relaxation_constant = 0.2;   // L > 0
  double q = 0.5;
  PriceGrid grid;
  ConstantsMode mode = ConstantsMode::scaled;
  double scale_factor = 2.0;          // c: tau_k = c sqrt(T) 2^k in scaled mode
  double reward_radius_scale = 0.05;  // scaled-mode multiplier of delta_r
  double fairness_radius_scale = 0.03;  // scaled-mode multiplier of delta_s
  std::uint64_t seed = 0;
  oracle::OracleConfig oracle{400, 3, 1e-7, 4};

  /// Throws DomainError on invalid fields.
  void validate() const;
  /// Non-fatal diagnostics (e.g. d above T^(1/3)).
  std::vector<std::string> warnings() const;
};

struct EpochParams {
  std::int64_t tau = 1;
  double delta_r = 0.0;
  double delta_s = 0.0;
};

/// 3 max(1/q, 1/(1-q)).
double group_share_constant(double q);
/// max(3, sqrt(3 / fmin_hat)).
double fmin_constant(double fmin_hat);
/// ceil(2 ln T ln(16 / epsilon)), natural logarithms.
std::int64_t pre_epoch_rounds(std::int64_t horizon, double error_prob);

/// Epoch length and radii for epoch k >= 1 (untruncated).
EpochParams epoch_params(int k, const FpaConfig& cfg, double fmin_hat);

/// M_e(i) proposals and N_e(i) acceptances, indexed [group][price].
struct Counters {
  std::array<std::vector<std::int64_t>, 2> proposed;
  std::array<std::vector<std::int64_t>, 2> accepted;

  explicit Counters(std::size_t d = 0)
      : proposed{std::vector<std::int64_t>(d, 0), std::vector<std::int64_t>(d, 0)},
        accepted{std::vector<std::int64_t>(d, 0), std::vector<std::int64_t>(d, 0)} {}

  std::int64_t total_proposed(Group g) const;
};

/// Price indices whose acceptance is still being estimated, per group.
using IndexSets = std::array<std::vector<std::size_t>, 2>;

/// F_e(i) = max(N/M, fmin_hat) on tracked indices with M > 0, else fmin_hat.
AcceptanceModel estimate_acceptance(const Counters& counters, const IndexSets& tracked, double fmin_hat);

struct ActiveSetResult {
  std::vector<PolicyPair> policies;
  IndexSets tracked;
  bool search_failed = false;
};

/// For each tracked (i, e): the policy in Pi_k maximizing pi^e(i). Indices whose
/// best probability is below 1/sqrt(T) are dropped; duplicates are merged.
ActiveSetResult build_active_set(const oracle::EliminationLedger& ledger, const IndexSets& tracked,
                                 std::int64_t horizon, const PriceGrid& grid, double q,
                                 const oracle::OracleConfig& cfg);

/// Per-epoch record kept for traces and diagnostics.
struct EpochSummary {
  int epoch = 0;
  EpochParams params;
  std::int64_t rounds = 0;  // actually executed (after truncation)
  std::size_t active_size = 0;
  std::vector<PolicyPair> active;
  std::optional<AcceptanceModel> fhat;
  std::optional<PolicyPair> empirical_optimum;
  double empirical_revenue = 0.0;
  double revenue_floor = 0.0;
  bool eliminated = false;          // a ledger entry was appended
  bool ledger_infeasible = false;   // empirical optimizer found no candidate
  bool active_fallback = false;     // max-probability search found nothing
  bool truncated = false;           // cut short by the horizon (diagnostic only)
};

enum class Stage { pre_epoch, in_epoch, done };

/// The online agent: a sequential propose/observe state machine.
class FpaAgent {
 public:
  explicit FpaAgent(FpaConfig cfg);

  /// Samples a price index for an arriving customer of `group`.
  std::size_t propose_price(Group group);
  /// Feedback for the immediately preceding proposal.
  void observe(Group group, std::size_t price_index, bool accepted);
  /// Policy in force for the next arrival.
  const PolicyPair& current_policy() const;

  Stage stage() const noexcept { return stage_; }
  bool done() const noexcept { return stage_ == Stage::done; }
  int epoch() const noexcept { return epoch_; }
  std::size_t batch_index() const noexcept { return batch_; }
  std::int64_t rounds_left_in_batch() const noexcept { return batch_left_; }
  std::int64_t rounds_played() const noexcept { return played_; }
  std::int64_t pre_epoch_budget() const noexcept { return pre_rounds_; }
  double fmin_hat() const noexcept { return fmin_hat_; }
  const std::vector<PolicyPair>& active_set() const noexcept { return active_; }
  const std::vector<std::int64_t>& batch_lengths() const noexcept { return batch_lengths_; }
  const IndexSets& index_sets() const noexcept { return tracked_; }
  const oracle::EliminationLedger& ledger() const noexcept { return ledger_; }
  const Counters& counters() const noexcept { return counters_; }
  const std::optional<PolicyPair>& incumbent() const noexcept { return incumbent_; }
  const std::vector<EpochSummary>& history() const noexcept { return history_; }
  const FpaConfig& config() const noexcept { return cfg_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  void finish_pre_epoch();
  void start_epoch(int k);
  void finalize_epoch(bool truncated);
  void advance_batch();

  FpaConfig cfg_;
  Rng rng_;
  Stage stage_ = Stage::pre_epoch;
  std::int64_t played_ = 0;
  std::int64_t pre_rounds_ = 0;
  std::array<std::int64_t, 2> pre_proposed_{0, 0};
  std::array<std::int64_t, 2> pre_accepted_{0, 0};
  double fmin_hat_ = 0.0;

  int epoch_ = 0;
  EpochParams params_;
  std::int64_t epoch_rounds_ = 0;
  std::vector<PolicyPair> active_;
  std::vector<std::int64_t> batch_lengths_;
  std::size_t batch_ = 0;
  std::int64_t batch_left_ = 0;
  IndexSets tracked_;
  oracle::EliminationLedger ledger_;
  Counters counters_;
  std::optional<PolicyPair> incumbent_;
  std::vector<EpochSummary> history_;
  std::vector<std::string> warnings_;

  PolicyPair top_price_;
  std::optional<std::pair<Group, std::size_t>> pending_;
};

}  // namespace fairprice::fpa
