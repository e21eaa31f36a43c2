#pragma once

#include <vector>

#include "fairprice/pricing.hpp"

namespace fairprice::oracle {

/// One epoch's elimination constraint: under the estimated demand `fhat`,
/// surviving policies have S <= delta_s and R >= revenue_floor.
struct LedgerEntry {
  int epoch_index = 0;
  AcceptanceModel fhat;
  double delta_s = 0.0;
  double revenue_floor = 0.0;
};

/// Accumulated elimination constraints; the candidate set Pi_k is the set of
/// procedurally fair policies satisfying every entry. Empty means Pi_1 = Pi.
class EliminationLedger {
 public:
  EliminationLedger() = default;

  /// Throws DomainError if the epoch index does not increase, delta_s <= 0,
  /// or the floor lies outside [-1, 1].
  void append(LedgerEntry entry);

  const std::vector<LedgerEntry>& entries() const noexcept { return entries_; }
  const LedgerEntry& back() const { return entries_.back(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::vector<LedgerEntry> entries_;
};

inline constexpr double kProceduralTolerance = 1e-9;
inline constexpr double kMembershipSlack = 1e-9;

/// True iff `policy` survives every ledger entry. Throws DomainError when the
/// policy is not procedurally fair (U > 1e-9): such policies are never in Pi.
bool member(const PolicyPair& policy, const EliminationLedger& ledger, const PriceGrid& grid,
            double q);

/// Same test against a single entry.
bool satisfies(const PolicyPair& policy, const LedgerEntry& entry, const PriceGrid& grid, double q);

}  // namespace fairprice::oracle
