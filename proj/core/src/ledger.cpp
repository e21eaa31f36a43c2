#include "fairprice/ledger.hpp"

#include <string>

#include "fairprice/errors.hpp"

namespace fairprice::oracle {

void EliminationLedger::append(LedgerEntry entry) {
  if (!entries_.empty() && entry.epoch_index <= entries_.back().epoch_index) {
    throw DomainError("ledger epochs must be strictly increasing");
  }
  if (!(entry.delta_s > 0.0)) {
    throw DomainError("ledger delta_s must be positive");
  }
  if (!(entry.revenue_floor >= -1.0 && entry.revenue_floor <= 1.0)) {
    throw DomainError("ledger revenue floor outside [-1, 1]: " + std::to_string(entry.revenue_floor));
  }
  entries_.push_back(std::move(entry));
}

bool satisfies(const PolicyPair& policy, const LedgerEntry& entry, const PriceGrid& grid, double q) {
  const MarketConfig estimated(grid, entry.fhat, q);
  if (expected_revenue(policy, estimated) < entry.revenue_floor - kMembershipSlack) return false;
  return substantive_unfairness(policy, estimated) <= entry.delta_s + kMembershipSlack;
}

bool member(const PolicyPair& policy, const EliminationLedger& ledger, const PriceGrid& grid,
            double q) {
  if (procedural_unfairness(policy, grid) > kProceduralTolerance) {
    throw DomainError("candidate policies must be procedurally fair");
  }
  for (const auto& entry : ledger.entries()) {
    if (!satisfies(policy, entry, grid, q)) return false;
  }
  return true;
}

}  // namespace fairprice::oracle
