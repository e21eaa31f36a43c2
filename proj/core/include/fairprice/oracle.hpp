#pragma once

#include <optional>

#include "fairprice/ledger.hpp"
#include "fairprice/linear.hpp"
#include "fairprice/pricing.hpp"

namespace fairprice::oracle {

/// Location of a fair policy in the (accepted mean, gap) parametrization:
/// Group 1's expected accepted price is `accepted_price`, both groups propose
/// at mean accepted_price + gap, and Group 2's accepted price is shifted by
/// `group_shift` (zero under exact substantive fairness).
struct ParamPoint {
  double accepted_price = 0.0;
  double gap = 0.0;
  double group_shift = 0.0;

  double proposed_price() const noexcept { return accepted_price + gap; }
};

/// Resolution of the accepted-price scan. Each refinement round re-samples a
/// window of +-1 step around every incumbent at ten times the resolution.
struct OracleConfig {
  int grid_steps_vs = 2000;
  int refine_iters = 3;
  double tolerance = 1e-7;
  /// Local maxima of the coarse scan that get refined.
  int refine_candidates = 4;
};

struct OracleSolution {
  PolicyPair policy;
  double revenue = 0.0;
  ParamPoint params;
};

/// max R s.t. U = 0, S = 0. The same-fixed-price policies are always feasible,
/// so this never fails.
OracleSolution solve_fair_optimal(const MarketConfig& market, const OracleConfig& cfg = {});

/// max R s.t. U = 0, S <= delta. Throws DomainError for delta < 0.
OracleSolution solve_relaxed_optimal(const MarketConfig& market, double delta,
                                     const OracleConfig& cfg = {});

/// max R(pi, fhat) over pi in Pi_k (the ledger) with S(pi, fhat) <= delta_s.
/// Fixed-price policies and `incumbent` are always tried as candidates.
/// Returns nullopt when no candidate survives the ledger.
std::optional<OracleSolution> empirical_optimizer(const AcceptanceModel& fhat, double q,
                                                  const PriceGrid& grid, double delta_s,
                                                  const EliminationLedger& ledger,
                                                  const OracleConfig& cfg = {},
                                                  const PolicyPair* incumbent = nullptr);

struct ProbabilityMaximizer {
  PolicyPair policy;
  double achieved_prob = 0.0;
};

/// argmax over Pi_k of pi^group(price_index). Ties prefer higher revenue under
/// `fhat_latest`, then the same-fixed-price policy, then lexicographically
/// larger weights. With an empty ledger the fixed-price policy is returned.
/// `fhat_latest` and `delta_s` describe the newest ledger entry and default to it.
std::optional<ProbabilityMaximizer> max_probability_policy(
    std::size_t price_index, Group group, const EliminationLedger& ledger,
    const AcceptanceModel* fhat_latest, double delta_s, const PriceGrid& grid, double q,
    const OracleConfig& cfg = {});

/// Fixed-(V_s, alpha) subproblem for one group: maximize v'F_e pi subject to
/// 1'pi = 1, v'pi = V_s + alpha, (v - V_s 1)'F_e pi = 0, pi >= 0.
lp::LinearProgram group_subproblem(const MarketConfig& market, Group group, double accepted_price,
                                   double gap);

/// Reports where a policy sits in the parametrization under `market`.
ParamPoint locate(const PolicyPair& policy, const MarketConfig& market);

}  // namespace fairprice::oracle
