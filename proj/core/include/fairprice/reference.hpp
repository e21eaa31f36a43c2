#pragma once

#include <cstdint>

#include "fairprice/linear.hpp"
#include "fairprice/pricing.hpp"
#include "fairprice/rng.hpp"

// Independent reference computations used to check the library: brute force
// and Monte-Carlo estimates that share no code with the solvers they check.
namespace fairprice::reference {

/// Best revenue over a dense grid of the fair-policy manifold of a d = 3
/// market. Group 1's weights run over a simplex lattice with spacing `step`;
/// Group 2's weights follow from the three fairness equations (Cramer's rule).
/// Same-fixed-price policies are always included.
double brute_force_fair_revenue(const MarketConfig& market, double step = 1e-3);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Simulated revenue per customer: group, price, and valuation threshold
/// are all drawn explicitly.
MonteCarloEstimate simulate_revenue(const PolicyPair& policy, const MarketConfig& market,
                                    std::int64_t samples, Rng& rng);

/// Average price among accepted offers for one group.
MonteCarloEstimate simulate_accepted_price(const GroupDistribution& dist, std::span<const double> accept,
                                           const PriceGrid& grid, std::int64_t samples, Rng& rng);

GroupDistribution random_distribution(Rng& rng, std::size_t d);
PolicyPair random_policy(Rng& rng, std::size_t d);
/// Sorted prices in [0.1, 1], nonincreasing acceptance in [floor, 1], q in [0.1, 0.9].
MarketConfig random_market(Rng& rng, std::size_t d, double floor = AcceptanceModel::kDefaultFloor);

/// Random bounded LP (a sum-of-variables cap is always present); a fraction
/// of the draws is infeasible by construction.
lp::LinearProgram random_lp(Rng& rng, std::size_t variables);

}  // namespace fairprice::reference
