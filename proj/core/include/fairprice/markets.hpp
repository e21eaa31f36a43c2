#pragma once

#include <cstdint>

#include "fairprice/pricing.hpp"

namespace fairprice::sim {

/// q = 0.3, v = [5/8, 7/10, 1], F1 = [3/5, 1/2, 1/2], F2 = [4/5, 4/5, 1/2].
MarketConfig example1_market();

/// example1 with every 0.5 acceptance replaced by 0.5 - eps, 0 <= eps < 0.5.
MarketConfig example_eps_market(double eps);

/// Prices of the lower-bound construction live in [4, 12); they are divided
/// by 12 to land in (0, 1]. Acceptance rates are unit free.
inline constexpr double kLowerBoundPriceScale = 1.0 / 12.0;

/// sqrt(d / T), the bump size of the lower-bound family.
double lowerbound_epsilon(int d, std::int64_t horizon);

/// Single-group-equivalent market (F1 = F2, q = 0.5) with prices
/// a_i = (1 + eps)^i * 4, acceptance 1 / a_i, and price j (1-based) bumped to
/// (1 + eps) / a_j. j = 0 is the unbumped member with a flat revenue curve.
/// Requires 3 <= d, 0 <= j <= d, and (1 + eps)^d < 3.
MarketConfig lowerbound_family_market(int j, int d, std::int64_t horizon);

}  // namespace fairprice::sim
