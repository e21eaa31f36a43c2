#include "fairprice/markets.hpp"

#include <algorithm>
#include <cmath>

#include "fairprice/errors.hpp"

namespace fairprice::sim {

MarketConfig example1_market() { return example_eps_market(0.0); }

MarketConfig example_eps_market(double eps) {
  if (!(eps >= 0.0 && eps < 0.5)) {
    throw DomainError("example eps must lie in [0, 0.5)");
  }
  return MarketConfig(PriceGrid({0.625, 0.7, 1.0}),
                      AcceptanceModel({0.6, 0.5 - eps, 0.5 - eps}, {0.8, 0.8, 0.5 - eps},
                                      std::min(AcceptanceModel::kDefaultFloor, 0.5 - eps)),
                      0.3);
}

double lowerbound_epsilon(int d, std::int64_t horizon) {
  if (horizon < 1) throw DomainError("horizon must be positive");
  return std::sqrt(static_cast<double>(d) / static_cast<double>(horizon));
}

MarketConfig lowerbound_family_market(int j, int d, std::int64_t horizon) {
  if (d < 3) throw DomainError("lower-bound family needs d >= 3");
  if (j < 0 || j > d) throw DomainError("bump index j must lie in [0, d]");
  const double eps = lowerbound_epsilon(d, horizon);
  constexpr double l = 1.0;
  constexpr double a0 = 4.0 * l;
  std::vector<double> prices(static_cast<std::size_t>(d));
  std::vector<double> accept(static_cast<std::size_t>(d));
  for (int i = 1; i <= d; ++i) {
    const double a = std::pow(1.0 + eps / l, i) * a0;
    if (!(a < 12.0 * l)) {
      throw DomainError("lower-bound prices exceed the [4, 12) band; need (1 + sqrt(d/T))^d < 3");
    }
    prices[static_cast<std::size_t>(i - 1)] = a * kLowerBoundPriceScale;
    accept[static_cast<std::size_t>(i - 1)] = (i == j ? l + eps : l) / a;
  }
  // The bumped rate equals its left neighbour exactly in real arithmetic;
  // clamp so rounding cannot break monotonicity.
  for (std::size_t i = 1; i < accept.size(); ++i) accept[i] = std::min(accept[i], accept[i - 1]);
  AcceptanceModel model(accept, accept);
  return MarketConfig(PriceGrid(std::move(prices)), std::move(model), 0.5);
}

}  // namespace fairprice::sim
