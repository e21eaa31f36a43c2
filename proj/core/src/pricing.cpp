#include "fairprice/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fairprice/errors.hpp"

namespace fairprice {
namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": size " + std::to_string(a) + " vs " +
                         std::to_string(b));
  }
}

void validate_curve(const std::vector<double>& curve, double floor, bool strict, const char* name) {
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double f = curve[i];
    if (!(f >= 0.0 && f <= 1.0)) {
      throw DomainError(std::string(name) + "[" + std::to_string(i) + "] outside [0,1]");
    }
    if (strict && i > 0 && f > curve[i - 1]) {
      throw DomainError(std::string(name) + " must be nonincreasing in price");
    }
  }
  if (curve.back() < floor) {
    throw DomainError(std::string(name) + ": acceptance at the highest price is below the floor");
  }
}

}  // namespace

PriceGrid::PriceGrid(std::vector<double> prices) : prices_(std::move(prices)) {
  if (prices_.size() < 2) {
    throw DomainError("price grid needs at least two prices");
  }
  if (!(prices_.front() > 0.0) || !(prices_.back() <= 1.0)) {
    throw DomainError("prices must lie in (0, 1]");
  }
  for (std::size_t i = 1; i < prices_.size(); ++i) {
    if (!(prices_[i] > prices_[i - 1])) {
      throw DomainError("prices must be strictly increasing");
    }
  }
}

GroupDistribution::GroupDistribution(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) {
    throw DomainError("empty distribution");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw DomainError("distribution weight outside [0,1]");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw DomainError("distribution weights do not sum to 1");
  }
}

GroupDistribution GroupDistribution::normalized(std::vector<double> weights,
                                                double clamp_tolerance) {
  double sum = 0.0;
  for (double& w : weights) {
    if (w < 0.0) {
      if (w < -clamp_tolerance) {
        throw DomainError("weight below the clamp tolerance");
      }
      w = 0.0;
    }
    sum += w;
  }
  if (!(sum > 0.0)) {
    throw DomainError("cannot normalize a zero vector");
  }
  for (double& w : weights) w /= sum;
  // Rescaling can leave the sum a few ulps off; push the residual into the
  // largest entry so the simplex check passes.
  const double residual = 1.0 - std::accumulate(weights.begin(), weights.end(), 0.0);
  auto largest = std::max_element(weights.begin(), weights.end());
  *largest = std::clamp(*largest + residual, 0.0, 1.0);
  return GroupDistribution(std::move(weights));
}

GroupDistribution GroupDistribution::point_mass(std::size_t dimension, std::size_t index) {
  if (index >= dimension) {
    throw DimensionError("point mass index out of range");
  }
  std::vector<double> w(dimension, 0.0);
  w[index] = 1.0;
  return GroupDistribution(std::move(w));
}

PolicyPair::PolicyPair(GroupDistribution group1, GroupDistribution group2)
    : group1_(std::move(group1)), group2_(std::move(group2)) {
  require_same_size(group1_.size(), group2_.size(), "policy pair");
}

PolicyPair PolicyPair::fixed_price(std::size_t dimension, std::size_t index) {
  return PolicyPair(GroupDistribution::point_mass(dimension, index),
                    GroupDistribution::point_mass(dimension, index));
}

PolicyPair PolicyPair::mixture(double lambda, const PolicyPair& a, const PolicyPair& b) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw DomainError("mixture weight outside [0,1]");
  }
  require_same_size(a.size(), b.size(), "mixture");
  auto mix = [lambda](const GroupDistribution& x, const GroupDistribution& y) {
    std::vector<double> w(x.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = lambda * x[i] + (1.0 - lambda) * y[i];
    return GroupDistribution::normalized(std::move(w));
  };
  return PolicyPair(mix(a.group1(), b.group1()), mix(a.group2(), b.group2()));
}

double PolicyPair::distance_linf(const PolicyPair& other) const {
  require_same_size(size(), other.size(), "policy distance");
  double d = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    d = std::max(d, std::abs(group1_[i] - other.group1_[i]));
    d = std::max(d, std::abs(group2_[i] - other.group2_[i]));
  }
  return d;
}

AcceptanceModel::AcceptanceModel(std::vector<double> group1, std::vector<double> group2,
                                 double floor, Check check)
    : group1_(std::move(group1)), group2_(std::move(group2)), floor_(floor) {
  require_same_size(group1_.size(), group2_.size(), "acceptance model");
  if (group1_.empty()) {
    throw DimensionError("empty acceptance model");
  }
  if (!(floor_ > 0.0 && floor_ <= 1.0)) {
    throw DomainError("acceptance floor must lie in (0, 1]");
  }
  const bool strict = check == Check::strict;
  validate_curve(group1_, floor_, strict, "group1_accept");
  validate_curve(group2_, floor_, strict, "group2_accept");
}

bool AcceptanceModel::monotone() const noexcept {
  auto nonincreasing = [](const std::vector<double>& c) {
    return std::is_sorted(c.rbegin(), c.rend());
  };
  return nonincreasing(group1_) && nonincreasing(group2_);
}

MarketConfig::MarketConfig(PriceGrid grid_in, AcceptanceModel model_in, double q_in)
    : grid(std::move(grid_in)), model(std::move(model_in)), q(q_in) {
  require_same_size(grid.size(), model.size(), "market");
  if (!(q > 0.0 && q < 1.0)) {
    throw DomainError("group share q must lie in (0, 1)");
  }
}

double proposed_mean(const GroupDistribution& dist, const PriceGrid& grid) {
  require_same_size(dist.size(), grid.size(), "proposed mean");
  double m = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) m += grid[i] * dist[i];
  return m;
}

double group_revenue(const GroupDistribution& dist, std::span<const double> accept,
                     const PriceGrid& grid) {
  require_same_size(dist.size(), grid.size(), "group revenue");
  require_same_size(accept.size(), grid.size(), "group revenue");
  double r = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) r += grid[i] * accept[i] * dist[i];
  return r;
}

double acceptance_mass(const GroupDistribution& dist, std::span<const double> accept) {
  require_same_size(dist.size(), accept.size(), "acceptance mass");
  double m = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) m += accept[i] * dist[i];
  return m;
}

double expected_accepted_price(const GroupDistribution& dist, std::span<const double> accept,
                               const PriceGrid& grid) {
  const double mass = acceptance_mass(dist, accept);
  if (!(mass > 0.0)) {
    throw UndefinedConditionalError("expected accepted price undefined: zero acceptance mass");
  }
  return group_revenue(dist, accept, grid) / mass;
}

double expected_revenue(const PolicyPair& policy, const MarketConfig& market) {
  return market.q * group_revenue(policy.group1(), market.model.curve(Group::one), market.grid) +
         (1.0 - market.q) *
             group_revenue(policy.group2(), market.model.curve(Group::two), market.grid);
}

double procedural_unfairness(const PolicyPair& policy, const PriceGrid& grid) {
  return std::abs(proposed_mean(policy.group1(), grid) - proposed_mean(policy.group2(), grid));
}

double substantive_unfairness(const PolicyPair& policy, const MarketConfig& market) {
  const double s1 = expected_accepted_price(policy.group1(), market.model.curve(Group::one), market.grid);
  const double s2 = expected_accepted_price(policy.group2(), market.model.curve(Group::two), market.grid);
  return std::abs(s1 - s2);
}

double per_round_regret(const PolicyPair& policy, const MarketConfig& market,
                        double optimal_revenue) {
  return optimal_revenue - expected_revenue(policy, market);
}

std::size_t best_fixed_price(const MarketConfig& market) {
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t i = 0; i < market.grid.size(); ++i) {
    const double value = market.grid[i] * (market.q * market.model.accept(Group::one, i) +
                                           (1.0 - market.q) * market.model.accept(Group::two, i));
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }
  return best;
}

std::size_t best_group_price(const MarketConfig& market, Group g) {
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t i = 0; i < market.grid.size(); ++i) {
    const double value = market.grid[i] * market.model.accept(g, i);
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }
  return best;
}

}  // namespace fairprice
