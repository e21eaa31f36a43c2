#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fairprice {

/// Customer group. Group one arrives with probability q.
enum class Group { one = 1, two = 2 };

constexpr std::size_t group_index(Group g) noexcept { return g == Group::one ? 0 : 1; }

/// Sorted candidate prices 0 < v_1 < ... < v_d <= 1, d >= 2.
class PriceGrid {
 public:
  explicit PriceGrid(std::vector<double> prices);

  std::size_t size() const noexcept { return prices_.size(); }
  double operator[](std::size_t i) const { return prices_[i]; }
  std::span<const double> prices() const noexcept { return prices_; }
  double lowest() const noexcept { return prices_.front(); }
  double highest() const noexcept { return prices_.back(); }

  friend bool operator==(const PriceGrid&, const PriceGrid&) = default;

 private:
  std::vector<double> prices_;
};

/// A probability distribution over the price indices of one grid.
class GroupDistribution {
 public:
  static constexpr double kSimplexTolerance = 1e-12;

  /// Throws DomainError unless every weight is in [0,1] and the sum is 1
  /// within kSimplexTolerance.
  explicit GroupDistribution(std::vector<double> weights);

  /// Explicit cleanup for numerically produced weights: entries in
  /// [-clamp_tolerance, 0) are zeroed, then the vector is rescaled to sum 1.
  static GroupDistribution normalized(std::vector<double> weights, double clamp_tolerance = 1e-9);

  static GroupDistribution point_mass(std::size_t dimension, std::size_t index);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }

  friend bool operator==(const GroupDistribution&, const GroupDistribution&) = default;

 private:
  std::vector<double> weights_;
};

/// (pi^1, pi^2): one distribution per group over the same grid.
class PolicyPair {
 public:
  PolicyPair(GroupDistribution group1, GroupDistribution group2);

  /// Both groups proposed the same fixed price v_index.
  static PolicyPair fixed_price(std::size_t dimension, std::size_t index);

  const GroupDistribution& group1() const noexcept { return group1_; }
  const GroupDistribution& group2() const noexcept { return group2_; }
  const GroupDistribution& operator[](Group g) const noexcept {
    return g == Group::one ? group1_ : group2_;
  }
  std::size_t size() const noexcept { return group1_.size(); }

  /// Componentwise lambda * a + (1 - lambda) * b.
  static PolicyPair mixture(double lambda, const PolicyPair& a, const PolicyPair& b);

  /// Max absolute weight difference over both groups.
  double distance_linf(const PolicyPair& other) const;

  friend bool operator==(const PolicyPair&, const PolicyPair&) = default;

 private:
  GroupDistribution group1_;
  GroupDistribution group2_;
};

/// Per-group acceptance probabilities F_e(i) = P(valuation >= v_i).
class AcceptanceModel {
 public:
  static constexpr double kDefaultFloor = 0.05;

  /// `strict` is for ground-truth demand and requires nonincreasing curves;
  /// `estimate` accepts empirical curves that may be locally non-monotone.
  enum class Check { strict, estimate };

  AcceptanceModel(std::vector<double> group1, std::vector<double> group2,
                  double floor = kDefaultFloor, Check check = Check::strict);

  std::span<const double> curve(Group g) const noexcept {
    return g == Group::one ? std::span<const double>(group1_) : std::span<const double>(group2_);
  }
  double accept(Group g, std::size_t i) const { return curve(g)[i]; }
  double floor() const noexcept { return floor_; }
  std::size_t size() const noexcept { return group1_.size(); }
  bool monotone() const noexcept;

  friend bool operator==(const AcceptanceModel&, const AcceptanceModel&) = default;

 private:
  std::vector<double> group1_;
  std::vector<double> group2_;
  double floor_;
};

/// A two-group market: grid, demand, and Group-1 share q in (0,1).
struct MarketConfig {
  MarketConfig(PriceGrid grid, AcceptanceModel model, double q);

  PriceGrid grid;
  AcceptanceModel model;
  double q;

  double share(Group g) const noexcept { return g == Group::one ? q : 1.0 - q; }
};

// Group-level quantities.
double proposed_mean(const GroupDistribution& dist, const PriceGrid& grid);
double group_revenue(const GroupDistribution& dist, std::span<const double> accept,
                     const PriceGrid& grid);
double acceptance_mass(const GroupDistribution& dist, std::span<const double> accept);

/// E[v | v ~ dist, accepted]. Throws UndefinedConditionalError on zero mass.
double expected_accepted_price(const GroupDistribution& dist, std::span<const double> accept,
                               const PriceGrid& grid);

/// q * v'F1 pi1 + (1-q) * v'F2 pi2.
double expected_revenue(const PolicyPair& policy, const MarketConfig& market);

/// |v'pi1 - v'pi2|.
double procedural_unfairness(const PolicyPair& policy, const PriceGrid& grid);

/// Gap between the two groups' expected accepted prices.
double substantive_unfairness(const PolicyPair& policy, const MarketConfig& market);

/// R(pi_*) - R(pi). Negative for policies that beat the fair optimum by being unfair.
double per_round_regret(const PolicyPair& policy, const MarketConfig& market,
                        double optimal_revenue);

/// Largest v_i * (q F1(i) + (1-q) F2(i)); the best single price for both groups.
std::size_t best_fixed_price(const MarketConfig& market);

/// Largest v_i * F_e(i) for one group alone.
std::size_t best_group_price(const MarketConfig& market, Group g);

}  // namespace fairprice
