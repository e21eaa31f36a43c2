#pragma once

#include <utility>
#include <vector>

#include "fairprice/linear.hpp"
#include "fairprice/pricing.hpp"

// Closed forms for the three-price family v = [5/8, 7/10, 1], q = 0.3,
// F1 = diag(0.6, 0.5-eps, 0.5-eps), F2 = diag(0.8, 0.8, 0.5-eps).
// eps = 0 is the two-group running example.
namespace fairprice::closed_form {

/// Largest eps for which the optimum formula is proved; larger eps (up to
/// kMaxEps) is accepted but flagged.
inline constexpr double kProvenEps = 1e-10;
inline constexpr double kMaxEps = 0.01;

struct ExampleOptimum {
  PolicyPair policy;
  double revenue = 0.0;
  double accepted_price = 0.0;  // V_s*
  double gap = 0.0;             // alpha*, so V_r* = V_s* + alpha*
  bool outside_proven_range = false;
};

/// Throws DomainError for eps < 0 or eps > kMaxEps.
ExampleOptimum closed_form_example_optimum(double eps);

/// Revenue of any fair policy of the family as a function of its accepted
/// price V_s and gap alpha. Throws PoleError at V_s = 5/8 or V_s = 1.
double example_revenue_surface(double eps, double accepted_price, double gap);

/// Nonnegativity bounds on alpha at a given V_s: B1, B4 are upper bounds and
/// B2, B3 lower bounds.
struct AlphaBounds {
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  double b4 = 0.0;

  double lower() const noexcept;
  double upper() const noexcept;
  bool feasible(double alpha, double tol = 0.0) const noexcept {
    return alpha >= lower() - tol && alpha <= upper() + tol;
  }
};

AlphaBounds alpha_bounds(double eps, double accepted_price);

/// A_e(V_s, eps): rows are 1', v', and (v - V_s 1)'F_e.
lp::LinearSystem example_system(Group group, double eps, double accepted_price, double gap);

/// Solves A_1 pi^1 = A_2 pi^2 = [1, V_s + alpha, 0]'. The returned weights are
/// raw: they leave the simplex when (V_s, alpha) is infeasible.
std::pair<std::vector<double>, std::vector<double>> example_policy_weights(double eps,
                                                                           double accepted_price,
                                                                           double gap);

/// |V_r*(0) - V_r*(eps)| = 360 eps / (29 (29 - 10 eps)).
double example_proposed_mean_gap(double eps);

}  // namespace fairprice::closed_form
