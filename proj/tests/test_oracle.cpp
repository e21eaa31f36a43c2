#include <cmath>

#include <gtest/gtest.h>

#include "fairprice/closed_form.hpp"
#include "fairprice/errors.hpp"
#include "fairprice/ledger.hpp"
#include "fairprice/markets.hpp"
#include "fairprice/oracle.hpp"
#include "fairprice/reference.hpp"

using namespace fairprice;
using namespace fairprice::oracle;

namespace {

PolicyPair example_optimum() {
  return PolicyPair(GroupDistribution({20.0 / 29, 0.0, 9.0 / 29}), GroupDistribution({0.0, 25.0 / 29, 4.0 / 29}));
}

LedgerEntry true_model_entry(int epoch, double delta_s, double floor) {
  return {epoch, sim::example1_market().model, delta_s, floor};
}

}  // namespace

TEST(Ledger, AppendValidation) {
  EliminationLedger ledger;
  ledger.append(true_model_entry(1, 0.01, 0.5));
  EXPECT_THROW(ledger.append(true_model_entry(1, 0.01, 0.5)), DomainError);
  EXPECT_THROW(ledger.append(true_model_entry(2, 0.0, 0.5)), DomainError);
  EXPECT_THROW(ledger.append(true_model_entry(2, 0.01, 1.5)), DomainError);
  EXPECT_EQ(ledger.size(), 1u);
}

TEST(Ledger, Membership) {
  const auto m = sim::example1_market();
  EliminationLedger ledger;
  EXPECT_TRUE(member(PolicyPair::fixed_price(3, 0), ledger, m.grid, m.q));
  ledger.append(true_model_entry(1, 0.01, 0.50));
  EXPECT_TRUE(member(example_optimum(), ledger, m.grid, m.q));
  EXPECT_TRUE(member(PolicyPair::fixed_price(3, 2), ledger, m.grid, m.q));
  EXPECT_FALSE(member(PolicyPair::fixed_price(3, 0), ledger, m.grid, m.q));
}

TEST(Ledger, UnfairPolicyIsNeverAMember) {
  const auto m = sim::example1_market();
  const PolicyPair unfair(GroupDistribution::point_mass(3, 2), GroupDistribution::point_mass(3, 1));
  EXPECT_THROW(member(unfair, EliminationLedger{}, m.grid, m.q), DomainError);
}

TEST(FairOptimal, ExampleOne) {
  const auto sol = solve_fair_optimal(sim::example1_market());
  EXPECT_NEAR(sol.revenue, 74.0 / 145, 1e-6);
  EXPECT_LE(sol.policy.distance_linf(example_optimum()), 1e-4);
  EXPECT_NEAR(sol.params.accepted_price, 8.0 / 11, 1e-4);
  EXPECT_NEAR(sol.params.proposed_price(), 43.0 / 58, 1e-4);
}

TEST(FairOptimal, IdenticalGroupsReduceToBestFixedPrice) {
  const MarketConfig m(PriceGrid({0.2, 0.45, 0.7, 0.95}), AcceptanceModel({0.9, 0.8, 0.5, 0.2}, {0.9, 0.8, 0.5, 0.2}),
                       0.5);
  const auto sol = solve_fair_optimal(m);
  // v F = [0.18, 0.36, 0.35, 0.19]: the second price wins.
  EXPECT_NEAR(sol.revenue, 0.45 * 0.8, 1e-9);
  EXPECT_NEAR(sol.policy.group1()[1], 1.0, 1e-6);
  EXPECT_NEAR(sol.policy.group2()[1], 1.0, 1e-6);
}

TEST(FairOptimal, MatchesBruteForceOnRandomMarkets) {
  Rng rng(17, Stream::instance);
  for (int k = 0; k < 4; ++k) {
    const auto m = reference::random_market(rng, 3);
    const auto sol = solve_fair_optimal(m);
    const double brute = reference::brute_force_fair_revenue(m, 2e-3);
    EXPECT_NEAR(sol.revenue, brute, 2e-3) << "market " << k;
    EXPECT_GE(sol.revenue, brute - 1e-9) << "brute force should not beat the scan";
    EXPECT_LE(procedural_unfairness(sol.policy, m.grid), 1e-9);
    EXPECT_LE(substantive_unfairness(sol.policy, m), 1e-6);
  }
}

TEST(RelaxedOptimal, DegenerateAndVacuous) {
  const auto m = sim::example1_market();
  const auto exact = solve_fair_optimal(m);
  EXPECT_NEAR(solve_relaxed_optimal(m, 0.0).revenue, exact.revenue, 1e-9);
  // S never exceeds v_d - v_1 = 0.375, so any larger delta is vacuous.
  const double vacuous = solve_relaxed_optimal(m, 1.0).revenue;
  EXPECT_GE(vacuous, exact.revenue);
  EXPECT_NEAR(vacuous, solve_relaxed_optimal(m, 0.375).revenue, 1e-9);
  EXPECT_THROW(solve_relaxed_optimal(m, -0.1), DomainError);
}

TEST(RelaxedOptimal, MonotoneInDelta) {
  const auto m = sim::example1_market();
  const double r0 = solve_relaxed_optimal(m, 0.0).revenue;
  const double r1 = solve_relaxed_optimal(m, 0.001).revenue;
  const double r2 = solve_relaxed_optimal(m, 0.01).revenue;
  EXPECT_GE(r1, r0 - 1e-9);
  EXPECT_GE(r2, r1 - 1e-9);
  EXPECT_GT(r2, r0);
}

TEST(EmpiricalOptimizer, TrueModel) {
  const auto m = sim::example1_market();
  const auto sol = empirical_optimizer(m.model, m.q, m.grid, 0.0, EliminationLedger{});
  ASSERT_TRUE(sol.has_value());
  EXPECT_NEAR(sol->revenue, 74.0 / 145, 1e-3);
}

TEST(EmpiricalOptimizer, InfeasibleLedger) {
  const auto m = sim::example1_market();
  EliminationLedger ledger;
  ledger.append(true_model_entry(1, 0.01, 0.6));
  EXPECT_FALSE(empirical_optimizer(m.model, m.q, m.grid, 0.0, ledger).has_value());
}

TEST(EmpiricalOptimizer, PerturbedEstimateRespectsConstraints) {
  const auto m = sim::example1_market();
  const AcceptanceModel fhat({0.62, 0.48, 0.52}, {0.78, 0.82, 0.48}, 0.05, AcceptanceModel::Check::estimate);
  EliminationLedger ledger;
  ledger.append({1, m.model, 0.02, 0.49});
  const auto sol = empirical_optimizer(fhat, m.q, m.grid, 0.05, ledger);
  ASSERT_TRUE(sol.has_value());
  EXPECT_TRUE(member(sol->policy, ledger, m.grid, m.q));
  EXPECT_LE(substantive_unfairness(sol->policy, MarketConfig(m.grid, fhat, m.q)), 0.05 + 1e-9);
}

TEST(MaxProbability, EmptyLedgerGivesFixedPrices) {
  const auto m = sim::example1_market();
  for (std::size_t i = 0; i < 3; ++i) {
    for (Group g : {Group::one, Group::two}) {
      const auto r = max_probability_policy(i, g, EliminationLedger{}, nullptr, 0.0, m.grid, m.q);
      ASSERT_TRUE(r.has_value());
      EXPECT_DOUBLE_EQ(r->achieved_prob, 1.0);
      EXPECT_EQ(r->policy, PolicyPair::fixed_price(3, i));
    }
  }
}

TEST(MaxProbability, ShrinksAsLedgerGrows) {
  const auto m = sim::example1_market();
  EliminationLedger ledger;
  ledger.append(true_model_entry(1, 0.02, 0.49));
  const auto first = max_probability_policy(0, Group::two, ledger, nullptr, 0.02, m.grid, m.q);
  ASSERT_TRUE(first.has_value());
  EXPECT_LT(first->achieved_prob, 1.0);
  EXPECT_TRUE(member(first->policy, ledger, m.grid, m.q));
  ledger.append(true_model_entry(2, 0.01, 0.505));
  const auto second = max_probability_policy(0, Group::two, ledger, nullptr, 0.01, m.grid, m.q);
  const double p2 = second ? second->achieved_prob : 0.0;
  EXPECT_LE(p2, first->achieved_prob + 1e-9);
}

TEST(MaxProbability, IndexOutOfRange) {
  const auto m = sim::example1_market();
  EXPECT_THROW(max_probability_policy(3, Group::one, EliminationLedger{}, nullptr, 0.0, m.grid, m.q), DimensionError);
}

TEST(ClosedForm, GoldenValuesAtZero) {
  const auto opt = closed_form::closed_form_example_optimum(0.0);
  EXPECT_LE(opt.policy.distance_linf(example_optimum()), 1e-12);
  EXPECT_NEAR(opt.revenue, 74.0 / 145, 1e-12);
  EXPECT_NEAR(opt.revenue, 37.0 * 4 / 290, 1e-12);
  EXPECT_NEAR(opt.accepted_price, 8.0 / 11, 1e-12);
  EXPECT_NEAR(opt.accepted_price + opt.gap, 43.0 / 58, 1e-12);
  EXPECT_NEAR(8.0 / 11 + 9.0 / 638, 43.0 / 58, 1e-15);
}

TEST(ClosedForm, PerturbedOptimumIsConsistent) {
  const double eps = 1e-3;
  const auto opt = closed_form::closed_form_example_optimum(eps);
  const auto m = sim::example_eps_market(eps);
  EXPECT_LE(procedural_unfairness(opt.policy, m.grid), 1e-12);
  EXPECT_LE(substantive_unfairness(opt.policy, m), 1e-12);
  EXPECT_NEAR(expected_revenue(opt.policy, m), opt.revenue, 1e-12);
  EXPECT_NEAR(closed_form::example_revenue_surface(eps, opt.accepted_price, opt.gap), opt.revenue, 1e-12);
  EXPECT_NEAR(opt.revenue, 37 * (1 - 2 * eps) * (4 + 5 * eps) / (10 * (29 - 10 * eps)), 1e-12);
  EXPECT_TRUE(opt.outside_proven_range);
}

TEST(ClosedForm, DomainErrors) {
  EXPECT_THROW(closed_form::closed_form_example_optimum(-1e-3), DomainError);
  EXPECT_THROW(closed_form::closed_form_example_optimum(0.02), DomainError);
  EXPECT_THROW(closed_form::example_revenue_surface(0.0, 0.625, 0.0), PoleError);
  EXPECT_THROW(closed_form::example_revenue_surface(0.0, 1.0, 0.0), PoleError);
}

TEST(RevenueSurface, KnownPoints) {
  EXPECT_NEAR(closed_form::example_revenue_surface(0.0, 8.0 / 11, 9.0 / 638), 74.0 / 145, 1e-12);
  for (double eps : {0.0, 0.004, 0.01}) {
    for (double vs : {0.65, 0.7, 0.8, 0.9}) {
      EXPECT_NEAR(closed_form::example_revenue_surface(eps, vs, 0.0), (71 - 30 * eps) / 100 * vs, 1e-12);
    }
  }
}

TEST(RevenueSurface, MatchesReconstructedPolicy) {
  const double vs = 0.70;
  const auto b = closed_form::alpha_bounds(0.0, vs);
  const double alpha = std::max(b.b3, 0.0);
  const auto [w1, w2] = closed_form::example_policy_weights(0.0, vs, alpha);
  const PolicyPair policy(GroupDistribution::normalized(w1), GroupDistribution::normalized(w2));
  EXPECT_NEAR(expected_revenue(policy, sim::example1_market()),
              closed_form::example_revenue_surface(0.0, vs, alpha), 1e-9);
}

TEST(AlphaBounds, PinchAtOptimum) {
  const auto b = closed_form::alpha_bounds(0.0, 8.0 / 11);
  EXPECT_NEAR(b.b1, 9.0 / 638, 1e-12);
  EXPECT_NEAR(b.b3, 9.0 / 638, 1e-12);
  for (double vs = 0.63; vs <= 0.7; vs += 0.01) EXPECT_LE(closed_form::alpha_bounds(0.0, vs).b3, 1e-15);
  for (double vs = 0.63; vs < 0.999; vs += 0.005) {
    const auto bb = closed_form::alpha_bounds(0.0, vs);
    EXPECT_LE(bb.b1, bb.b4 + 1e-12) << "V_s " << vs;
  }
}

TEST(ProceduralSubproblem, OptimumIsFeasibleAtEveryRow) {
  const auto m = sim::example1_market();
  const auto opt = example_optimum();
  for (Group g : {Group::one, Group::two}) {
    const auto lp = group_subproblem(m, g, 8.0 / 11, 9.0 / 638);
    const auto w = opt[g].weights();
    EXPECT_LE(lp::max_violation(lp, std::vector<double>(w.begin(), w.end())), 1e-12);
  }
}
