#include <cmath>

#include <gtest/gtest.h>

#include "fairprice/closed_form.hpp"
#include "fairprice/errors.hpp"
#include "fairprice/linear.hpp"
#include "fairprice/markets.hpp"
#include "fairprice/oracle.hpp"
#include "fairprice/reference.hpp"

using namespace fairprice;
using namespace fairprice::lp;

TEST(LinearSystem, Identity) {
  LinearSystem sys{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {0.25, -3.0, 7.5}};
  const auto x = solve_linear_system(sys);
  EXPECT_EQ(x, sys.rhs);
}

TEST(LinearSystem, ExampleGroupOneSystem) {
  const auto sys = closed_form::example_system(Group::one, 0.0, 8.0 / 11, 9.0 / 638);
  EXPECT_NEAR(sys.rhs[1], 43.0 / 58, 1e-15);
  const auto x = solve_linear_system(sys);
  EXPECT_NEAR(x[0], 20.0 / 29, 1e-12);
  EXPECT_NEAR(x[1], 0.0, 1e-12);
  EXPECT_NEAR(x[2], 9.0 / 29, 1e-12);
}

TEST(LinearSystem, RandomResidual) {
  Rng rng(3, Stream::instance);
  for (int k = 0; k < 50; ++k) {
    LinearSystem sys;
    sys.matrix.assign(8, std::vector<double>(8));
    sys.rhs.resize(8);
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t j = 0; j < 8; ++j) sys.matrix[i][j] = rng.uniform(-1, 1);
      sys.matrix[i][i] += 8.0;  // diagonally dominant
      sys.rhs[i] = rng.uniform(-5, 5);
    }
    const auto x = solve_linear_system(sys);
    double bnorm = 0.0, resid = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      double ax = 0.0;
      for (std::size_t j = 0; j < 8; ++j) ax += sys.matrix[i][j] * x[j];
      resid = std::max(resid, std::abs(ax - sys.rhs[i]));
      bnorm = std::max(bnorm, std::abs(sys.rhs[i]));
    }
    EXPECT_LE(resid, 1e-9 * (1 + bnorm));
  }
}

TEST(LinearSystem, Errors) {
  EXPECT_THROW(solve_linear_system({{{1, 2}, {2, 4}}, {1, 2}}), RankDeficiencyError);
  EXPECT_THROW(solve_linear_system({{{1, 2}}, {1}}), DimensionError);
  LinearSystem big;
  big.matrix.assign(65, std::vector<double>(65, 0.0));
  big.rhs.assign(65, 0.0);
  EXPECT_THROW(solve_linear_system(big), DimensionError);
}

TEST(Simplex, TrivialProgram) {
  LinearProgram lp{{1, 0}, {{{1, 1}, 1}}, {}};
  for (const auto& r : {lp_maximize(lp), vertex_enumerate(lp)}) {
    ASSERT_TRUE(r.optimal());
    EXPECT_NEAR(r.value, 1.0, 1e-12);
    EXPECT_NEAR(r.x[0], 1.0, 1e-12);
    EXPECT_NEAR(r.x[1], 0.0, 1e-12);
  }
}

TEST(Simplex, ExampleGroupTwoSubproblem) {
  const auto lp = oracle::group_subproblem(sim::example1_market(), Group::two, 8.0 / 11, 9.0 / 638);
  for (const auto& r : {lp_maximize(lp), vertex_enumerate(lp)}) {
    ASSERT_TRUE(r.optimal());
    EXPECT_NEAR(r.x[0], 0.0, 1e-9);
    EXPECT_NEAR(r.x[1], 25.0 / 29, 1e-9);
    EXPECT_NEAR(r.x[2], 4.0 / 29, 1e-9);
  }
}

TEST(Simplex, InfeasibleAndUnbounded) {
  LinearProgram infeasible{{1, 1}, {{{1, 1}, 1}}, {{{1, 1}, 0.5}}};
  EXPECT_EQ(lp_maximize(infeasible).status, LpStatus::infeasible);
  EXPECT_EQ(vertex_enumerate(infeasible).status, LpStatus::infeasible);
  LinearProgram unbounded{{1, 0}, {}, {{{-1, 1}, 1}}};
  EXPECT_EQ(lp_maximize(unbounded).status, LpStatus::unbounded);
}

TEST(Simplex, DegenerateCyclingCandidate) {
  // Beale's classic cycling example; Bland's rule must terminate.
  LinearProgram lp{{0.75, -150, 0.02, -6},
                   {},
                   {{{0.25, -60, -0.04, 9}, 0}, {{0.5, -90, -0.02, 3}, 0}, {{0, 0, 1, 0}, 1}}};
  const auto r = lp_maximize(lp);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.value, 0.05, 1e-9);
}

TEST(Simplex, AgreesWithVertexEnumeration) {
  Rng rng(5, Stream::instance);
  for (int k = 0; k < 200; ++k) {
    const auto lp = reference::random_lp(rng, 4);
    const auto a = lp_maximize(lp);
    const auto b = vertex_enumerate(lp);
    ASSERT_EQ(a.optimal(), b.optimal()) << "program " << k;
    if (a.optimal()) {
      EXPECT_NEAR(a.value, b.value, 1e-8) << "program " << k;
      EXPECT_LE(max_violation(lp, a.x), 1e-8);
    }
  }
}

TEST(Simplex, MalformedProgram) {
  LinearProgram lp{{1, 1}, {{{1}, 1}}, {}};
  EXPECT_THROW(lp_maximize(lp), DimensionError);
  LinearProgram empty{{1, 1}, {}, {}};
  EXPECT_THROW(lp_maximize(empty), DomainError);
}
