#pragma once

#include <cstddef>
#include <vector>

namespace fairprice::lp {

/// Dense square system A x = b, n <= kMaxDimension.
struct LinearSystem {
  static constexpr std::size_t kMaxDimension = 64;

  std::vector<std::vector<double>> matrix;
  std::vector<double> rhs;
};

/// Solves by Gaussian elimination with partial pivoting.
/// Throws RankDeficiencyError when a pivot falls below `pivot_tolerance`.
std::vector<double> solve_linear_system(const LinearSystem& system, double pivot_tolerance = 1e-10);

struct Constraint {
  std::vector<double> row;
  double value = 0.0;
};

/// maximize c'x  s.t.  A x = b,  G x <= h,  x >= 0.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<Constraint> equalities;
  std::vector<Constraint> inequalities;

  std::size_t variables() const noexcept { return objective.size(); }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double value = 0.0;

  bool optimal() const noexcept { return status == LpStatus::optimal; }
};

struct LpTolerances {
  double pivot = 1e-10;
  double feasibility = 1e-9;
};

/// Two-phase dense simplex with Bland's rule.
LpResult lp_maximize(const LinearProgram& program, const LpTolerances& tol = {});

/// Exhaustive basic-feasible-solution search. Exact for tiny programs and
/// used as an independent check of lp_maximize. Cannot report unboundedness.
/// Throws CapacityError beyond kMaxVariables / kMaxConstraints.
inline constexpr std::size_t kVertexMaxVariables = 8;
inline constexpr std::size_t kVertexMaxConstraints = 16;
LpResult vertex_enumerate(const LinearProgram& program, const LpTolerances& tol = {});

/// Largest violation of any constraint (including x >= 0) at x.
double max_violation(const LinearProgram& program, const std::vector<double>& x);

}  // namespace fairprice::lp
