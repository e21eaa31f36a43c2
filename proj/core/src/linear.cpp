#include <algorithm>
#include <cmath>
#include <string>

#include "fairprice/errors.hpp"
#include "fairprice/linear.hpp"

namespace fairprice::lp {

std::vector<double> solve_linear_system(const LinearSystem& system, double pivot_tolerance) {
  const std::size_t n = system.rhs.size();
  if (n == 0 || n > LinearSystem::kMaxDimension) {
    throw DimensionError("linear system size " + std::to_string(n) + " outside [1, 64]");
  }
  if (system.matrix.size() != n) {
    throw DimensionError("linear system is not square");
  }
  std::vector<double> a(n * (n + 1));
  for (std::size_t r = 0; r < n; ++r) {
    if (system.matrix[r].size() != n) {
      throw DimensionError("linear system is not square");
    }
    std::copy(system.matrix[r].begin(), system.matrix[r].end(), a.begin() + r * (n + 1));
    a[r * (n + 1) + n] = system.rhs[r];
  }
  auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * (n + 1) + c]; };

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(at(r, col)) > std::abs(at(pivot, col))) pivot = r;
    }
    if (std::abs(at(pivot, col)) <= pivot_tolerance) {
      throw RankDeficiencyError("singular system: pivot " + std::to_string(at(pivot, col)) +
                                " in column " + std::to_string(col));
    }
    if (pivot != col) {
      for (std::size_t c = col; c <= n; ++c) std::swap(at(pivot, c), at(col, c));
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = at(r, col) / at(col, col);
      if (factor == 0.0) continue;
      for (std::size_t c = col; c <= n; ++c) at(r, c) -= factor * at(col, c);
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = at(i, n);
    for (std::size_t c = i + 1; c < n; ++c) s -= at(i, c) * x[c];
    x[i] = s / at(i, i);
  }
  return x;
}

double max_violation(const LinearProgram& program, const std::vector<double>& x) {
  double worst = 0.0;
  for (double xi : x) worst = std::max(worst, -xi);
  auto dot = [&](const std::vector<double>& row) {
    double s = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) s += row[i] * x[i];
    return s;
  };
  for (const auto& c : program.equalities) worst = std::max(worst, std::abs(dot(c.row) - c.value));
  for (const auto& c : program.inequalities) worst = std::max(worst, dot(c.row) - c.value);
  return worst;
}

namespace {

// Enumerates every k-subset of [0, n) in lexicographic order.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

LpResult vertex_enumerate(const LinearProgram& program, const LpTolerances& tol) {
  const std::size_t n = program.variables();
  const std::size_t m = program.equalities.size() + program.inequalities.size();
  if (n == 0) throw DimensionError("linear program without variables");
  if (n > kVertexMaxVariables || m > kVertexMaxConstraints) {
    throw CapacityError("vertex enumeration limited to 8 variables and 16 constraints");
  }
  // Candidate hyperplanes: all equality rows, all inequality rows, and x_i = 0.
  std::vector<Constraint> planes;
  planes.reserve(m + n);
  for (const auto& c : program.equalities) {
    if (c.row.size() != n) throw DimensionError("constraint row length mismatch");
    planes.push_back(c);
  }
  for (const auto& c : program.inequalities) {
    if (c.row.size() != n) throw DimensionError("constraint row length mismatch");
    planes.push_back(c);
  }
  for (std::size_t i = 0; i < n; ++i) {
    Constraint c;
    c.row.assign(n, 0.0);
    c.row[i] = 1.0;
    planes.push_back(std::move(c));
  }

  LpResult best;
  best.status = LpStatus::infeasible;
  for_each_subset(planes.size(), n, [&](const std::vector<std::size_t>& chosen) {
    LinearSystem sys;
    sys.matrix.reserve(n);
    sys.rhs.reserve(n);
    for (std::size_t k : chosen) {
      sys.matrix.push_back(planes[k].row);
      sys.rhs.push_back(planes[k].value);
    }
    std::vector<double> x;
    try {
      x = solve_linear_system(sys, tol.pivot);
    } catch (const RankDeficiencyError&) {
      return;
    }
    if (max_violation(program, x) > tol.feasibility) return;
    for (double& xi : x) xi = std::max(xi, 0.0);
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) value += program.objective[i] * x[i];
    if (best.status != LpStatus::optimal || value > best.value) {
      best.status = LpStatus::optimal;
      best.value = value;
      best.x = std::move(x);
    }
  });
  return best;
}

}  // namespace fairprice::lp
