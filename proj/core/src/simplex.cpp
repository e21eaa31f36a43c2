#include <algorithm>
#include <cmath>
#include <limits>

#include "fairprice/errors.hpp"
#include "fairprice/linear.hpp"

namespace fairprice::lp {
namespace {

constexpr double kOptimalityTolerance = 1e-11;
constexpr std::size_t kMaxPivots = 100000;

// Dense tableau: `rows` constraint rows over `cols` structural columns plus
// a right-hand side, a basis, and one reduced-profit row for the current phase.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * (cols + 1), 0.0), basis_(rows, 0), profit_(cols + 1, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return a_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  // Reduced profits for cost vector `cost`; profit_[cols_] holds the objective value.
  void price(const std::vector<double>& cost) {
    for (std::size_t j = 0; j <= cols_; ++j) profit_[j] = j < cols_ ? cost[j] : 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) profit_[j] -= cb * at(r, j);
      profit_[cols_] += cb * rhs(r);
    }
  }

  double objective() const { return profit_[cols_]; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    for (std::size_t j = 0; j <= cols_; ++j) at(pr, j) *= inv;
    at(pr, pc) = 1.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(r, j) -= f * at(pr, j);
      at(r, pc) = 0.0;
    }
    const double f = profit_[pc];
    if (f != 0.0) {
      for (std::size_t j = 0; j < cols_; ++j) profit_[j] -= f * at(pr, j);
      profit_[cols_] += f * rhs(pr);
      profit_[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

  enum class Outcome { optimal, unbounded };

  // Bland's rule: lowest-index improving column enters; ratio ties leave by
  // lowest basic index.
  Outcome optimize(const std::vector<bool>& allowed, double pivot_tolerance) {
    for (std::size_t iter = 0; iter < kMaxPivots; ++iter) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (allowed[j] && profit_[j] > kOptimalityTolerance) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return Outcome::optimal;

      std::size_t leave = rows_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        const double coef = at(r, enter);
        if (coef <= pivot_tolerance) continue;
        const double ratio = std::max(rhs(r), 0.0) / coef;
        if (leave == rows_ || ratio < best_ratio - 1e-14 ||
            (ratio <= best_ratio + 1e-14 && basis_[r] < basis_[leave])) {
          best_ratio = std::min(best_ratio, ratio);
          leave = r;
        }
      }
      if (leave == rows_) return Outcome::unbounded;
      pivot(leave, enter);
    }
    throw Error("simplex pivot limit exceeded");
  }

  void drop_row(std::size_t r) {
    a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(r * (cols_ + 1)),
             a_.begin() + static_cast<std::ptrdiff_t>((r + 1) * (cols_ + 1)));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --rows_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> a_;
  std::vector<std::size_t> basis_;
  std::vector<double> profit_;
};

void check_shape(const LinearProgram& program) {
  const std::size_t n = program.variables();
  if (n == 0) throw DimensionError("linear program without variables");
  if (program.equalities.empty() && program.inequalities.empty()) {
    throw DomainError("linear program needs at least one constraint");
  }
  for (const auto& c : program.equalities) {
    if (c.row.size() != n) throw DimensionError("equality row length mismatch");
  }
  for (const auto& c : program.inequalities) {
    if (c.row.size() != n) throw DimensionError("inequality row length mismatch");
  }
}

}  // namespace

LpResult lp_maximize(const LinearProgram& program, const LpTolerances& tol) {
  check_shape(program);
  const std::size_t n = program.variables();
  const std::size_t me = program.equalities.size();
  const std::size_t mi = program.inequalities.size();
  const std::size_t m = me + mi;

  // Rows needing an artificial: every equality, and inequalities with h < 0.
  std::vector<bool> needs_artificial(m, false);
  std::size_t n_art = 0;
  for (std::size_t r = 0; r < m; ++r) {
    const bool eq = r < me;
    const double b = eq ? program.equalities[r].value : program.inequalities[r - me].value;
    needs_artificial[r] = eq || b < 0.0;
    if (needs_artificial[r]) ++n_art;
  }
  const std::size_t slack0 = n;
  const std::size_t art0 = n + mi;
  const std::size_t cols = n + mi + n_art;

  Tableau t(m, cols);
  std::size_t next_art = art0;
  for (std::size_t r = 0; r < m; ++r) {
    const bool eq = r < me;
    const Constraint& c = eq ? program.equalities[r] : program.inequalities[r - me];
    const double sign = c.value < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t.at(r, j) = sign * c.row[j];
    if (!eq) t.at(r, slack0 + (r - me)) = sign;
    t.rhs(r) = sign * c.value;
    if (needs_artificial[r]) {
      t.at(r, next_art) = 1.0;
      t.basis()[r] = next_art++;
    } else {
      t.basis()[r] = slack0 + (r - me);
    }
  }

  std::vector<bool> allowed(cols, true);
  LpResult result;

  if (n_art > 0) {
    std::vector<double> phase1(cols, 0.0);
    for (std::size_t j = art0; j < cols; ++j) phase1[j] = -1.0;
    t.price(phase1);
    t.optimize(allowed, tol.pivot);
    if (t.objective() < -tol.feasibility) {
      result.status = LpStatus::infeasible;
      return result;
    }
    // Drive remaining (zero-valued) artificials out of the basis; rows where
    // that is impossible are linearly dependent and dropped.
    for (std::size_t r = 0; r < t.rows();) {
      if (t.basis()[r] < art0) {
        ++r;
        continue;
      }
      std::size_t col = cols;
      double best = tol.pivot;
      for (std::size_t j = 0; j < art0; ++j) {
        if (std::abs(t.at(r, j)) > best) {
          best = std::abs(t.at(r, j));
          col = j;
        }
      }
      if (col == cols) {
        t.drop_row(r);
      } else {
        t.pivot(r, col);
        ++r;
      }
    }
    for (std::size_t j = art0; j < cols; ++j) allowed[j] = false;
  }

  std::vector<double> cost(cols, 0.0);
  std::copy(program.objective.begin(), program.objective.end(), cost.begin());
  t.price(cost);
  if (t.optimize(allowed, tol.pivot) == Tableau::Outcome::unbounded) {
    result.status = LpStatus::unbounded;
    return result;
  }

  result.status = LpStatus::optimal;
  result.x.assign(n, 0.0);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (t.basis()[r] < n) result.x[t.basis()[r]] = std::max(t.rhs(r), 0.0);
  }
  result.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) result.value += program.objective[j] * result.x[j];
  return result;
}

}  // namespace fairprice::lp
