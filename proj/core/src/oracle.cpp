#include "fairprice/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "fairprice/errors.hpp"

namespace fairprice::oracle {
namespace {

constexpr double kPrimaryTie = 1e-9;
constexpr double kSecondaryTie = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// A fair-policy search over x = (pi^1, pi^2) in R^{2d}. For each scanned
// accepted price V_s, Group 1's accepted mean is pinned to V_s and Group 2's
// accepted mean to [V_s - band, V_s + band] under `model`; all of these are
// linear in x once V_s is fixed, so every scan point is one exact LP.
struct ScanProblem {
  const PriceGrid* grid = nullptr;
  const AcceptanceModel* model = nullptr;
  double band = 0.0;
  std::vector<lp::Constraint> extra;   // additional G x <= h rows (ledger floors)
  std::vector<double> primary;         // objective
  std::vector<double> secondary;       // lexicographic tie-break objective, may be empty
  std::function<bool(const PolicyPair&)> admissible;  // rejection filter, may be empty
};

struct Candidate {
  std::optional<PolicyPair> policy;
  double primary = kNegInf;
  double secondary = kNegInf;
  bool fixed_price = false;
};

double dot(const std::vector<double>& a, const PolicyPair& p) {
  const std::size_t d = p.size();
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) s += a[i] * p.group1()[i] + a[d + i] * p.group2()[i];
  return s;
}

bool lexicographic_greater(const PolicyPair& a, const PolicyPair& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.group1()[i] != b.group1()[i]) return a.group1()[i] > b.group1()[i];
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.group2()[i] != b.group2()[i]) return a.group2()[i] > b.group2()[i];
  }
  return false;
}

// Strict "a beats b": primary, then secondary, then fixed-price, then
// lexicographic weights.
bool better(const Candidate& a, const Candidate& b) {
  if (!a.policy) return false;
  if (!b.policy) return true;
  if (a.primary > b.primary + kPrimaryTie) return true;
  if (a.primary < b.primary - kPrimaryTie) return false;
  if (a.secondary > b.secondary + kSecondaryTie) return true;
  if (a.secondary < b.secondary - kSecondaryTie) return false;
  if (a.fixed_price != b.fixed_price) return a.fixed_price;
  return lexicographic_greater(*a.policy, *b.policy);
}

Candidate score(const ScanProblem& prob, PolicyPair policy, bool fixed_price) {
  Candidate c;
  if (prob.admissible && !prob.admissible(policy)) return c;
  c.primary = dot(prob.primary, policy);
  c.secondary = prob.secondary.empty() ? 0.0 : dot(prob.secondary, policy);
  c.fixed_price = fixed_price;
  c.policy = std::move(policy);
  return c;
}

lp::LinearProgram fair_program(const ScanProblem& prob, double vs) {
  const PriceGrid& grid = *prob.grid;
  const std::size_t d = grid.size();
  const std::size_t n = 2 * d;
  lp::LinearProgram program;
  program.objective = prob.primary;

  auto row = [n] { return std::vector<double>(n, 0.0); };
  lp::Constraint sum1{row(), 1.0}, sum2{row(), 1.0}, proc{row(), 0.0}, acc1{row(), 0.0};
  for (std::size_t i = 0; i < d; ++i) {
    sum1.row[i] = 1.0;
    sum2.row[d + i] = 1.0;
    proc.row[i] = grid[i];
    proc.row[d + i] = -grid[i];
    acc1.row[i] = (grid[i] - vs) * prob.model->accept(Group::one, i);
  }
  program.equalities = {std::move(sum1), std::move(sum2), std::move(proc), std::move(acc1)};

  const auto f2 = prob.model->curve(Group::two);
  if (prob.band == 0.0) {
    lp::Constraint acc2{row(), 0.0};
    for (std::size_t i = 0; i < d; ++i) acc2.row[d + i] = (grid[i] - vs) * f2[i];
    program.equalities.push_back(std::move(acc2));
  } else {
    // -band * 1'F2 pi2 <= (v - vs)'F2 pi2 <= band * 1'F2 pi2
    lp::Constraint upper{row(), 0.0}, lower{row(), 0.0};
    for (std::size_t i = 0; i < d; ++i) {
      upper.row[d + i] = (grid[i] - vs - prob.band) * f2[i];
      lower.row[d + i] = -(grid[i] - vs + prob.band) * f2[i];
    }
    program.inequalities.push_back(std::move(upper));
    program.inequalities.push_back(std::move(lower));
  }
  for (const auto& c : prob.extra) program.inequalities.push_back(c);
  return program;
}

std::optional<PolicyPair> to_policy(const std::vector<double>& x, std::size_t d) {
  try {
    return PolicyPair(GroupDistribution::normalized({x.begin(), x.begin() + d}),
                      GroupDistribution::normalized({x.begin() + d, x.end()}));
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

Candidate solve_at(const ScanProblem& prob, double vs) {
  lp::LinearProgram program = fair_program(prob, vs);
  lp::LpResult res = lp::lp_maximize(program);
  if (!res.optimal()) return {};
  if (!prob.secondary.empty()) {
    lp::Constraint keep;
    keep.row.resize(prob.primary.size());
    for (std::size_t j = 0; j < keep.row.size(); ++j) keep.row[j] = -prob.primary[j];
    keep.value = -(res.value - kPrimaryTie);
    program.inequalities.push_back(std::move(keep));
    program.objective = prob.secondary;
    lp::LpResult second = lp::lp_maximize(program);
    if (second.optimal()) res = std::move(second);
  }
  auto policy = to_policy(res.x, prob.grid->size());
  if (!policy) return {};
  return score(prob, std::move(*policy), false);
}

// Coarse scan of V_s over [v_1, v_d] (plus every grid price, where the
// fixed-price policies live), then repeated x10 refinement around the best
// local maxima.
Candidate scan(const ScanProblem& prob, const OracleConfig& cfg) {
  if (cfg.grid_steps_vs < 1 || cfg.refine_iters < 0) {
    throw DomainError("oracle scan resolution must be positive");
  }
  const PriceGrid& grid = *prob.grid;
  const double lo = grid.lowest();
  const double hi = grid.highest();
  const int steps = cfg.grid_steps_vs;
  const double step = (hi - lo) / steps;

  std::vector<double> points;
  points.reserve(static_cast<std::size_t>(steps) + 1 + grid.size());
  for (int k = 0; k <= steps; ++k) points.push_back(k == steps ? hi : lo + step * k);
  for (double v : grid.prices()) points.push_back(v);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  std::vector<Candidate> coarse;
  coarse.reserve(points.size());
  Candidate best;
  for (double vs : points) {
    coarse.push_back(solve_at(prob, vs));
    if (better(coarse.back(), best)) best = coarse.back();
  }

  // Local maxima of the primary score, best first.
  std::vector<std::size_t> peaks;
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    if (!coarse[k].policy) continue;
    const bool left_ok = k == 0 || !coarse[k - 1].policy || coarse[k - 1].primary <= coarse[k].primary;
    const bool right_ok =
        k + 1 == coarse.size() || !coarse[k + 1].policy || coarse[k + 1].primary <= coarse[k].primary;
    if (left_ok && right_ok) peaks.push_back(k);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) {
    return better(coarse[a], coarse[b]);
  });
  if (peaks.size() > static_cast<std::size_t>(std::max(cfg.refine_candidates, 0))) {
    peaks.resize(static_cast<std::size_t>(std::max(cfg.refine_candidates, 0)));
  }

  for (std::size_t k : peaks) {
    double center = points[k];
    Candidate local = coarse[k];
    double half = step;
    for (int it = 0; it < cfg.refine_iters; ++it) {
      const double fine = half / 10.0;
      double next_center = center;
      for (int j = -10; j <= 10; ++j) {
        const double vs = center + fine * j;
        if (j == 0 || vs < lo || vs > hi) continue;
        Candidate c = solve_at(prob, vs);
        if (better(c, local)) {
          local = std::move(c);
          next_center = vs;
        }
      }
      center = next_center;
      half = fine;
    }
    if (better(local, best)) best = std::move(local);
  }
  return best;
}

std::vector<double> revenue_objective(const PriceGrid& grid, const AcceptanceModel& model,
                                      double q) {
  const std::size_t d = grid.size();
  std::vector<double> c(2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    c[i] = q * grid[i] * model.accept(Group::one, i);
    c[d + i] = (1.0 - q) * grid[i] * model.accept(Group::two, i);
  }
  return c;
}

// -R(pi; fhat) <= -floor
std::vector<lp::Constraint> floor_rows(const EliminationLedger& ledger, const PriceGrid& grid,
                                       double q) {
  std::vector<lp::Constraint> rows;
  for (const auto& entry : ledger.entries()) {
    lp::Constraint c;
    c.row = revenue_objective(grid, entry.fhat, q);
    for (double& v : c.row) v = -v;
    c.value = -entry.revenue_floor;
    rows.push_back(std::move(c));
  }
  return rows;
}

OracleSolution finish(Candidate best, const MarketConfig& market) {
  if (!best.policy) {
    throw Error("oracle scan found no feasible policy");
  }
  OracleSolution out{std::move(*best.policy), 0.0, {}};
  out.revenue = expected_revenue(out.policy, market);
  out.params = locate(out.policy, market);
  return out;
}

OracleSolution solve_banded(const MarketConfig& market, double band, const OracleConfig& cfg) {
  ScanProblem prob;
  prob.grid = &market.grid;
  prob.model = &market.model;
  prob.band = band;
  prob.primary = revenue_objective(market.grid, market.model, market.q);

  Candidate best = scan(prob, cfg);
  for (std::size_t i = 0; i < market.grid.size(); ++i) {
    Candidate c = score(prob, PolicyPair::fixed_price(market.grid.size(), i), true);
    if (better(c, best)) best = std::move(c);
  }
  return finish(std::move(best), market);
}

}  // namespace

ParamPoint locate(const PolicyPair& policy, const MarketConfig& market) {
  const auto f1 = market.model.curve(Group::one);
  const auto f2 = market.model.curve(Group::two);
  ParamPoint p;
  p.accepted_price = expected_accepted_price(policy.group1(), f1, market.grid);
  p.gap = proposed_mean(policy.group1(), market.grid) - p.accepted_price;
  p.group_shift = expected_accepted_price(policy.group2(), f2, market.grid) - p.accepted_price;
  return p;
}

lp::LinearProgram group_subproblem(const MarketConfig& market, Group group, double accepted_price,
                                   double gap) {
  const std::size_t d = market.grid.size();
  const auto f = market.model.curve(group);
  lp::LinearProgram program;
  program.objective.resize(d);
  lp::Constraint simplex{std::vector<double>(d, 1.0), 1.0};
  lp::Constraint mean{std::vector<double>(d), accepted_price + gap};
  lp::Constraint accepted{std::vector<double>(d), 0.0};
  for (std::size_t i = 0; i < d; ++i) {
    program.objective[i] = market.grid[i] * f[i];
    mean.row[i] = market.grid[i];
    accepted.row[i] = (market.grid[i] - accepted_price) * f[i];
  }
  program.equalities = {std::move(simplex), std::move(mean), std::move(accepted)};
  return program;
}

OracleSolution solve_fair_optimal(const MarketConfig& market, const OracleConfig& cfg) {
  return solve_banded(market, 0.0, cfg);
}

OracleSolution solve_relaxed_optimal(const MarketConfig& market, double delta,
                                     const OracleConfig& cfg) {
  if (!(delta >= 0.0)) {
    throw DomainError("relaxation delta must be nonnegative");
  }
  return solve_banded(market, delta, cfg);
}

std::optional<OracleSolution> empirical_optimizer(const AcceptanceModel& fhat, double q,
                                                  const PriceGrid& grid, double delta_s,
                                                  const EliminationLedger& ledger,
                                                  const OracleConfig& cfg,
                                                  const PolicyPair* incumbent) {
  if (!(delta_s >= 0.0)) {
    throw DomainError("delta_s must be nonnegative");
  }
  const MarketConfig estimated(grid, fhat, q);
  ScanProblem prob;
  prob.grid = &grid;
  prob.model = &fhat;
  prob.band = delta_s;
  prob.extra = floor_rows(ledger, grid, q);
  prob.primary = revenue_objective(grid, fhat, q);
  // Floors are exact LP rows; the historical S constraints are not linear
  // under the current parametrization and are enforced by rejection.
  prob.admissible = [&](const PolicyPair& p) {
    if (procedural_unfairness(p, grid) > kProceduralTolerance) return false;
    if (substantive_unfairness(p, estimated) > delta_s + kMembershipSlack) return false;
    return member(p, ledger, grid, q);
  };

  Candidate best = scan(prob, cfg);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Candidate c = score(prob, PolicyPair::fixed_price(grid.size(), i), true);
    if (better(c, best)) best = std::move(c);
  }
  if (incumbent != nullptr && incumbent->size() == grid.size()) {
    Candidate c = score(prob, *incumbent, false);
    if (better(c, best)) best = std::move(c);
  }
  if (!best.policy) return std::nullopt;
  return finish(std::move(best), estimated);
}

std::optional<ProbabilityMaximizer> max_probability_policy(
    std::size_t price_index, Group group, const EliminationLedger& ledger,
    const AcceptanceModel* fhat_latest, double delta_s, const PriceGrid& grid, double q,
    const OracleConfig& cfg) {
  const std::size_t d = grid.size();
  if (price_index >= d) {
    throw DimensionError("price index out of range");
  }
  if (fhat_latest == nullptr && !ledger.empty()) {
    fhat_latest = &ledger.back().fhat;
    delta_s = ledger.back().delta_s;
  }
  const std::size_t var = group_index(group) * d + price_index;

  if (ledger.empty()) {
    // Pi_1 = Pi: the fixed price on v_i attains probability one.
    PolicyPair fixed = PolicyPair::fixed_price(d, price_index);
    if (fhat_latest == nullptr) return ProbabilityMaximizer{std::move(fixed), 1.0};
    // Among pi^e = e_i, let the other group maximize revenue at mean v_i.
    const MarketConfig estimated(grid, *fhat_latest, q);
    const Group other = group == Group::one ? Group::two : Group::one;
    lp::LinearProgram program;
    program.objective.resize(d);
    lp::Constraint simplex{std::vector<double>(d, 1.0), 1.0};
    lp::Constraint mean{std::vector<double>(grid.prices().begin(), grid.prices().end()), grid[price_index]};
    for (std::size_t i = 0; i < d; ++i) program.objective[i] = grid[i] * fhat_latest->accept(other, i);
    program.equalities = {std::move(simplex), std::move(mean)};
    lp::LpResult res = lp::lp_maximize(program);
    PolicyPair best = fixed;
    if (res.optimal()) {
      GroupDistribution mine = GroupDistribution::point_mass(d, price_index);
      GroupDistribution theirs = GroupDistribution::normalized(res.x);
      PolicyPair alt = group == Group::one ? PolicyPair(mine, theirs) : PolicyPair(theirs, mine);
      if (procedural_unfairness(alt, grid) <= kProceduralTolerance &&
          expected_revenue(alt, estimated) > expected_revenue(fixed, estimated) + kSecondaryTie) {
        best = std::move(alt);
      }
    }
    return ProbabilityMaximizer{std::move(best), 1.0};
  }

  ScanProblem prob;
  prob.grid = &grid;
  prob.model = fhat_latest;
  prob.band = delta_s;
  prob.extra = floor_rows(ledger, grid, q);
  prob.primary.assign(2 * d, 0.0);
  prob.primary[var] = 1.0;
  prob.secondary = revenue_objective(grid, *fhat_latest, q);
  prob.admissible = [&](const PolicyPair& p) {
    if (procedural_unfairness(p, grid) > kProceduralTolerance) return false;
    return member(p, ledger, grid, q);
  };

  Candidate best = scan(prob, cfg);
  Candidate fixed = score(prob, PolicyPair::fixed_price(d, price_index), true);
  if (better(fixed, best)) best = std::move(fixed);
  if (!best.policy) return std::nullopt;
  const double achieved = (*best.policy)[group][price_index];
  return ProbabilityMaximizer{std::move(*best.policy), achieved};
}

}  // namespace fairprice::oracle
