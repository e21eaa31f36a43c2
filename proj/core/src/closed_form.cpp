#include "fairprice/closed_form.hpp"

#include <algorithm>
#include <cmath>

#include "fairprice/errors.hpp"

namespace fairprice::closed_form {
namespace {

constexpr double kPoleTolerance = 1e-15;

void check_family_eps(double eps) {
  if (!(eps >= 0.0 && eps < 0.5)) {
    throw DomainError("eps must lie in [0, 0.5)");
  }
}

void check_accepted_price(double vs) {
  if (std::abs(vs - 0.625) < kPoleTolerance || std::abs(vs - 1.0) < kPoleTolerance) {
    throw PoleError("V_s at a pole of the closed form (5/8 or 1)");
  }
  if (!(vs > 0.625 && vs < 1.0)) {
    throw DomainError("V_s must lie in (5/8, 1)");
  }
}

double safe_div(double num, double den) {
  if (std::abs(den) < kPoleTolerance) throw PoleError("closed-form denominator vanishes");
  return num / den;
}

}  // namespace

ExampleOptimum closed_form_example_optimum(double eps) {
  if (eps < 0.0) throw DomainError("eps must be nonnegative");
  if (eps > kMaxEps) throw DomainError("eps above the supported range [0, 0.01]");
  const double den = 29.0 - 10.0 * eps;
  std::vector<double> p1 = {(20.0 - 40.0 * eps) / den, 0.0, (9.0 + 30.0 * eps) / den};
  std::vector<double> p2 = {0.0, (25.0 - 50.0 * eps) / den, (4.0 + 40.0 * eps) / den};
  ExampleOptimum out{PolicyPair(GroupDistribution::normalized(std::move(p1)),
                                GroupDistribution::normalized(std::move(p2))),
                     0.0, 0.0, 0.0, eps > kProvenEps};
  out.revenue = 37.0 * (1.0 - 2.0 * eps) * (4.0 + 5.0 * eps) / (10.0 * den);
  out.accepted_price = (8.0 + 10.0 * eps) / (11.0 + 10.0 * eps);
  out.gap = 3.0 * (1.0 + 10.0 * eps) * (3.0 + 10.0 * eps) / (2.0 * den * (11.0 + 10.0 * eps));
  return out;
}

double example_revenue_surface(double eps, double vs, double alpha) {
  check_family_eps(eps);
  check_accepted_price(vs);
  if (alpha < 0.0) throw DomainError("alpha must be nonnegative");
  const double slope = ((100.0 - 60.0 * eps) - (142.0 - 60.0 * eps) * vs) /
                       (25.0 * (8.0 * vs - 5.0) * (1.0 - vs));
  return (71.0 - 30.0 * eps) / 100.0 * vs + slope * vs * alpha;
}

double AlphaBounds::lower() const noexcept { return std::max({b2, b3, 0.0}); }
double AlphaBounds::upper() const noexcept { return std::min(b1, b4); }

AlphaBounds alpha_bounds(double eps, double vs) {
  check_family_eps(eps);
  check_accepted_price(vs);
  const double a = 1.0 + 10.0 * eps;
  const double b = 3.0 + 10.0 * eps;
  AlphaBounds out;
  out.b1 = safe_div(a * (8.0 * vs - 5.0) * (1.0 - vs), a * 8.0 * vs + 10.0 * (1.0 - 8.0 * eps));
  out.b2 = safe_div(a * (8.0 * vs - 5.0) * (7.0 - 10.0 * vs), a * 8.0 * vs - 2.0 * (1.0 + 28.0 * eps)) / 10.0;
  out.b3 = safe_div(b * (10.0 * vs - 7.0) * (1.0 - vs), b * 10.0 * vs - (6.0 + 100.0 * eps));
  out.b4 = safe_div(b * (8.0 * vs - 5.0) * (1.0 - vs), b * 8.0 * vs - 80.0 * eps);
  return out;
}

lp::LinearSystem example_system(Group group, double eps, double vs, double alpha) {
  check_family_eps(eps);
  const double v[3] = {0.625, 0.7, 1.0};
  const double f1[3] = {0.6, 0.5 - eps, 0.5 - eps};
  const double f2[3] = {0.8, 0.8, 0.5 - eps};
  const double* f = group == Group::one ? f1 : f2;
  lp::LinearSystem sys;
  sys.matrix = {{1.0, 1.0, 1.0}, {v[0], v[1], v[2]}, {0.0, 0.0, 0.0}};
  for (int i = 0; i < 3; ++i) sys.matrix[2][i] = (v[i] - vs) * f[i];
  sys.rhs = {1.0, vs + alpha, 0.0};
  return sys;
}

std::pair<std::vector<double>, std::vector<double>> example_policy_weights(double eps, double vs,
                                                                           double alpha) {
  return {lp::solve_linear_system(example_system(Group::one, eps, vs, alpha)),
          lp::solve_linear_system(example_system(Group::two, eps, vs, alpha))};
}

double example_proposed_mean_gap(double eps) {
  return 360.0 * eps / (29.0 * (29.0 - 10.0 * eps));
}

}  // namespace fairprice::closed_form
