#include "fairprice/reference.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "fairprice/errors.hpp"

namespace fairprice::reference {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

double det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

double brute_force_fair_revenue(const MarketConfig& market, double step) {
  if (market.grid.size() != 3) throw DimensionError("brute force oracle supports d = 3 only");
  const auto& v = market.grid;
  const auto f1 = market.model.curve(Group::one);
  const auto f2 = market.model.curve(Group::two);
  const double q = market.q;

  double best = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    best = std::max(best, v[i] * (q * f1[i] + (1.0 - q) * f2[i]));
  }

  const auto n = static_cast<long>(std::llround(1.0 / step));
  for (long a = 0; a <= n; ++a) {
    for (long b = 0; a + b <= n; ++b) {
      const double p[3] = {static_cast<double>(a) / n, static_cast<double>(b) / n,
                           static_cast<double>(n - a - b) / n};
      double mass = 0.0, paid = 0.0, mean = 0.0;
      for (int i = 0; i < 3; ++i) {
        mass += f1[i] * p[i];
        paid += v[i] * f1[i] * p[i];
        mean += v[i] * p[i];
      }
      if (mass <= 0.0) continue;
      const double s = paid / mass;
      // Rows: simplex, proposed mean, accepted mean.
      const Mat3 m = {{{1.0, 1.0, 1.0}, {v[0], v[1], v[2]},
                       {(v[0] - s) * f2[0], (v[1] - s) * f2[1], (v[2] - s) * f2[2]}}};
      const double det = det3(m);
      if (std::abs(det) < 1e-14) continue;
      const std::array<double, 3> rhs = {1.0, mean, 0.0};
      double p2[3];
      bool ok = true;
      for (int c = 0; c < 3; ++c) {
        Mat3 mc = m;
        for (int r = 0; r < 3; ++r) mc[r][c] = rhs[r];
        p2[c] = det3(mc) / det;
        if (p2[c] < -1e-12) ok = false;
      }
      if (!ok) continue;
      double rev2 = 0.0;
      for (int i = 0; i < 3; ++i) rev2 += v[i] * f2[i] * std::max(p2[i], 0.0);
      best = std::max(best, q * paid + (1.0 - q) * rev2);
    }
  }
  return best;
}

namespace {

std::size_t draw(const GroupDistribution& dist, Rng& rng) {
  double u = rng.uniform();
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (u < dist[i]) return i;
    u -= dist[i];
  }
  return dist.size() - 1;
}

MonteCarloEstimate summarize(double sum, double sum_sq, std::int64_t n) {
  MonteCarloEstimate e;
  if (n == 0) return e;
  const double nn = static_cast<double>(n);
  e.mean = sum / nn;
  const double var = std::max(0.0, sum_sq / nn - e.mean * e.mean);
  e.std_error = std::sqrt(var / nn);
  return e;
}

}  // namespace

MonteCarloEstimate simulate_revenue(const PolicyPair& policy, const MarketConfig& market,
                                    std::int64_t samples, Rng& rng) {
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t t = 0; t < samples; ++t) {
    const Group g = rng.uniform() < market.q ? Group::one : Group::two;
    const std::size_t i = draw(policy[g], rng);
    // Latent valuation quantile: the customer buys iff u < F_e(i).
    const double r = rng.uniform() < market.model.accept(g, i) ? market.grid[i] : 0.0;
    sum += r;
    sum_sq += r * r;
  }
  return summarize(sum, sum_sq, samples);
}

MonteCarloEstimate simulate_accepted_price(const GroupDistribution& dist, std::span<const double> accept,
                                           const PriceGrid& grid, std::int64_t samples, Rng& rng) {
  double sum = 0.0, sum_sq = 0.0;
  std::int64_t n = 0;
  for (std::int64_t t = 0; t < samples; ++t) {
    const std::size_t i = draw(dist, rng);
    if (rng.uniform() < accept[i]) {
      sum += grid[i];
      sum_sq += grid[i] * grid[i];
      ++n;
    }
  }
  return summarize(sum, sum_sq, n);
}

GroupDistribution random_distribution(Rng& rng, std::size_t d) {
  std::vector<double> w(d);
  for (auto& x : w) x = -std::log(1.0 - rng.uniform());
  // Occasionally zero out entries so boundary policies are covered.
  if (rng.uniform() < 0.3) w[static_cast<std::size_t>(rng.uniform() * static_cast<double>(d))] = 0.0;
  double total = 0.0;
  for (double x : w) total += x;
  if (total <= 0.0) return GroupDistribution::point_mass(d, 0);
  for (auto& x : w) x /= total;
  return GroupDistribution::normalized(std::move(w));
}

PolicyPair random_policy(Rng& rng, std::size_t d) {
  auto a = random_distribution(rng, d);
  auto b = random_distribution(rng, d);
  return PolicyPair(std::move(a), std::move(b));
}

MarketConfig random_market(Rng& rng, std::size_t d, double floor) {
  std::vector<double> prices;
  while (prices.size() < d) {
    prices.clear();
    for (std::size_t i = 0; i < d; ++i) prices.push_back(rng.uniform(0.1, 1.0));
    std::sort(prices.begin(), prices.end());
    prices.erase(std::unique(prices.begin(), prices.end()), prices.end());
  }
  auto curve = [&] {
    std::vector<double> c(d);
    for (auto& x : c) x = rng.uniform(floor, 1.0);
    std::sort(c.begin(), c.end(), std::greater<>());
    return c;
  };
  auto f1 = curve();
  auto f2 = curve();
  const double q = rng.uniform(0.1, 0.9);
  return MarketConfig(PriceGrid(std::move(prices)), AcceptanceModel(std::move(f1), std::move(f2), floor), q);
}

lp::LinearProgram random_lp(Rng& rng, std::size_t variables) {
  lp::LinearProgram prog;
  prog.objective.resize(variables);
  for (auto& c : prog.objective) c = rng.uniform(-1.0, 1.0);
  auto row = [&] {
    std::vector<double> r(variables);
    for (auto& x : r) x = rng.uniform(-1.0, 1.0);
    return r;
  };
  prog.inequalities.push_back({std::vector<double>(variables, 1.0), rng.uniform(0.5, 3.0)});
  const auto n_eq = static_cast<std::size_t>(rng.uniform() * 3.0);
  const auto n_ineq = static_cast<std::size_t>(rng.uniform() * 5.0);
  for (std::size_t k = 0; k < n_eq; ++k) prog.equalities.push_back({row(), rng.uniform(-0.5, 1.0)});
  for (std::size_t k = 0; k < n_ineq; ++k) prog.inequalities.push_back({row(), rng.uniform(-0.5, 1.0)});
  return prog;
}

}  // namespace fairprice::reference
