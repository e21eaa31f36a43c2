#include "fairprice/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fairprice/closed_form.hpp"
#include "fairprice/config_doc.hpp"
#include "fairprice/errors.hpp"
#include "fairprice/experiment.hpp"
#include "fairprice/markets.hpp"
#include "fairprice/oracle.hpp"
#include "fairprice/reference.hpp"
#include "fairprice/simulator.hpp"
#include "fairprice/trace_io.hpp"

namespace fairprice::validation {

namespace {

using Clock = std::chrono::steady_clock;

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

template <typename Body>
CriterionResult timed(int id, std::string name, Body body) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  const auto start = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

struct MaxError {
  double value = 0.0;
  std::string where;
  void update(double err, const std::string& label) {
    if (!(err <= value)) {
      value = err;
      where = label;
    }
  }
};

}  // namespace

CriterionResult closed_form_golden() {
  return timed(1, "closed-form golden values", [](CriterionResult& r) {
    const auto opt = closed_form::closed_form_example_optimum(0.0);
    MaxError err;
    const double g1[3] = {20.0 / 29.0, 0.0, 9.0 / 29.0};
    const double g2[3] = {0.0, 25.0 / 29.0, 4.0 / 29.0};
    for (std::size_t i = 0; i < 3; ++i) {
      err.update(std::abs(opt.policy.group1()[i] - g1[i]), "pi1");
      err.update(std::abs(opt.policy.group2()[i] - g2[i]), "pi2");
    }
    err.update(std::abs(opt.revenue - 74.0 / 145.0), "revenue");
    err.update(std::abs(opt.accepted_price - 8.0 / 11.0), "V_s");
    err.update(std::abs(opt.accepted_price + opt.gap - 43.0 / 58.0), "V_s+alpha");
    r.passed = err.value <= 1e-12;
    r.detail = "max error " + sci(err.value) + (err.where.empty() ? "" : " at " + err.where) + " (tol 1e-12)";
  });
}

CriterionResult oracle_matches_closed_form() {
  return timed(2, "oracle vs closed form", [](CriterionResult& r) {
    MaxError rev, pol;
    for (double eps : {0.0, 1e-4, 1e-3, 1e-2}) {
      const auto sol = oracle::solve_fair_optimal(sim::example_eps_market(eps));
      const auto cf = closed_form::closed_form_example_optimum(eps);
      rev.update(std::abs(sol.revenue - cf.revenue), "eps=" + sci(eps));
      pol.update(sol.policy.distance_linf(cf.policy), "eps=" + sci(eps));
    }
    r.passed = rev.value <= 1e-4 && pol.value <= 1e-3;
    r.detail = "revenue error " + sci(rev.value) + " (" + rev.where + ", tol 1e-4), policy Linf " + sci(pol.value) +
               " (" + pol.where + ", tol 1e-3)";
  });
}

CriterionResult surface_consistency() {
  return timed(3, "revenue surface consistency", [](CriterionResult& r) {
    Rng rng(3, Stream::instance);
    MaxError err;
    int samples = 0, draws = 0;
    while (samples < 50 && draws < 100000) {
      ++draws;
      const double eps = rng.uniform(0.0, closed_form::kMaxEps);
      const double vs = rng.uniform(0.63, 0.99);
      const auto bounds = closed_form::alpha_bounds(eps, vs);
      if (!(bounds.lower() <= bounds.upper())) continue;
      const double alpha = rng.uniform(bounds.lower(), bounds.upper());
      const auto [w1, w2] = closed_form::example_policy_weights(eps, vs, alpha);
      if (*std::min_element(w1.begin(), w1.end()) < -1e-12 || *std::min_element(w2.begin(), w2.end()) < -1e-12) {
        err.update(1.0, "weights outside simplex at V_s=" + sci(vs));
        ++samples;
        continue;
      }
      const PolicyPair policy(GroupDistribution::normalized(w1), GroupDistribution::normalized(w2));
      const MarketConfig market = sim::example_eps_market(eps);
      const std::string at = "V_s=" + sci(vs) + " alpha=" + sci(alpha);
      err.update(procedural_unfairness(policy, market.grid), "U " + at);
      err.update(substantive_unfairness(policy, market), "S " + at);
      for (Group g : {Group::one, Group::two}) {
        err.update(std::abs(proposed_mean(policy[g], market.grid) - (vs + alpha)), "proposed mean " + at);
        err.update(std::abs(expected_accepted_price(policy[g], market.model.curve(g), market.grid) - vs),
                   "accepted mean " + at);
      }
      err.update(std::abs(expected_revenue(policy, market) - closed_form::example_revenue_surface(eps, vs, alpha)),
                 "revenue " + at);
      ++samples;
    }
    r.passed = samples == 50 && err.value <= 1e-9;
    r.detail = std::to_string(samples) + " samples, max error " + sci(err.value) +
               (err.where.empty() ? "" : " (" + err.where + ")") + " (tol 1e-9)";
  });
}

CriterionResult brute_force_equivalence() {
  return timed(4, "brute-force equivalence", [](CriterionResult& r) {
    Rng rng(4, Stream::instance);
    MaxError err;
    for (int k = 0; k < 20; ++k) {
      const MarketConfig market = reference::random_market(rng, 3);
      const double oracle = oracle::solve_fair_optimal(market).revenue;
      const double brute = reference::brute_force_fair_revenue(market, 1e-3);
      err.update(std::abs(oracle - brute), "market " + std::to_string(k));
    }
    r.passed = err.value <= 2e-3;
    r.detail = "20 markets, max |oracle - brute force| " + sci(err.value) + " (" + err.where + ", tol 2e-3)";
  });
}

CriterionResult lp_kernel_agreement() {
  return timed(5, "LP kernel vs vertex enumeration", [](CriterionResult& r) {
    Rng rng(5, Stream::instance);
    MaxError err;
    int infeasible = 0, mismatched = 0;
    for (int k = 0; k < 500; ++k) {
      const auto n = 2 + static_cast<std::size_t>(rng.uniform() * 4.0);
      const auto prog = reference::random_lp(rng, n);
      const auto simplex = lp::lp_maximize(prog);
      const auto vertex = lp::vertex_enumerate(prog);
      if (simplex.optimal() != vertex.optimal()) {
        ++mismatched;
        continue;
      }
      if (!simplex.optimal()) {
        ++infeasible;
        continue;
      }
      const std::string at = "lp " + std::to_string(k);
      err.update(std::abs(simplex.value - vertex.value), at);
      err.update(lp::max_violation(prog, simplex.x) > 1e-9 ? 1.0 : 0.0, at + " simplex point infeasible");
      err.update(lp::max_violation(prog, vertex.x) > 1e-9 ? 1.0 : 0.0, at + " vertex point infeasible");
    }
    r.passed = mismatched == 0 && err.value <= 1e-8;
    r.detail = "500 LPs (" + std::to_string(infeasible) + " infeasible), verdict mismatches " +
               std::to_string(mismatched) + ", max value gap " + sci(err.value) + " (tol 1e-8)";
  });
}

namespace {

// FPA run configurations covering presets, modes, and horizons.
struct FairnessRun {
  config::ExperimentSpec spec;
  std::int64_t horizon;
  std::uint64_t seed;
};

std::vector<FairnessRun> fairness_runs() {
  std::vector<FairnessRun> runs;
  Rng rng(6, Stream::instance);
  const std::int64_t horizons[] = {1000, 5000, 20000, 50000};
  for (int k = 0; k < 40; ++k) {
    config::ExperimentSpec spec;
    const std::int64_t t = horizons[k % 4];
    switch (k % 5) {
      case 0: spec.environment.preset = "example1"; break;
      case 1:
        spec.environment.preset = "example-eps";
        spec.environment.eps = 0.01 * (k % 3);
        break;
      case 2:
        spec.environment.preset = "lowerbound";
        spec.environment.lb_index = k % 4;
        spec.environment.lb_dimension = 3;
        break;
      default: {
        // The pre-epoch must see some acceptances of the top price in both
        // groups to estimate the demand floor; draw markets where it expects
        // at least ten per group.
        const double pre = static_cast<double>(fpa::pre_epoch_rounds(t, spec.agent.error_prob));
        auto m = reference::random_market(rng, 3 + static_cast<std::size_t>(k % 2), 0.1);
        auto expected = [&](const MarketConfig& c) {
          return pre * std::min(c.q * c.model.curve(Group::one).back(), (1.0 - c.q) * c.model.curve(Group::two).back());
        };
        while (expected(m) < 10.0) m = reference::random_market(rng, 3 + static_cast<std::size_t>(k % 2), 0.1);
        spec.environment.preset = "inline";
        spec.environment.prices.assign(m.grid.prices().begin(), m.grid.prices().end());
        spec.environment.accept1.assign(m.model.curve(Group::one).begin(), m.model.curve(Group::one).end());
        spec.environment.accept2.assign(m.model.curve(Group::two).begin(), m.model.curve(Group::two).end());
        spec.environment.q = m.q;
        spec.environment.fmin = 0.1;
      }
    }
    spec.agent.mode = k % 8 == 7 ? fpa::ConstantsMode::paper : fpa::ConstantsMode::scaled;
    spec.environment.lb_horizon = t;
    runs.push_back({spec, t, static_cast<std::uint64_t>(k + 1)});
  }
  return runs;
}

}  // namespace

CriterionResult exact_procedural_fairness(int threads) {
  return timed(6, "exact procedural fairness", [threads](CriterionResult& r) {
    const auto runs = fairness_runs();
    std::vector<double> cumulative(runs.size()), worst(runs.size());
    std::vector<std::string> failure(runs.size());
    experiment::parallel_for(runs.size(), threads, [&](std::size_t k) {
      const auto& run = runs[k];
      const MarketConfig market = config::build_market(run.spec.environment);
      sim::SimConfig sim(market, run.horizon, run.seed);
      auto agent = experiment::make_agent(run.spec.agent, market, run.horizon, run.seed);
      try {
        const auto trace = sim::run_episode(*agent, sim);
        cumulative[k] = trace.cumulative_U;
        for (const auto& rec : trace.records) worst[k] = std::max(worst[k], rec.inst_U);
      } catch (const DegenerateDemandError& e) {
        failure[k] = e.what();
      }
    });
    // Machine precision: per-round U of LP-built policies is a few ulps of
    // the proposed mean; allow 1e-12 per round.
    MaxError per_round, total;
    int failed = 0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      if (!failure[k].empty()) {
        ++failed;
        continue;
      }
      per_round.update(worst[k], "run " + std::to_string(k));
      total.update(cumulative[k] / static_cast<double>(runs[k].horizon), "run " + std::to_string(k));
    }
    r.passed = failed == 0 && per_round.value <= 1e-12 && total.value <= 1e-12;
    r.detail = "40 runs, max per-round U " + sci(per_round.value) + ", max cumulative U / T " + sci(total.value) +
               " (tol 1e-12), aborted runs " + std::to_string(failed);
  });
}

CriterionResult desk_scale_sublinearity(int threads) {
  return timed(7, "desk-scale sublinearity", [threads](CriterionResult& r) {
    config::ExperimentSpec spec;
    spec.horizons = {10000, 100000, 1000000};
    spec.seeds = config::parse_seed_list("1:10");
    const auto fpa = experiment::sweep(spec, threads);

    config::ExperimentSpec fixed = spec;
    fixed.agent.kind = sim::AgentKind::best_fixed_oracle;
    const auto baseline = experiment::sweep(fixed, threads);
    const double fixed_regret = baseline.points.back().mean_regret;
    const auto& last = fpa.points.back();
    std::size_t failures = 0;
    for (const auto& c : fpa.cells) failures += c.failure.empty() ? 0 : 1;

    r.passed = failures == 0 && fpa.regret_slope <= 0.75 && fpa.S_slope <= 0.75 && last.mean_regret < fixed_regret &&
               last.mean_S < fixed_regret;
    std::ostringstream d;
    d.precision(4);
    d << "regret slope " << fpa.regret_slope << ", S slope " << fpa.S_slope << " (max 0.75); at T=1e6 regret "
      << last.mean_regret << ", S " << last.mean_S << " vs best-fixed regret " << fixed_regret
      << "; aborted runs " << failures;
    r.detail = d.str();
  });
}

CriterionResult optimal_policy_retention(int threads) {
  return timed(8, "optimal-policy retention", [threads](CriterionResult& r) {
    const MarketConfig market = sim::example1_market();
    const auto opt = oracle::solve_fair_optimal(market);
    config::AgentSpec agent;
    const int runs = 20;
    std::vector<int> retained(runs, 0);
    std::vector<int> epochs(runs, 0);
    experiment::parallel_for(runs, threads, [&](std::size_t k) {
      const auto seed = static_cast<std::uint64_t>(k + 1);
      sim::FpaRunner runner(config::fpa_config(agent, market, 100000, seed));
      sim::SimConfig sim(market, 100000, seed);
      sim.record_every = 0;
      sim::run_episode(runner, sim, opt.revenue);
      // Pi_k after epoch k is the first k ledger entries; check each boundary.
      bool kept = true;
      for (const auto& entry : runner.state().ledger().entries()) {
        kept = kept && oracle::satisfies(opt.policy, entry, market.grid, market.q);
      }
      retained[k] = kept ? 1 : 0;
      epochs[k] = static_cast<int>(runner.state().ledger().size());
    });
    int kept = 0;
    for (int v : retained) kept += v;
    r.passed = kept >= 19;
    r.detail = std::to_string(kept) + "/20 runs retain the optimum at every epoch boundary (need 19), " +
               std::to_string(*std::min_element(epochs.begin(), epochs.end())) + "-" +
               std::to_string(*std::max_element(epochs.begin(), epochs.end())) + " eliminations per run";
  });
}

CriterionResult metric_properties() {
  return timed(9, "metric properties", [](CriterionResult& r) {
    Rng rng(9, Stream::instance);
    MaxError linear, scale, order;
    for (int k = 0; k < 200; ++k) {
      const std::size_t d = 2 + static_cast<std::size_t>(rng.uniform() * 7.0);
      const MarketConfig market = reference::random_market(rng, d);
      const PolicyPair a = reference::random_policy(rng, d);
      const PolicyPair b = reference::random_policy(rng, d);
      const double lambda = rng.uniform();
      const PolicyPair mix = PolicyPair::mixture(lambda, a, b);
      linear.update(std::abs(expected_revenue(mix, market) -
                             (lambda * expected_revenue(a, market) + (1.0 - lambda) * expected_revenue(b, market))),
                    "instance " + std::to_string(k));

      const double c = rng.uniform(0.05, 1.0);
      const Group g = rng.uniform() < 0.5 ? Group::one : Group::two;
      std::vector<double> f1(market.model.curve(Group::one).begin(), market.model.curve(Group::one).end());
      std::vector<double> f2(market.model.curve(Group::two).begin(), market.model.curve(Group::two).end());
      for (auto& x : (g == Group::one ? f1 : f2)) x *= c;
      const double floor = std::min(*std::min_element(f1.begin(), f1.end()), *std::min_element(f2.begin(), f2.end()));
      const MarketConfig scaled(market.grid, AcceptanceModel(f1, f2, floor), market.q);
      scale.update(std::abs(substantive_unfairness(a, market) - substantive_unfairness(a, scaled)),
                   "instance " + std::to_string(k));

      for (Group e : {Group::one, Group::two}) {
        const double gap = expected_accepted_price(a[e], market.model.curve(e), market.grid) - proposed_mean(a[e], market.grid);
        order.update(std::max(0.0, gap), "instance " + std::to_string(k));
      }
    }
    r.passed = linear.value <= 1e-12 && scale.value <= 1e-12 && order.value <= 1e-12;
    r.detail = "200 instances: linearity error " + sci(linear.value) + ", S scale drift " + sci(scale.value) +
               ", accepted-over-proposed excess " + sci(order.value) + " (tol 1e-12)";
  });
}

namespace {

std::string render_run(const config::ExperimentSpec& spec, std::int64_t horizon, std::uint64_t seed, int threads) {
  const MarketConfig market = config::build_market(spec.environment);
  const double revenue = oracle::solve_fair_optimal(market).revenue;
  const auto cells = experiment::run_cells(spec, market, revenue, {{horizon, seed}, {horizon, seed + 1}},
                                           spec.record_every, threads);
  std::string out;
  for (const auto& c : cells) {
    std::ostringstream csv;
    sim::write_trace_csv(csv, c.trace);
    out += csv.str();
    out += sim::summary_json(c.trace, config::echo(spec)).dump(2);
    out += c.failure;
  }
  return out;
}

}  // namespace

CriterionResult determinism(int threads) {
  return timed(10, "determinism", [threads](CriterionResult& r) {
    std::vector<config::ExperimentSpec> specs(3);
    specs[1].agent.kind = sim::AgentKind::ucb_fixed;
    specs[2].environment.preset = "example-eps";
    specs[2].environment.eps = 0.01;
    std::size_t bytes = 0;
    bool same = true;
    for (const auto& spec : specs) {
      const std::string first = render_run(spec, 20000, 11, 1);
      const std::string second = render_run(spec, 20000, 11, std::max(2, threads));
      same = same && first == second;
      bytes += first.size();
    }
    r.passed = same;
    r.detail = std::string(same ? "identical" : "DIFFERENT") + " traces and summaries across repeated runs (" +
               std::to_string(bytes) + " bytes compared per pass)";
  });
}

CriterionResult lower_bound_environments() {
  return timed(11, "lower-bound environments", [](CriterionResult& r) {
    MaxError flat, gap;
    int wrong_argmax = 0;
    double max_accept = 0.0;
    for (int d : {3, 4, 5}) {
      for (std::int64_t t : {10000LL, 1000000LL}) {
        const double eps = sim::lowerbound_epsilon(d, t);
        for (int j = 0; j <= d; ++j) {
          const MarketConfig m = sim::lowerbound_family_market(j, d, t);
          std::vector<double> profile(d);
          for (int i = 0; i < d; ++i) {
            profile[i] = m.grid[i] * m.model.accept(Group::one, i) / sim::kLowerBoundPriceScale;
            max_accept = std::max(max_accept, m.model.accept(Group::one, i));
          }
          const std::string at = "d=" + std::to_string(d) + " T=" + std::to_string(t) + " j=" + std::to_string(j);
          if (j == 0) {
            for (double p : profile) flat.update(std::abs(p - profile[0]), at);
            continue;
          }
          const auto top = std::max_element(profile.begin(), profile.end()) - profile.begin();
          if (top != j - 1) ++wrong_argmax;
          double second = 0.0;
          for (int i = 0; i < d; ++i) {
            if (i != j - 1) second = std::max(second, profile[i]);
          }
          gap.update(std::abs((profile[j - 1] - second) - eps), at);
        }
      }
    }
    r.passed = flat.value <= 1e-12 && gap.value <= 1e-12 && wrong_argmax == 0 && max_accept <= 0.25;
    r.detail = "flat-profile spread " + sci(flat.value) + ", bump gap error " + sci(gap.value) + ", misplaced maxima " +
               std::to_string(wrong_argmax) + ", max acceptance " + sci(max_accept);
  });
}

std::vector<Criterion> criteria(int threads) {
  return {
      {1, "closed-form golden values", closed_form_golden},
      {2, "oracle vs closed form", oracle_matches_closed_form},
      {3, "revenue surface consistency", surface_consistency},
      {4, "brute-force equivalence", brute_force_equivalence},
      {5, "LP kernel vs vertex enumeration", lp_kernel_agreement},
      {6, "exact procedural fairness", [threads] { return exact_procedural_fairness(threads); }},
      {7, "desk-scale sublinearity", [threads] { return desk_scale_sublinearity(threads); }},
      {8, "optimal-policy retention", [threads] { return optimal_policy_retention(threads); }},
      {9, "metric properties", metric_properties},
      {10, "determinism", [threads] { return determinism(threads); }},
      {11, "lower-bound environments", lower_bound_environments},
  };
}

std::vector<CriterionResult> run_suite(const SuiteOptions& options,
                                       const std::function<void(const CriterionResult&)>& report) {
  std::vector<CriterionResult> out;
  for (const auto& c : criteria(options.threads)) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), c.id) == options.only.end()) {
      continue;
    }
    out.push_back(c.run());
    if (report) report(out.back());
  }
  return out;
}

std::string format(const CriterionResult& result) {
  char head[128];
  std::snprintf(head, sizeof head, "%s  %2d  %-32s (%.2f s)  ", result.passed ? "PASS" : "FAIL", result.id,
                result.name.c_str(), result.seconds);
  return head + result.detail;
}

}  // namespace fairprice::validation
