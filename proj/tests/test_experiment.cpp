#include <cmath>

#include <gtest/gtest.h>

#include "fairprice/config_doc.hpp"
#include "fairprice/errors.hpp"
#include "fairprice/experiment.hpp"
#include "fairprice/markets.hpp"
#include "fairprice/trace_io.hpp"

using namespace fairprice;
using namespace fairprice::config;

TEST(ConfigDocument, ParsesCommentsAndBlanks) {
  const auto doc = Document::parse("# experiment\n\nenvironment.preset = example1   # the running example\n"
                                   "sweep.seeds=1:3\n");
  ASSERT_EQ(doc.values().size(), 2u);
  EXPECT_EQ(doc.values().at("environment.preset").text, "example1");
  EXPECT_EQ(doc.values().at("sweep.seeds").line, 4);
}

TEST(ConfigDocument, ErrorsNameLineAndField) {
  try {
    Document::parse("environment.preset = example1\nenvironment.preset = lowerbound\n");
    FAIL() << "duplicate accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.field(), "environment.preset");
  }
  EXPECT_THROW(Document::parse("preset = example1\n"), ParseError);
  EXPECT_THROW(Document::parse("environment.preset example1\n"), ParseError);
  try {
    parse_experiment("environment.preset = example1\nagent.scale_factor = two\n");
    FAIL() << "bad number accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.field(), "agent.scale_factor");
  }
  EXPECT_THROW(parse_experiment("agent.speed = 3\n"), ParseError);
  EXPECT_THROW(parse_experiment("agent.mode = fast\n"), ParseError);
  EXPECT_THROW(parse_experiment("sweep.horizons = 0\n"), ParseError);
}

TEST(ConfigDocument, Defaults) {
  const auto spec = parse_experiment(std::string{});
  EXPECT_EQ(spec.environment.preset, "example1");
  EXPECT_EQ(spec.agent.kind, sim::AgentKind::fpa);
  EXPECT_EQ(spec.agent.mode, fpa::ConstantsMode::scaled);
  EXPECT_DOUBLE_EQ(spec.agent.scale_factor, 2.0);
  EXPECT_DOUBLE_EQ(spec.agent.error_prob, 0.05);
  EXPECT_EQ(spec.horizons, std::vector<std::int64_t>{10000});
}

TEST(ConfigDocument, RoundTrip) {
  const auto spec = parse_experiment(
      "environment.preset = inline\nenvironment.prices = 0.25, 0.5, 1\nenvironment.accept1 = 0.9,0.6,0.3\n"
      "environment.accept2 = 0.8,0.8,0.2\nenvironment.q = 0.4\nagent.kind = ucb_fixed\n"
      "sweep.horizons = 1000,10000,100000\nsweep.seeds = 5:5\noutput.record_every = 10\n");
  EXPECT_EQ(spec.seeds, (std::vector<std::uint64_t>{5, 6, 7, 8, 9}));
  const auto again = parse_experiment(to_document(spec).serialize());
  EXPECT_EQ(to_document(again).serialize(), to_document(spec).serialize());
  const auto market = build_market(again.environment);
  EXPECT_DOUBLE_EQ(market.q, 0.4);
  EXPECT_DOUBLE_EQ(market.model.accept(Group::two, 2), 0.2);
  EXPECT_EQ(echo(spec)["agent.kind"], "ucb_fixed");
}

TEST(ConfigDocument, SeedLists) {
  EXPECT_EQ(parse_seed_list("3,1,2"), (std::vector<std::uint64_t>{3, 1, 2}));
  EXPECT_EQ(parse_seed_list("10:2"), (std::vector<std::uint64_t>{10, 11}));
  EXPECT_THROW(parse_seed_list("10:0"), ParseError);
  EXPECT_THROW(parse_seed_list("a,b"), ParseError);
}

TEST(ConfigDocument, FpaConfigCarriesAgentFields) {
  AgentSpec agent;
  agent.mode = fpa::ConstantsMode::paper;
  agent.relaxation_constant = 0.7;
  const auto cfg = fpa_config(agent, sim::example1_market(), 5000, 9);
  EXPECT_EQ(cfg.horizon, 5000);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_DOUBLE_EQ(cfg.q, 0.3);
  EXPECT_EQ(cfg.mode, fpa::ConstantsMode::paper);
  EXPECT_DOUBLE_EQ(cfg.relaxation_constant, 0.7);
}

TEST(Statistics, LogLogSlope) {
  const std::vector<double> x{1e4, 1e5, 1e6};
  EXPECT_NEAR(experiment::loglog_slope(x, {10, 10 * std::pow(10.0, 0.75), 10 * std::pow(10.0, 1.5)}), 0.75, 1e-12);
  EXPECT_NEAR(experiment::loglog_slope(x, {3, 3, 3}), 0.0, 1e-12);
  EXPECT_TRUE(std::isnan(experiment::loglog_slope(x, {0, 1, 2})));
  const auto [mean, se] = experiment::mean_stderr({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(mean, 2.5);
  EXPECT_NEAR(se, std::sqrt(5.0 / 3 / 4), 1e-12);
}

TEST(Sweep, NeedsEnoughPoints) {
  ExperimentSpec spec;
  spec.horizons = {1000, 2000};
  spec.seeds = parse_seed_list("1:5");
  EXPECT_THROW(experiment::sweep(spec, 1), DomainError);
  spec.horizons = {1000, 2000, 4000};
  spec.seeds = {1, 2};
  EXPECT_THROW(experiment::sweep(spec, 1), DomainError);
}

TEST(Sweep, FairOracleHasFlatS) {
  ExperimentSpec spec;
  spec.agent.kind = sim::AgentKind::fair_oracle;
  spec.horizons = {1000, 3000, 10000};
  spec.seeds = parse_seed_list("1:5");
  const auto result = experiment::sweep(spec, 2);
  ASSERT_EQ(result.points.size(), 3u);
  for (const auto& p : result.points) {
    EXPECT_EQ(p.runs, 5u);
    EXPECT_LE(p.mean_S, 1e-6);
    EXPECT_LE(std::abs(p.mean_regret), 1e-6);
  }
  const auto csv = experiment::curve_csv(result);
  EXPECT_EQ(csv.substr(0, csv.find('\n')).find("horizon"), 0u);
}

TEST(RunCells, ThreadCountDoesNotChangeTraces) {
  ExperimentSpec spec;
  const auto market = sim::example1_market();
  const std::vector<experiment::Cell> cells{{5000, 1}, {5000, 2}, {8000, 3}, {3000, 4}};
  const auto serial = experiment::run_cells(spec, market, 74.0 / 145, cells, 7, 1);
  const auto threaded = experiment::run_cells(spec, market, 74.0 / 145, cells, 7, 4);
  ASSERT_EQ(serial.size(), threaded.size());
  for (std::size_t k = 0; k < serial.size(); ++k) {
    std::ostringstream a, b;
    sim::write_trace_csv(a, serial[k].trace);
    sim::write_trace_csv(b, threaded[k].trace);
    EXPECT_EQ(a.str(), b.str()) << "cell " << k;
    EXPECT_EQ(serial[k].cell.seed, cells[k].seed);
  }
}

TEST(RunCells, DegenerateDemandIsReportedPerCell) {
  ExperimentSpec spec;
  spec.environment.preset = "inline";
  spec.environment.prices = {0.5, 1.0};
  spec.environment.accept1 = {0.9, 0.001};
  spec.environment.accept2 = {0.9, 0.001};
  spec.environment.fmin = 0.001;
  const auto market = build_market(spec.environment);
  const auto results = experiment::run_cells(spec, market, 0.45, {{1000, 1}}, 0, 1);
  ASSERT_EQ(results.size(), 1u);
  EXPECT_FALSE(results[0].failure.empty());
}

TEST(Reports, SolveReport) {
  EnvironmentSpec env;
  const auto report = experiment::solve_report(env);
  EXPECT_NEAR(report["revenue"].get<double>(), 0.510345, 1e-6);
  EXPECT_NEAR(report["policy"]["group1"][0].get<double>(), 0.6897, 1e-4);
  EXPECT_NEAR(report["policy"]["group2"][1].get<double>(), 0.8621, 1e-4);
  env.preset = "example-eps";
  env.eps = 0.001;
  const auto perturbed = experiment::solve_report(env);
  const double eps = 0.001;
  EXPECT_NEAR(perturbed["revenue"].get<double>(), 37 * (1 - 2 * eps) * (4 + 5 * eps) / (10 * (29 - 10 * eps)), 1e-4);
  ASSERT_TRUE(perturbed.contains("closed_form"));
}

TEST(Reports, CompareLbPairsSeeds) {
  AgentSpec agent;
  const auto same = experiment::compare_lb(agent, 0.0, 5000, {1, 2, 3}, 2);
  EXPECT_DOUBLE_EQ(same.base.mean_regret, same.perturbed.mean_regret);
  EXPECT_DOUBLE_EQ(same.base.mean_S, same.perturbed.mean_S);
  const auto gap = experiment::compare_lb(agent, 0.01, 5000, {1, 2, 3}, 2);
  EXPECT_NEAR(gap.closed_form_gap, 360 * 0.01 / (29 * (29 - 0.1)), 1e-15);
  EXPECT_NEAR(gap.proposed_mean_gap, gap.closed_form_gap, 1e-4);
}
