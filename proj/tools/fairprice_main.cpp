// fairprice: solve, simulate, and sweep doubly-fair pricing experiments.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fairprice/config_doc.hpp"
#include "fairprice/errors.hpp"
#include "fairprice/experiment.hpp"
#include "fairprice/trace_io.hpp"
#include "fairprice/validation.hpp"

namespace fp = fairprice;

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kIo = 3 };

// Flags shared by every subcommand that builds an experiment.
struct Overrides {
  std::string config_path;
  std::optional<std::string> preset;
  std::optional<double> eps;
  std::optional<int> lb_index;
  std::optional<int> lb_dimension;
  std::optional<std::string> agent;
  std::optional<std::string> horizons;
  std::optional<std::string> seeds;
  std::optional<std::string> mode;
  std::optional<double> scale_factor;
  std::optional<double> error_prob;
  std::optional<double> relaxation_L;
  std::optional<std::string> out;
  std::optional<std::int64_t> record_every;
};

void add_environment_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "Experiment config document (section.key = value)");
  cmd->add_option("--preset", o.preset, "example1 | example-eps | lowerbound | inline");
  cmd->add_option("--eps", o.eps, "Perturbation for the example-eps preset");
  cmd->add_option("--lb-index", o.lb_index, "Bumped price j for the lowerbound preset (0 = flat)");
  cmd->add_option("--lb-dimension", o.lb_dimension, "Grid size d for the lowerbound preset");
}

void add_agent_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--agent", o.agent,
                  "fpa | best_fixed_oracle | ucb_fixed | groupwise_unconstrained_oracle | fair_oracle");
  cmd->add_option("--mode", o.mode, "FPA constants: paper | scaled");
  cmd->add_option("--scale-factor", o.scale_factor, "Scaled-mode epoch constant c");
  cmd->add_option("--epsilon", o.error_prob, "FPA error probability");
  cmd->add_option("--relaxation-L", o.relaxation_L, "FPA relaxation constant L");
  cmd->add_option("-T,--horizon", o.horizons, "Horizon or comma-separated horizons");
  cmd->add_option("--seeds", o.seeds, "Seeds as a list (1,2,3) or base:count");
  cmd->add_option("--out", o.out, "Output directory");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw fp::IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fp::config::ExperimentSpec build_spec(const Overrides& o) {
  fp::config::ExperimentSpec spec;
  if (!o.config_path.empty()) spec = fp::config::parse_experiment(read_file(o.config_path));
  // Command-line flags win over the document; they go through the same parser
  // so errors name the equivalent config key.
  fp::config::Document doc = fp::config::to_document(spec);
  auto set = [&](const std::string& key, const std::string& value) { doc.set(key, value); };
  if (o.preset) set("environment.preset", *o.preset);
  if (o.eps) set("environment.eps", fp::sim::format_real(*o.eps));
  if (o.lb_index) set("environment.lb_index", std::to_string(*o.lb_index));
  if (o.lb_dimension) set("environment.lb_dimension", std::to_string(*o.lb_dimension));
  if (o.agent) set("agent.kind", *o.agent);
  if (o.mode) set("agent.mode", *o.mode);
  if (o.scale_factor) set("agent.scale_factor", fp::sim::format_real(*o.scale_factor));
  if (o.error_prob) set("agent.error_prob", fp::sim::format_real(*o.error_prob));
  if (o.relaxation_L) set("agent.relaxation_L", fp::sim::format_real(*o.relaxation_L));
  if (o.horizons) set("sweep.horizons", *o.horizons);
  if (o.seeds) set("sweep.seeds", *o.seeds);
  if (o.out) set("output.dir", *o.out);
  if (o.record_every) set("output.record_every", std::to_string(*o.record_every));
  spec = fp::config::parse_experiment(doc);
  // The lower-bound bump size depends on T; follow the horizon unless pinned.
  if (spec.environment.preset == "lowerbound" && (o.horizons || !doc.has("environment.lb_horizon"))) {
    spec.environment.lb_horizon = spec.horizons.front();
  }
  return spec;
}

std::string fmt(double x, int digits = 6) {
  std::ostringstream ss;
  ss.precision(digits);
  ss << x;
  return ss.str();
}

std::string weights(const nlohmann::json& w) {
  std::string out = "[";
  for (std::size_t i = 0; i < w.size(); ++i) out += (i ? ", " : "") + fmt(w[i].get<double>(), 4);
  return out + "]";
}

int cmd_solve(const Overrides& o) {
  const auto spec = build_spec(o);
  const auto report = fp::experiment::solve_report(spec.environment);
  std::cout << "preset           " << spec.environment.preset << "\n"
            << "revenue          " << fmt(report["revenue"].get<double>(), 8) << "\n"
            << "group 1 policy   " << weights(report["policy"]["group1"]) << "\n"
            << "group 2 policy   " << weights(report["policy"]["group2"]) << "\n"
            << "accepted mean    " << fmt(report["accepted_mean"].get<double>(), 8) << "\n"
            << "proposed mean    " << fmt(report["proposed_mean"].get<double>(), 8) << "\n"
            << "U, S             " << fmt(report["procedural_unfairness"].get<double>(), 3) << ", "
            << fmt(report["substantive_unfairness"].get<double>(), 3) << "\n";
  if (report.contains("closed_form")) {
    const auto& cf = report["closed_form"];
    std::cout << "closed form      revenue " << fmt(cf["revenue"].get<double>(), 8) << ", revenue error "
              << fmt(cf["revenue_error"].get<double>(), 3) << ", policy Linf error "
              << fmt(cf["policy_linf_error"].get<double>(), 3) << "\n";
  }
  if (o.out) {
    fp::sim::write_file(std::filesystem::path(*o.out) / "solve.json", report.dump(2) + "\n");
  }
  return kOk;
}

std::string cell_name(const std::string& kind, std::int64_t t, std::uint64_t seed, const std::string& ext) {
  return kind + "_T" + std::to_string(t) + "_seed" + std::to_string(seed) + ext;
}

int cmd_run(const Overrides& o) {
  const auto spec = build_spec(o);
  const auto market = fp::config::build_market(spec.environment);
  const double revenue = fp::oracle::solve_fair_optimal(market).revenue;
  std::vector<fp::experiment::Cell> cells;
  for (auto t : spec.horizons) {
    for (auto s : spec.seeds) cells.push_back({t, s});
  }
  const auto results = fp::experiment::run_cells(spec, market, revenue, cells, spec.trace_csv ? spec.record_every : 0,
                                                 fp::experiment::worker_threads());
  const auto echo = fp::config::echo(spec);
  const std::filesystem::path dir(spec.output_dir);
  nlohmann::json merged = {{"config", echo}, {"oracle_revenue", revenue}, {"runs", nlohmann::json::array()}};
  for (const auto& r : results) {
    nlohmann::json entry = {{"horizon", r.cell.horizon}, {"seed", r.cell.seed}};
    if (!r.failure.empty()) {
      entry["failure"] = r.failure;
      std::cout << "T=" << r.cell.horizon << " seed=" << r.cell.seed << "  FAILED: " << r.failure << "\n";
    } else {
      if (spec.trace_csv) {
        std::ostringstream csv;
        fp::sim::write_trace_csv(csv, r.trace);
        fp::sim::write_file(dir / cell_name("trace", r.cell.horizon, r.cell.seed, ".csv"), csv.str());
      }
      auto summary = fp::sim::summary_json(r.trace, echo);
      summary["horizon"] = r.cell.horizon;
      summary["seed"] = r.cell.seed;
      if (spec.summary_json) {
        fp::sim::write_file(dir / cell_name("summary", r.cell.horizon, r.cell.seed, ".json"), summary.dump(2) + "\n");
      }
      entry["cumulative_regret"] = r.trace.cumulative_regret;
      entry["cumulative_S"] = r.trace.cumulative_S;
      entry["cumulative_U"] = r.trace.cumulative_U;
      if (r.trace.agent_meta.contains("epochs_executed")) entry["epochs_executed"] = r.trace.agent_meta["epochs_executed"];
      std::cout << "T=" << r.cell.horizon << " seed=" << r.cell.seed << "  regret " << fmt(r.trace.cumulative_regret)
                << "  S " << fmt(r.trace.cumulative_S) << "  U " << fmt(r.trace.cumulative_U) << "\n";
    }
    merged["runs"].push_back(entry);
  }
  fp::sim::write_file(dir / "run_summary.json", merged.dump(2) + "\n");
  fp::sim::write_file(dir / "config.txt", fp::config::to_document(spec).serialize());
  return kOk;
}

int cmd_sweep(const Overrides& o) {
  auto spec = build_spec(o);
  const auto result = fp::experiment::sweep(spec, fp::experiment::worker_threads());
  std::cout << "horizon    runs  mean_regret  stderr     mean_S       stderr\n";
  for (const auto& p : result.points) {
    char line[160];
    std::snprintf(line, sizeof line, "%-10lld %-5zu %-12.5g %-10.4g %-12.5g %-10.4g\n", static_cast<long long>(p.horizon),
                  p.runs, p.mean_regret, p.stderr_regret, p.mean_S, p.stderr_S);
    std::cout << line;
  }
  std::cout << "log-log slope: regret " << fmt(result.regret_slope, 4) << ", S " << fmt(result.S_slope, 4) << "\n";
  const std::filesystem::path dir(spec.output_dir);
  if (spec.curve_csv) fp::sim::write_file(dir / "curve.csv", fp::experiment::curve_csv(result));
  auto summary = fp::experiment::to_json(result);
  summary["config"] = fp::config::echo(spec);
  fp::sim::write_file(dir / "sweep_summary.json", summary.dump(2) + "\n");
  return kOk;
}

int cmd_compare_lb(const Overrides& o) {
  auto spec = build_spec(o);
  const double eps = o.eps.value_or(0.01);
  const auto report = fp::experiment::compare_lb(spec.agent, eps, spec.horizons.front(), spec.seeds,
                                                 fp::experiment::worker_threads());
  auto arm = [](const char* name, const fp::experiment::CompareArm& a) {
    std::cout << name << "  oracle revenue " << fmt(a.oracle_revenue, 8) << ", optimal proposed mean "
              << fmt(a.optimal_proposed_mean, 8) << ", regret " << fmt(a.mean_regret) << " +- " << fmt(a.stderr_regret, 3)
              << ", S " << fmt(a.mean_S) << " +- " << fmt(a.stderr_S, 3) << "\n";
  };
  arm("P0  ", report.base);
  arm("Peps", report.perturbed);
  std::cout << "proposed-mean gap " << fmt(report.proposed_mean_gap, 8) << " (closed form "
            << fmt(report.closed_form_gap, 8) << ")\n";
  auto json = fp::experiment::to_json(report);
  json["config"] = fp::config::echo(spec);
  fp::sim::write_file(std::filesystem::path(spec.output_dir) / "compare_lb.json", json.dump(2) + "\n");
  return kOk;
}

int cmd_validate(const std::vector<int>& only, const std::optional<std::string>& out) {
  fp::validation::SuiteOptions options;
  options.threads = fp::experiment::worker_threads();
  options.only = only;
  if (out) {
    // Fail early rather than after a long suite.
    fp::sim::write_file(std::filesystem::path(*out) / "validate.json", "{}\n");
  }
  const auto results = fp::validation::run_suite(options, [](const fp::validation::CriterionResult& r) {
    std::cout << fp::validation::format(r) << std::endl;
  });
  bool ok = true;
  nlohmann::json json = nlohmann::json::array();
  for (const auto& r : results) {
    ok = ok && r.passed;
    json.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}, {"seconds", r.seconds}});
  }
  if (out) fp::sim::write_file(std::filesystem::path(*out) / "validate.json", json.dump(2) + "\n");
  std::cout << (ok ? "all checks passed" : "some checks FAILED") << "\n";
  return ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Doubly-fair dynamic pricing: oracles, the FPA learner, and experiment runners"};
  app.require_subcommand(1);

  Overrides solve_o, run_o, sweep_o, lb_o;
  auto* solve = app.add_subcommand("solve", "Optimal doubly-fair policy of a market");
  add_environment_flags(solve, solve_o);
  solve->add_option("--out", solve_o.out, "Directory for solve.json");

  auto* run = app.add_subcommand("run", "Simulate episodes and write traces");
  add_environment_flags(run, run_o);
  add_agent_flags(run, run_o);
  run->add_option("--record-every", run_o.record_every, "Keep every n-th round in trace CSVs");

  auto* sweep = app.add_subcommand("sweep", "Horizon x seed grid with log-log slopes");
  add_environment_flags(sweep, sweep_o);
  add_agent_flags(sweep, sweep_o);

  auto* lb = app.add_subcommand("compare-lb", "FPA on example1 vs its eps-perturbation, paired seeds");
  add_agent_flags(lb, lb_o);
  lb->add_option("--eps", lb_o.eps, "Perturbation size (default 0.01)");
  lb->add_option("--config", lb_o.config_path, "Experiment config document");

  std::vector<int> only;
  std::optional<std::string> validate_out;
  auto* validate = app.add_subcommand("validate", "Run the acceptance suite");
  validate->add_option("--only", only, "Criterion ids to run")->delimiter(',');
  validate->add_option("--out", validate_out, "Directory for validate.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) return cmd_solve(solve_o);
    if (*run) return cmd_run(run_o);
    if (*sweep) return cmd_sweep(sweep_o);
    if (*lb) return cmd_compare_lb(lb_o);
    if (*validate) return cmd_validate(only, validate_out);
  } catch (const fp::ParseError& e) {
    std::cerr << "config error: " << e.what();
    if (!e.field().empty()) std::cerr << " [" << e.field() << "]";
    std::cerr << "\n";
    return kUsage;
  } catch (const fp::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const fp::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const fp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kOk;
}
