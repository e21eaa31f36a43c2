#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairprice/agents.hpp"
#include "fairprice/fpa.hpp"
#include "fairprice/pricing.hpp"

namespace fairprice::config {

/// A flat `section.key = value` document. Blank lines and `#` comments are
/// ignored; keys may not repeat.
class Document {
 public:
  struct Value {
    std::string text;
    int line = 0;
  };

  static Document parse(const std::string& text);

  void set(const std::string& key, std::string value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, Value>& values() const noexcept { return values_; }
  std::string serialize() const;

 private:
  std::map<std::string, Value> values_;
};

/// Preset names: example1, example-eps, lowerbound, inline.
struct EnvironmentSpec {
  std::string preset = "example1";
  double eps = 0.0;                  // example-eps
  int lb_index = 0;                  // lowerbound: j
  int lb_dimension = 3;              // lowerbound: d
  std::int64_t lb_horizon = 10000;   // lowerbound: T used for the bump size
  // inline
  std::vector<double> prices;
  std::vector<double> accept1;
  std::vector<double> accept2;
  double q = 0.5;
  double fmin = AcceptanceModel::kDefaultFloor;
};

MarketConfig build_market(const EnvironmentSpec& env);

struct AgentSpec {
  sim::AgentKind kind = sim::AgentKind::fpa;
  fpa::ConstantsMode mode = fpa::ConstantsMode::scaled;
  double scale_factor = 2.0;
  double error_prob = 0.05;
  double relaxation_constant = 0.2;
  double reward_radius_scale = 0.05;
  double fairness_radius_scale = 0.03;
  int oracle_steps = 400;
};

/// FPA configuration for one (horizon, seed) cell.
fpa::FpaConfig fpa_config(const AgentSpec& agent, const MarketConfig& market, std::int64_t horizon,
                          std::uint64_t seed);

struct ExperimentSpec {
  EnvironmentSpec environment;
  AgentSpec agent;
  std::vector<std::int64_t> horizons{10000};
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "out";
  bool trace_csv = true;
  bool summary_json = true;
  bool curve_csv = true;
  std::int64_t record_every = 1;
};

/// Throws ParseError naming the offending line and key.
ExperimentSpec parse_experiment(const Document& doc);
ExperimentSpec parse_experiment(const std::string& text);

Document to_document(const ExperimentSpec& spec);
/// Config echo for output files: the document as a key -> string object.
nlohmann::json echo(const ExperimentSpec& spec);

/// "1,2,3" or "base:count".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);

}  // namespace fairprice::config
