#include "fairprice/config_doc.hpp"

#include <charconv>
#include <functional>
#include <sstream>

#include "fairprice/errors.hpp"
#include "fairprice/markets.hpp"
#include "fairprice/trace_io.hpp"

namespace fairprice::config {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

template <typename T>
T parse_number(const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || text.empty()) {
    throw ParseError("not a number: '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ParseError("not a boolean: '" + text + "'");
}

std::string join_reals(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += sim::format_real(values[i]);
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

Document Document::parse(const std::string& text) {
  Document doc;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line);
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", line);
    if (key.find('.') == std::string::npos) throw ParseError("key must be section.name", line, key);
    if (doc.values_.count(key)) throw ParseError("duplicate key", line, key);
    doc.values_[key] = Value{trim(body.substr(eq + 1)), line};
  }
  return doc;
}

void Document::set(const std::string& key, std::string value) { values_[key] = Value{std::move(value), 0}; }

std::string Document::serialize() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + " = " + value.text + "\n";
  return out;
}

MarketConfig build_market(const EnvironmentSpec& env) {
  if (env.preset == "example1") return sim::example1_market();
  if (env.preset == "example-eps") return sim::example_eps_market(env.eps);
  if (env.preset == "lowerbound") return sim::lowerbound_family_market(env.lb_index, env.lb_dimension, env.lb_horizon);
  if (env.preset == "inline") {
    return MarketConfig(PriceGrid(env.prices), AcceptanceModel(env.accept1, env.accept2, env.fmin), env.q);
  }
  throw DomainError("unknown environment preset '" + env.preset + "'");
}

fpa::FpaConfig fpa_config(const AgentSpec& agent, const MarketConfig& market, std::int64_t horizon,
                          std::uint64_t seed) {
  fpa::FpaConfig cfg(market.grid);
  cfg.horizon = horizon;
  cfg.error_prob = agent.error_prob;
  cfg.relaxation_constant = agent.relaxation_constant;
  cfg.q = market.q;
  cfg.mode = agent.mode;
  cfg.scale_factor = agent.scale_factor;
  cfg.reward_radius_scale = agent.reward_radius_scale;
  cfg.fairness_radius_scale = agent.fairness_radius_scale;
  cfg.oracle.grid_steps_vs = agent.oracle_steps;
  cfg.seed = seed;
  return cfg;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const auto base = parse_number<std::uint64_t>(trim(text.substr(0, colon)));
    const auto count = parse_number<std::uint64_t>(trim(text.substr(colon + 1)));
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(base + i);
  } else {
    for (const auto& item : split(text, ',')) out.push_back(parse_number<std::uint64_t>(item));
  }
  if (out.empty()) throw ParseError("empty seed list");
  return out;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number<double>(item));
  return out;
}

ExperimentSpec parse_experiment(const Document& doc) {
  ExperimentSpec spec;
  auto& env = spec.environment;
  auto& agent = spec.agent;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"environment.preset", [&](const std::string& v) { env.preset = v; }},
      {"environment.eps", [&](const std::string& v) { env.eps = parse_number<double>(v); }},
      {"environment.lb_index", [&](const std::string& v) { env.lb_index = parse_number<int>(v); }},
      {"environment.lb_dimension", [&](const std::string& v) { env.lb_dimension = parse_number<int>(v); }},
      {"environment.lb_horizon", [&](const std::string& v) { env.lb_horizon = parse_number<std::int64_t>(v); }},
      {"environment.prices", [&](const std::string& v) { env.prices = parse_real_list(v); }},
      {"environment.accept1", [&](const std::string& v) { env.accept1 = parse_real_list(v); }},
      {"environment.accept2", [&](const std::string& v) { env.accept2 = parse_real_list(v); }},
      {"environment.q", [&](const std::string& v) { env.q = parse_number<double>(v); }},
      {"environment.fmin", [&](const std::string& v) { env.fmin = parse_number<double>(v); }},
      {"agent.kind", [&](const std::string& v) { agent.kind = sim::parse_agent_kind(v); }},
      {"agent.mode", [&](const std::string& v) { agent.mode = fpa::parse_mode(v); }},
      {"agent.scale_factor", [&](const std::string& v) { agent.scale_factor = parse_number<double>(v); }},
      {"agent.error_prob", [&](const std::string& v) { agent.error_prob = parse_number<double>(v); }},
      {"agent.relaxation_L", [&](const std::string& v) { agent.relaxation_constant = parse_number<double>(v); }},
      {"agent.reward_radius_scale", [&](const std::string& v) { agent.reward_radius_scale = parse_number<double>(v); }},
      {"agent.fairness_radius_scale",
       [&](const std::string& v) { agent.fairness_radius_scale = parse_number<double>(v); }},
      {"agent.oracle_steps", [&](const std::string& v) { agent.oracle_steps = parse_number<int>(v); }},
      {"sweep.horizons",
       [&](const std::string& v) {
         spec.horizons.clear();
         for (const auto& item : split(v, ',')) spec.horizons.push_back(parse_number<std::int64_t>(item));
       }},
      {"sweep.seeds", [&](const std::string& v) { spec.seeds = parse_seed_list(v); }},
      {"output.dir", [&](const std::string& v) { spec.output_dir = v; }},
      {"output.trace_csv", [&](const std::string& v) { spec.trace_csv = parse_bool(v); }},
      {"output.summary_json", [&](const std::string& v) { spec.summary_json = parse_bool(v); }},
      {"output.curve_csv", [&](const std::string& v) { spec.curve_csv = parse_bool(v); }},
      {"output.record_every", [&](const std::string& v) { spec.record_every = parse_number<std::int64_t>(v); }},
  };
  for (const auto& [key, value] : doc.values()) {
    auto it = setters.find(key);
    if (it == setters.end()) throw ParseError("unknown key", value.line, key);
    try {
      it->second(value.text);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), value.line, key);
    } catch (const DomainError& e) {
      throw ParseError(e.what(), value.line, key);
    }
  }
  if (spec.horizons.empty()) throw ParseError("sweep.horizons must not be empty", 0, "sweep.horizons");
  for (auto t : spec.horizons) {
    if (t < 1) throw ParseError("horizons must be positive", 0, "sweep.horizons");
  }
  if (spec.record_every < 0) throw ParseError("record_every must be nonnegative", 0, "output.record_every");
  return spec;
}

ExperimentSpec parse_experiment(const std::string& text) { return parse_experiment(Document::parse(text)); }

Document to_document(const ExperimentSpec& spec) {
  Document doc;
  const auto& env = spec.environment;
  doc.set("environment.preset", env.preset);
  if (env.preset == "example-eps") doc.set("environment.eps", sim::format_real(env.eps));
  if (env.preset == "lowerbound") {
    doc.set("environment.lb_index", std::to_string(env.lb_index));
    doc.set("environment.lb_dimension", std::to_string(env.lb_dimension));
    doc.set("environment.lb_horizon", std::to_string(env.lb_horizon));
  }
  if (env.preset == "inline") {
    doc.set("environment.prices", join_reals(env.prices));
    doc.set("environment.accept1", join_reals(env.accept1));
    doc.set("environment.accept2", join_reals(env.accept2));
    doc.set("environment.q", sim::format_real(env.q));
    doc.set("environment.fmin", sim::format_real(env.fmin));
  }
  const auto& a = spec.agent;
  doc.set("agent.kind", sim::to_string(a.kind));
  doc.set("agent.mode", fpa::to_string(a.mode));
  doc.set("agent.scale_factor", sim::format_real(a.scale_factor));
  doc.set("agent.error_prob", sim::format_real(a.error_prob));
  doc.set("agent.relaxation_L", sim::format_real(a.relaxation_constant));
  doc.set("agent.reward_radius_scale", sim::format_real(a.reward_radius_scale));
  doc.set("agent.fairness_radius_scale", sim::format_real(a.fairness_radius_scale));
  doc.set("agent.oracle_steps", std::to_string(a.oracle_steps));
  doc.set("sweep.horizons", join(spec.horizons));
  doc.set("sweep.seeds", join(spec.seeds));
  doc.set("output.dir", spec.output_dir);
  doc.set("output.trace_csv", spec.trace_csv ? "true" : "false");
  doc.set("output.summary_json", spec.summary_json ? "true" : "false");
  doc.set("output.curve_csv", spec.curve_csv ? "true" : "false");
  doc.set("output.record_every", std::to_string(spec.record_every));
  return doc;
}

nlohmann::json echo(const ExperimentSpec& spec) {
  nlohmann::json out = nlohmann::json::object();
  const Document doc = to_document(spec);
  for (const auto& [key, value] : doc.values()) out[key] = value.text;
  return out;
}

}  // namespace fairprice::config
