#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "fairprice/simulator.hpp"

namespace fairprice::sim {

/// 17 significant digits, '.' decimal point, independent of the C locale.
std::string format_real(double value);

/// Header t,group,price_index,accepted,reward,inst_regret,inst_S,inst_U,epoch.
void write_trace_csv(std::ostream& out, const RunTrace& trace);

/// Cumulative metrics, oracle revenue, the config echo, and agent_meta.
nlohmann::json summary_json(const RunTrace& trace, const nlohmann::json& config_echo);

/// Writes `content`, creating parent directories. Throws IoError.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace fairprice::sim
