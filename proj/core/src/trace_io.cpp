#include "fairprice/trace_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "fairprice/errors.hpp"

namespace fairprice::sim {

std::string format_real(double value) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "t,group,price_index,accepted,reward,inst_regret,inst_S,inst_U,epoch\n";
  for (const auto& r : trace.records) {
    out << r.t << ',' << static_cast<int>(r.group) << ',' << r.price_index + 1 << ','
        << (r.accepted ? 1 : 0) << ',' << format_real(r.reward) << ',' << format_real(r.inst_regret) << ','
        << format_real(r.inst_S) << ',' << format_real(r.inst_U) << ',' << r.epoch << '\n';
  }
}

nlohmann::json summary_json(const RunTrace& trace, const nlohmann::json& config_echo) {
  return {{"rounds", trace.rounds},
          {"cumulative_reward", trace.cumulative_reward},
          {"cumulative_regret", trace.cumulative_regret},
          {"cumulative_S", trace.cumulative_S},
          {"cumulative_U", trace.cumulative_U},
          {"oracle_revenue", trace.oracle_revenue},
          {"config", config_echo},
          {"agent_meta", trace.agent_meta}};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace fairprice::sim
