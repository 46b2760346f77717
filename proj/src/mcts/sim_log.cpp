#include "terra/mcts/sim_log.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace terra::mcts {

std::string simulation_log_line(const SimulationRecord& rec) {
  const nlohmann::json j = {
      {"path", rec.path}, {"players", rec.players}, {"leaf", rec.leaf_value}, {"leaf_player", rec.leaf_player}};
  return j.dump();
}

SimulationRecord parse_simulation_log_line(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    SimulationRecord rec;
    rec.path = j.at("path").get<std::vector<int>>();
    rec.players = j.at("players").get<std::vector<int>>();
    rec.leaf_value = j.at("leaf").get<double>();
    rec.leaf_player = j.at("leaf_player").get<int>();
    if (rec.path.size() != rec.players.size()) throw std::invalid_argument("path and players differ in length");
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad simulation log line: ") + e.what());
  }
}

void write_simulation_log(std::ostream& out, const std::vector<SimulationRecord>& log) {
  for (const auto& rec : log) out << simulation_log_line(rec) << '\n';
}

std::vector<SimulationRecord> read_simulation_log(std::istream& in) {
  std::vector<SimulationRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(parse_simulation_log_line(line));
  }
  return out;
}

}  // namespace terra::mcts
