#pragma once

// Simulation log: one JSON object per simulation,
//   {"path": [action, ...], "players": [acting player, ...], "leaf": value, "leaf_player": p}

#include <iosfwd>
#include <string>
#include <vector>

#include "terra/mcts/search.hpp"

namespace terra::mcts {

std::string simulation_log_line(const SimulationRecord& rec);
SimulationRecord parse_simulation_log_line(const std::string& line);

void write_simulation_log(std::ostream& out, const std::vector<SimulationRecord>& log);
std::vector<SimulationRecord> read_simulation_log(std::istream& in);

}  // namespace terra::mcts
