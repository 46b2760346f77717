#pragma once

// Game records: one JSON object per line.
//
//   {"config": {"seed", "scoring_tiles", "bonus_cards", "factions", "max_plies"},
//    "moves": [{"a": index, "p": player, "pi": [[index, prob], ...], "v": root value}, ...],
//    "scores": [vp0, vp1], "truncated": bool, "tags": {...}}
//
// "pi" and "v" are optional per move. Replaying the action indices from the
// config reproduces the final state exactly.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "terra/rules/engine.hpp"

namespace terra::encoding {

struct MoveRecord {
  int action = 0;
  int player = 0;
  std::vector<std::pair<int, double>> pi;  // sparse, may be empty
  std::optional<double> value;

  friend bool operator==(const MoveRecord&, const MoveRecord&) = default;
};

struct GameRecord {
  GameConfig config;
  std::vector<MoveRecord> moves;
  std::pair<int, int> scores{0, 0};
  bool truncated = false;
  std::map<std::string, std::string> tags;

  friend bool operator==(const GameRecord&, const GameRecord&) = default;
};

std::string config_to_json(const GameConfig& config);
GameConfig config_from_json(const std::string& text);

/// Single line, no trailing newline.
std::string to_json_line(const GameRecord& record);

/// Throws std::invalid_argument on malformed input.
GameRecord parse_record(const std::string& line);

/// Final state after applying every recorded move; throws RuleError if a
/// move is illegal.
GameState replay(const GameRecord& record);

void append_record(const std::filesystem::path& path, const GameRecord& record);
std::vector<GameRecord> read_records(const std::filesystem::path& path);

}  // namespace terra::encoding
