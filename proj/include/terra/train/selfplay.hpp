#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "terra/encoding/record.hpp"
#include "terra/train/agents.hpp"

namespace terra::train {

struct SelfPlayConfig {
  mcts::SearchConfig search;  // root noise is forced on
  int max_plies = 500;
};

/// One decision: the state searched (tensors are re-encoded from it), the
/// visit shares and who moved.
struct TrajectoryStep {
  GameState state;
  std::vector<std::pair<int, double>> pi;
  int player = 0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  std::pair<int, int> scores{0, 0};
  std::array<int, 2> z{0, 0};
  bool truncated = false;
  encoding::GameRecord record;
};

/// Both seats are played by one search over `net`; the board setup and the
/// search randomness derive from `seed`.
Trajectory play_selfplay_game(nn::Network<double>& net, const SelfPlayConfig& cfg, std::uint64_t seed);

/// Trajectory rebuilt from a stored record (states by replay, z from scores).
Trajectory trajectory_from_record(const encoding::GameRecord& record);

}  // namespace terra::train
