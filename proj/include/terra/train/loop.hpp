#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "terra/nn/config.hpp"
#include "terra/train/selfplay.hpp"

namespace terra::train {

struct TrainConfig {
  nn::NetworkConfig net = nn::NetworkConfig::desk();
  mcts::SearchConfig search;
  int games_per_cycle = 4;
  int steps_per_cycle = 50;
  int cycles = 2;
  std::size_t buffer_capacity = 100000;
  int max_plies = 500;
  bool use_truncated_games = false;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "run";
  /// Continue from the newest checkpoint in out_dir, rebuilding the buffer
  /// from the stored game records.
  bool resume = false;

  static TrainConfig desk();
};

/// Checkpoint file written after cycle `cycle` (1-based).
std::filesystem::path checkpoint_path(const std::filesystem::path& dir, int cycle);

/// Alternates G self-play games and K SGD steps, writing a checkpoint after
/// every cycle, games to out_dir/games.jsonl and metrics to
/// out_dir/metrics.jsonl. Every random choice derives from cfg.seed and the
/// cycle number. Returns the checkpoints written by this call.
std::vector<std::filesystem::path> training_loop(const TrainConfig& cfg,
                                                 const std::function<void(const std::string&)>& log = {});

}  // namespace terra::train
