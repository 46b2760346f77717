#pragma once

#include <array>
#include <string>
#include <vector>

#include "terra/encoding/record.hpp"
#include "terra/train/agents.hpp"

namespace terra::train {

struct FactionRow {
  std::string faction;
  double average = 0.0;
  long games = 0;

  friend bool operator==(const FactionRow&, const FactionRow&) = default;
};

struct ScoreReport {
  std::string title = "Simulated Self-Play Average Scores";
  std::string count_label = "Sampled Games";
  std::vector<FactionRow> rows;
  std::string agent_a;
  std::string agent_b;
  std::array<int, 3> a_results{0, 0, 0};  // agent A wins, ties, losses
  long iterations = 0;                     // training steps behind agent A
  int window = 0;                          // games averaged

  double a_win_rate() const;
  friend bool operator==(const ScoreReport&, const ScoreReport&) = default;
};

/// "10,000"
std::string group_thousands(long n);

/// Aligned plain-text table: title, header "Faction  Average Score  <count label>",
/// one row per faction, then the head-to-head tally.
std::string render_table(const ScoreReport& report);
std::string to_json(const ScoreReport& report);

/// Per-faction averages and agent A's tally, from records tagged with
/// "a_seat" (the seat agent A played).
ScoreReport summarize(const std::vector<encoding::GameRecord>& records, const std::string& agent_a,
                      const std::string& agent_b);

struct EvalConfig {
  int games = 50;
  std::uint64_t seed = 0;
  int max_plies = 500;
};

struct EvalResult {
  ScoreReport report;
  std::vector<encoding::GameRecord> records;
};

/// Agent A takes seat 0 in even games and seat 1 in odd games; games 2k and
/// 2k+1 share one board setup.
EvalResult evaluate(Agent& a, Agent& b, const EvalConfig& cfg);

}  // namespace terra::train
