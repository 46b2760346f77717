#include "terra/train/evaluate.hpp"

#include <cstdio>
#include <map>
#include <sstream>

#include "json.hpp"

namespace terra::train {

double ScoreReport::a_win_rate() const {
  const int n = a_results[0] + a_results[1] + a_results[2];
  return n == 0 ? 0.0 : static_cast<double>(a_results[0]) / n;
}

std::string group_thousands(long n) {
  std::string digits = std::to_string(n < 0 ? -n : n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return n < 0 ? "-" + out : out;
}

std::string render_table(const ScoreReport& r) {
  char avg[32];
  std::vector<std::array<std::string, 3>> lines{{"Faction", "Average Score", r.count_label}};
  for (const FactionRow& row : r.rows) {
    std::snprintf(avg, sizeof avg, "%.2f", row.average);
    lines.push_back({row.faction, avg, group_thousands(row.games)});
  }
  std::array<std::size_t, 3> width{};
  for (const auto& l : lines)
    for (int c = 0; c < 3; ++c) width[c] = std::max(width[c], l[c].size());
  std::ostringstream out;
  out << r.title << '\n';
  for (const auto& l : lines) {
    out << l[0] << std::string(width[0] - l[0].size() + 2, ' ') << l[1] << std::string(width[1] - l[1].size() + 2, ' ')
        << l[2] << '\n';
  }
  out << r.agent_a << " vs " << r.agent_b << ": " << r.a_results[0] << " wins, " << r.a_results[1] << " ties, "
      << r.a_results[2] << " losses";
  if (r.iterations > 0) out << " (" << group_thousands(r.iterations) << " training iterations)";
  out << '\n';
  return out.str();
}

std::string to_json(const ScoreReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const FactionRow& row : r.rows) rows.push_back({{"faction", row.faction}, {"average", row.average}, {"games", row.games}});
  return nlohmann::json{{"title", r.title},
                        {"count_label", r.count_label},
                        {"rows", rows},
                        {"agent_a", r.agent_a},
                        {"agent_b", r.agent_b},
                        {"a_wins", r.a_results[0]},
                        {"a_ties", r.a_results[1]},
                        {"a_losses", r.a_results[2]},
                        {"iterations", r.iterations},
                        {"window", r.window}}
      .dump();
}

ScoreReport summarize(const std::vector<encoding::GameRecord>& records, const std::string& agent_a,
                      const std::string& agent_b) {
  ScoreReport r;
  r.agent_a = agent_a;
  r.agent_b = agent_b;
  r.window = static_cast<int>(records.size());
  std::map<int, std::pair<long, long>> per_faction;  // faction -> (score sum, games)
  for (const encoding::GameRecord& g : records) {
    const std::array<int, 2> score{g.scores.first, g.scores.second};
    for (int p = 0; p < 2; ++p) {
      auto& [sum, n] = per_faction[static_cast<int>(g.config.factions[p])];
      sum += score[p];
      n += 1;
    }
    const auto seat = g.tags.find("a_seat");
    if (seat == g.tags.end()) continue;
    const int a = std::stoi(seat->second);
    const int diff = score[a] - score[1 - a];
    ++r.a_results[diff > 0 ? 0 : (diff == 0 ? 1 : 2)];
  }
  // Table order: Halflings, then Engineers.
  for (Faction f : {Faction::Halflings, Faction::Engineers}) {
    const auto it = per_faction.find(static_cast<int>(f));
    if (it == per_faction.end()) continue;
    r.rows.push_back({faction_name(f), static_cast<double>(it->second.first) / it->second.second, it->second.second});
  }
  return r;
}

EvalResult evaluate(Agent& a, Agent& b, const EvalConfig& cfg) {
  EvalResult out;
  for (int i = 0; i < cfg.games; ++i) {
    GameConfig game;
    game.seed = mix_seed(cfg.seed, 300, static_cast<std::uint64_t>(i / 2));
    game.max_plies = cfg.max_plies;
    const int a_seat = i % 2;
    std::array<Agent*, 2> seats{};
    seats[a_seat] = &a;
    seats[1 - a_seat] = &b;
    encoding::GameRecord rec;
    rec.config = game;
    GameState s = new_game(game);
    while (!is_terminal(s)) {
      const Decision d = seats[s.to_move]->decide(s);
      rec.moves.push_back({d.action, s.to_move, d.pi, d.value});
      s = apply_action(s, encoding::index_to_action(d.action));
    }
    rec.scores = final_scores(s);
    rec.truncated = s.truncated;
    rec.tags["a_seat"] = std::to_string(a_seat);
    rec.tags["agent_a"] = a.name();
    rec.tags["agent_b"] = b.name();
    out.records.push_back(std::move(rec));
  }
  out.report = summarize(out.records, a.name(), b.name());
  return out;
}

}  // namespace terra::train
