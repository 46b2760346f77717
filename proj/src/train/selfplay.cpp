#include "terra/train/selfplay.hpp"

namespace terra::train {

namespace {

std::array<int, 2> z_from_scores(std::pair<int, int> s) {
  const int a = s.first > s.second ? 1 : (s.first < s.second ? -1 : 0);
  return {a, -a};
}

}  // namespace

Trajectory play_selfplay_game(nn::Network<double>& net, const SelfPlayConfig& cfg, std::uint64_t seed) {
  NetworkEvaluator evaluator(net);
  mcts::SearchConfig search = cfg.search;
  search.root_noise = true;
  search.seed = mix_seed(seed, 11);
  MctsAgent agent(evaluator, search, "selfplay");

  GameConfig game;
  game.seed = mix_seed(seed, 12);
  game.max_plies = cfg.max_plies;
  GameState s = new_game(game);

  Trajectory t;
  t.record.config = game;
  while (!is_terminal(s)) {
    const Decision d = agent.decide(s);
    t.steps.push_back({s, d.pi, s.to_move});
    t.record.moves.push_back({d.action, s.to_move, d.pi, d.value});
    s = apply_action(s, encoding::index_to_action(d.action));
  }
  t.scores = final_scores(s);
  t.z = z_from_scores(t.scores);
  t.truncated = s.truncated;
  t.record.scores = t.scores;
  t.record.truncated = s.truncated;
  return t;
}

Trajectory trajectory_from_record(const encoding::GameRecord& record) {
  Trajectory t;
  t.record = record;
  GameState s = new_game(record.config);
  for (const encoding::MoveRecord& m : record.moves) {
    t.steps.push_back({s, m.pi, m.player});
    s = apply_action(s, encoding::index_to_action(m.action));
  }
  t.scores = record.scores;
  t.z = z_from_scores(record.scores);
  t.truncated = record.truncated;
  return t;
}

}  // namespace terra::train
