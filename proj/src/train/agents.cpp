#include "terra/train/agents.hpp"

#include <stdexcept>

#include "terra/nn/checkpoint.hpp"

namespace terra::train {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = seed;
  for (std::uint64_t part : {a, b}) {
    z += 0x9e3779b97f4a7c15ULL + part;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
  }
  return z;
}

mcts::Evaluation NetworkEvaluator::evaluate(const GameState& state) {
  const std::vector<GameState> one{state};
  const nn::Output<double> out = net_.forward(nn::encode_inputs<double>(std::span(one)), nn::Mode::Inference);
  mcts::Evaluation e;
  e.main.assign(out.main.data(), out.main.data() + out.main.size());
  e.town.assign(out.town.data(), out.town.data() + out.town.size());
  e.value = out.value(0);
  return e;
}

Action random_legal_action(const GameState& state, std::mt19937_64& rng) {
  if (is_terminal(state)) throw std::invalid_argument("no move in a terminal state");
  const std::vector<Action> moves = legal_actions(state);
  std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
  return moves[pick(rng)];
}

Decision RandomAgent::decide(const GameState& state) {
  return {encoding::action_to_index(random_legal_action(state, rng_)), {}, std::nullopt};
}

MctsAgent::MctsAgent(mcts::TerraEvaluator& evaluator, mcts::SearchConfig config, std::string name)
    : evaluator_(evaluator), config_(config), name_(std::move(name)), rng_(mix_seed(config.seed, 1)) {}

Decision MctsAgent::decide(const GameState& state) {
  if (is_terminal(state)) throw std::invalid_argument("no move in a terminal state");
  mcts::SearchConfig cfg = config_;
  cfg.seed = mix_seed(config_.seed, 2, static_cast<std::uint64_t>(state.ply));
  mcts::TerraSearch search(evaluator_, cfg);
  const mcts::SearchResult r = search.run(state);
  const double temperature = state.ply < config_.temperature_plies ? 1.0 : 0.0;
  Decision d;
  d.action = mcts::select_move(r, temperature, rng_);
  for (std::size_t i = 0; i < r.pi.size(); ++i) {
    if (r.pi[i] > 0) d.pi.emplace_back(static_cast<int>(i), r.pi[i]);
  }
  d.value = r.root_value;
  return d;
}

std::shared_ptr<LoadedNetwork> load_network(const std::filesystem::path& checkpoint) {
  return std::make_shared<LoadedNetwork>(nn::load_checkpoint<double>(checkpoint));
}

AgentHandle make_agent(const std::string& id, const mcts::SearchConfig& search, std::shared_ptr<LoadedNetwork> network) {
  AgentHandle h;
  if (id == "random") {
    h.agent = std::make_unique<RandomAgent>(search.seed);
    return h;
  }
  if (id == "uniform") {
    h.evaluator = std::make_shared<mcts::UniformEvaluator>();
  } else {
    if (!network) network = load_network(id);
    // Aliasing constructor: the evaluator keeps the network alive.
    h.evaluator = std::shared_ptr<mcts::TerraEvaluator>(network, &network->evaluator);
  }
  h.agent = std::make_unique<MctsAgent>(*h.evaluator, search, id);
  return h;
}

}  // namespace terra::train
