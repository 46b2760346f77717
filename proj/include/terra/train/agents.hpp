#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "terra/mcts/terra_game.hpp"
#include "terra/nn/network.hpp"

namespace terra::train {

/// splitmix64 finalizer; derives independent seeds from (seed, a, b).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Network policy and value for the player to move, inference mode.
class NetworkEvaluator : public mcts::TerraEvaluator {
 public:
  explicit NetworkEvaluator(nn::Network<double>& net) : net_(net) {}
  mcts::Evaluation evaluate(const GameState& state) override;

 private:
  nn::Network<double>& net_;
};

struct Decision {
  int action = 0;
  std::vector<std::pair<int, double>> pi;  // sparse visit shares; empty for non-search agents
  std::optional<double> value;             // root value for the mover
};

class Agent {
 public:
  virtual ~Agent() = default;
  /// Throws std::invalid_argument on a terminal state.
  virtual Decision decide(const GameState& state) = 0;
  virtual std::string name() const = 0;
};

/// Uniform over legal actions.
Action random_legal_action(const GameState& state, std::mt19937_64& rng);

class RandomAgent : public Agent {
 public:
  explicit RandomAgent(std::uint64_t seed) : rng_(seed) {}
  Decision decide(const GameState& state) override;
  std::string name() const override { return "random"; }

 private:
  std::mt19937_64 rng_;
};

/// PUCT search guided by an evaluator. Samples from visit shares for the
/// first `temperature_plies` plies of a game, then plays the most visited move.
class MctsAgent : public Agent {
 public:
  MctsAgent(mcts::TerraEvaluator& evaluator, mcts::SearchConfig config, std::string name = "mcts");
  Decision decide(const GameState& state) override;
  std::string name() const override { return name_; }

 private:
  mcts::TerraEvaluator& evaluator_;
  mcts::SearchConfig config_;
  std::string name_;
  std::mt19937_64 rng_;
};

/// Shared, thread-safe evaluator for a loaded checkpoint.
struct LoadedNetwork {
  explicit LoadedNetwork(nn::Network<double> n) : net(std::move(n)), evaluator(net) {}
  nn::Network<double> net;
  NetworkEvaluator evaluator;  // calls are serialized by the evaluator mutex
};

std::shared_ptr<LoadedNetwork> load_network(const std::filesystem::path& checkpoint);

/// Agent built from an id: "random", "uniform" (search with uniform priors
/// and zero value) or a checkpoint path. `network` may carry an already
/// loaded checkpoint; otherwise it is loaded from the id.
struct AgentHandle {
  std::shared_ptr<mcts::TerraEvaluator> evaluator;
  std::unique_ptr<Agent> agent;
};

AgentHandle make_agent(const std::string& id, const mcts::SearchConfig& search,
                       std::shared_ptr<LoadedNetwork> network = nullptr);

}  // namespace terra::train
