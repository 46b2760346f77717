#pragma once

#include <utility>
#include <vector>

#include "terra/encoding/codec.hpp"
#include "terra/mcts/search.hpp"
#include "terra/rules/engine.hpp"

namespace terra::mcts {

/// Search adapter over the rules engine and the action codec.
struct TerraGame {
  using State = GameState;
  static constexpr int kNumActions = encoding::kNumActions;

  static bool is_terminal(const State& s) { return terra::is_terminal(s); }
  static int to_move(const State& s) { return s.to_move; }
  static double terminal_value(const State& s, int player) { return outcome(s, player); }
  static State apply(const State& s, int action) { return apply_action(s, encoding::index_to_action(action)); }

  static std::vector<std::pair<int, double>> priors(const State& s, const Evaluation& eval) {
    const encoding::ActionMask mask = encoding::legal_mask(s);
    const encoding::MaskedPolicy p = encoding::mask_and_renormalize(eval.main, eval.town, mask);
    std::vector<std::pair<int, double>> out;
    for (int i = 0; i < kNumActions; ++i) {
      if (!mask[i]) continue;
      out.emplace_back(i, i < encoding::kNumMainActions ? p.main[i] : p.town[i - encoding::kNumMainActions]);
    }
    return out;
  }
};

using TerraSearch = Search<TerraGame>;
using TerraEvaluator = Evaluator<GameState>;

/// Uniform priors and zero value.
class UniformEvaluator : public TerraEvaluator {
 public:
  Evaluation evaluate(const GameState&) override {
    return {std::vector<double>(encoding::kNumMainActions, 1.0), std::vector<double>(encoding::kNumTownActions, 1.0), 0.0};
  }
  bool concurrent_calls_allowed() const override { return true; }
};

}  // namespace terra::mcts
