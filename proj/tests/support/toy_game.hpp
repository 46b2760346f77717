#pragma once

// Small explicit game trees for search tests.

#include <random>
#include <vector>

#include "terra/mcts/search.hpp"

namespace terra::testing {

struct ToyTree {
  struct Node {
    int to_move = 0;
    bool terminal = false;
    double value0 = 0.0;        // terminal reward, or evaluator estimate, for player 0
    std::vector<int> children;  // action i leads to children[i]
    std::vector<double> prior;  // unnormalized; empty means uniform
  };
  std::vector<Node> nodes;

  int add(Node n) {
    nodes.push_back(std::move(n));
    return static_cast<int>(nodes.size()) - 1;
  }
};

struct ToyGame {
  struct State {
    const ToyTree* tree = nullptr;
    int node = 0;
    friend bool operator==(const State&, const State&) = default;
  };
  static constexpr int kNumActions = 4;

  static const ToyTree::Node& at(const State& s) { return s.tree->nodes[s.node]; }
  static bool is_terminal(const State& s) { return at(s).terminal; }
  static int to_move(const State& s) { return at(s).to_move; }
  static double terminal_value(const State& s, int player) { return player == 0 ? at(s).value0 : -at(s).value0; }
  static State apply(const State& s, int action) { return {s.tree, at(s).children.at(action)}; }
  static std::vector<std::pair<int, double>> priors(const State& s, const mcts::Evaluation& e) {
    const auto& n = at(s);
    std::vector<std::pair<int, double>> out;
    double total = 0.0;
    for (std::size_t i = 0; i < n.children.size(); ++i) total += e.main.empty() ? 1.0 : e.main[i];
    for (std::size_t i = 0; i < n.children.size(); ++i)
      out.emplace_back(static_cast<int>(i), (e.main.empty() ? 1.0 : e.main[i]) / total);
    return out;
  }
};

/// Reports each node's stored prior and its value0 seen by the player to move.
class ToyEvaluator : public mcts::Evaluator<ToyGame::State> {
 public:
  mcts::Evaluation evaluate(const ToyGame::State& s) override {
    ++calls;
    const auto& n = ToyGame::at(s);
    mcts::Evaluation e;
    if (!n.prior.empty()) e.main = n.prior;
    e.value = n.to_move == 0 ? n.value0 : -n.value0;
    return e;
  }
  int calls = 0;
};

/// Root (player 0) picks left or right; player 1 then picks one of two
/// terminals. Everything under left pays +1 to player 0, under right -1.
inline ToyTree two_ply_tree() {
  ToyTree t;
  const int root = t.add({0, false, 0.0, {}, {}});
  const int l1 = t.add({0, true, 1.0, {}, {}});
  const int l2 = t.add({0, true, 1.0, {}, {}});
  const int r1 = t.add({0, true, -1.0, {}, {}});
  const int r2 = t.add({0, true, -1.0, {}, {}});
  const int left = t.add({1, false, 0.0, {l1, l2}, {}});
  const int right = t.add({1, false, 0.0, {r1, r2}, {}});
  t.nodes[root].children = {left, right};
  return t;
}

/// Random tree with random movers (consecutive moves by one player occur),
/// evaluator values and priors.
inline ToyTree random_tree(std::uint64_t seed, int depth) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ToyTree t;
  auto build = [&](auto&& self, int d) -> int {
    ToyTree::Node n;
    n.to_move = static_cast<int>(rng() % 2);
    n.value0 = u(rng);
    if (d == 0 || (d < depth && rng() % 7 == 0)) {
      n.terminal = true;
      n.value0 = static_cast<double>(static_cast<int>(rng() % 3) - 1);
      return t.add(n);
    }
    const int k = 1 + static_cast<int>(rng() % 4);
    std::vector<int> kids;
    for (int i = 0; i < k; ++i) kids.push_back(self(self, d - 1));
    for (int i = 0; i < k; ++i) n.prior.push_back(0.05 + (u(rng) + 1.0));
    n.children = kids;
    return t.add(n);
  };
  const int root = build(build, depth);
  // Put the root first so State{&t, 0} is the root.
  std::swap(t.nodes[0], t.nodes[root]);
  for (auto& n : t.nodes) {
    for (int& c : n.children) {
      if (c == root) c = 0;
      else if (c == 0) c = root;
    }
  }
  return t;
}

}  // namespace terra::testing
