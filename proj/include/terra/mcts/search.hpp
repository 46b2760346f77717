#pragma once

// PUCT Monte Carlo tree search.
//
// `Game` adapts a rules engine to the search:
//   using State;
//   static constexpr int kNumActions;
//   static bool is_terminal(const State&);
//   static int to_move(const State&);
//   static double terminal_value(const State&, int player);   // in [-1, 1]
//   static State apply(const State&, int action);
//   static std::vector<std::pair<int, double>> priors(const State&, const Evaluation&);
//       legal actions in increasing index order with renormalized priors
//
// Values are stored per edge from the perspective of the player acting on
// that edge; a leaf value reported for player p is negated for edges acted
// by the other player.

#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <vector>

namespace terra::mcts {

/// Raw evaluator output: main policy head, town policy head and the value
/// for the player to move.
struct Evaluation {
  std::vector<double> main;
  std::vector<double> town;
  double value = 0.0;
};

template <class State>
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual Evaluation evaluate(const State& state) = 0;
  /// Whether evaluate() may be called from several threads at once.
  virtual bool concurrent_calls_allowed() const { return false; }

  Evaluation evaluate_serialized(const State& state) {
    if (concurrent_calls_allowed()) return evaluate(state);
    std::lock_guard lock(mutex_);
    return evaluate(state);
  }

 private:
  std::mutex mutex_;
};

struct SearchConfig {
  int num_simulations = 800;
  double c_puct = 1.0;
  bool root_noise = false;
  double noise_alpha = 0.3;
  double noise_weight = 0.25;
  int temperature_plies = 10;
  /// Q(s,a) takes the latest backed-up value instead of the running mean.
  bool assign_backup = false;
  std::uint64_t seed = 0;
};

/// One simulation: actions from the root, the acting player of each, and the leaf value.
struct SimulationRecord {
  std::vector<int> path;
  std::vector<int> players;
  double leaf_value = 0.0;
  int leaf_player = 0;
};

struct Edge {
  int action = 0;
  double prior = 0.0;
  int visits = 0;
  double total = 0.0;
  double mean = 0.0;
  int child = -1;
};

template <class State>
struct Node {
  State state;
  int to_move = 0;
  bool terminal = false;
  bool expanded = false;
  int visits = 0;
  std::vector<Edge> edges;
};

struct SearchResult {
  std::vector<double> pi;  // visit shares over the whole action space
  std::vector<int> visits;
  double root_value = 0.0;  // mean backed-up value for the root player
  int root_player = 0;
};

/// Upper-confidence score of one edge.
inline double puct_score(double q, double prior, int node_visits, int edge_visits, double c_puct) {
  return q + c_puct * prior * std::sqrt(static_cast<double>(node_visits)) / (1.0 + edge_visits);
}

/// Index into `edges` maximizing the PUCT score; ties go to the lowest index.
inline std::size_t select_edge(const std::vector<Edge>& edges, int node_visits, double c_puct) {
  if (edges.empty()) throw std::logic_error("select_edge on a node without legal edges");
  std::size_t best = 0;
  double best_u = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const double u = puct_score(edges[i].mean, edges[i].prior, node_visits, edges[i].visits, c_puct);
    if (u > best_u) {
      best_u = u;
      best = i;
    }
  }
  return best;
}

template <class Game>
class Search {
 public:
  using State = typename Game::State;
  using NodeT = Node<State>;

  Search(Evaluator<State>& evaluator, SearchConfig config)
      : evaluator_(evaluator), config_(config), rng_(config.seed) {
    if (config_.num_simulations < 1) throw std::invalid_argument("num_simulations must be >= 1");
    if (!(config_.c_puct > 0.0)) throw std::invalid_argument("c_puct must be positive");
  }

  SearchResult run(const State& root, std::vector<SimulationRecord>* log = nullptr) {
    if (Game::is_terminal(root)) throw std::invalid_argument("search from a terminal state");
    nodes_.clear();
    nodes_.push_back(make_node(root));
    expand(0);
    if (config_.root_noise) add_root_noise();
    for (int i = 0; i < config_.num_simulations; ++i) simulate(log);
    return result();
  }

  const std::vector<NodeT>& nodes() const { return nodes_; }

  /// Expands an unexpanded, non-terminal node; returns the evaluator value for its player.
  double expand(int index) {
    NodeT& node = nodes_[index];
    if (node.terminal) throw std::logic_error("cannot expand a terminal node");
    if (node.expanded) throw std::logic_error("node already expanded");
    const Evaluation eval = evaluator_.evaluate_serialized(node.state);
    for (const auto& [action, prior] : Game::priors(node.state, eval)) {
      Edge e;
      e.action = action;
      e.prior = prior;
      node.edges.push_back(e);
    }
    node.expanded = true;
    node.visits = 1;
    return eval.value;
  }

  /// Adds one leaf value along a root-to-leaf path of (node, edge) pairs.
  void backup(const std::vector<std::pair<int, std::size_t>>& path, double leaf_value, int leaf_player) {
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      NodeT& node = nodes_[it->first];
      Edge& e = node.edges[it->second];
      const double v = node.to_move == leaf_player ? leaf_value : -leaf_value;
      e.visits += 1;
      e.total += v;
      e.mean = config_.assign_backup ? v : e.total / e.visits;
      node.visits += 1;
    }
  }

 private:
  NodeT make_node(const State& s) {
    NodeT n;
    n.state = s;
    n.terminal = Game::is_terminal(s);
    n.to_move = n.terminal ? 0 : Game::to_move(s);
    return n;
  }

  void simulate(std::vector<SimulationRecord>* log) {
    std::vector<std::pair<int, std::size_t>> path;
    int current = 0;
    double value = 0.0;
    int player = 0;
    while (true) {
      NodeT& node = nodes_[current];
      if (node.terminal) {
        value = Game::terminal_value(node.state, 0);
        player = 0;
        node.visits += 1;
        break;
      }
      if (!node.expanded) {
        player = node.to_move;
        value = expand(current);
        break;
      }
      const std::size_t e = select_edge(node.edges, node.visits, config_.c_puct);
      path.emplace_back(current, e);
      int child = node.edges[e].child;
      if (child < 0) {
        NodeT next = make_node(Game::apply(node.state, node.edges[e].action));
        nodes_.push_back(std::move(next));
        child = static_cast<int>(nodes_.size()) - 1;
        nodes_[current].edges[e].child = child;
      }
      current = child;
    }
    backup(path, value, player);
    if (log) {
      SimulationRecord rec;
      for (auto [n, e] : path) {
        rec.path.push_back(nodes_[n].edges[e].action);
        rec.players.push_back(nodes_[n].to_move);
      }
      rec.leaf_value = value;
      rec.leaf_player = player;
      log->push_back(std::move(rec));
    }
  }

  void add_root_noise() {
    auto& edges = nodes_[0].edges;
    std::gamma_distribution<double> gamma(config_.noise_alpha, 1.0);
    std::vector<double> noise(edges.size());
    double sum = 0.0;
    for (double& x : noise) sum += (x = gamma(rng_));
    if (!(sum > 0.0)) return;
    for (std::size_t i = 0; i < edges.size(); ++i)
      edges[i].prior = (1.0 - config_.noise_weight) * edges[i].prior + config_.noise_weight * noise[i] / sum;
  }

  SearchResult result() const {
    const NodeT& root = nodes_[0];
    SearchResult r;
    r.pi.assign(Game::kNumActions, 0.0);
    r.visits.assign(Game::kNumActions, 0);
    r.root_player = root.to_move;
    int total = 0;
    double value = 0.0;
    for (const Edge& e : root.edges) {
      r.visits[e.action] = e.visits;
      total += e.visits;
      value += e.total;
    }
    for (const Edge& e : root.edges) r.pi[e.action] = static_cast<double>(e.visits) / total;
    r.root_value = value / total;
    return r;
  }

  Evaluator<State>& evaluator_;
  SearchConfig config_;
  std::mt19937_64 rng_;
  std::vector<NodeT> nodes_;
};

/// Move choice from visit shares: temperature <= 0 picks the most visited
/// action (lowest index on ties), otherwise samples with weights pi^(1/t).
template <class Rng>
int select_move(const SearchResult& result, double temperature, Rng& rng) {
  if (temperature <= 1e-6) {
    int best = -1;
    for (std::size_t i = 0; i < result.visits.size(); ++i) {
      if (best < 0 || result.visits[i] > result.visits[best]) best = static_cast<int>(i);
    }
    return best;
  }
  std::vector<double> w(result.pi.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += (w[i] = result.pi[i] > 0 ? std::pow(result.pi[i], 1.0 / temperature) : 0.0);
  std::uniform_real_distribution<double> u(0.0, sum);
  double x = u(rng);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    if (x < w[i]) return static_cast<int>(i);
    x -= w[i];
  }
  for (std::size_t i = w.size(); i-- > 0;) {
    if (w[i] > 0.0) return static_cast<int>(i);
  }
  throw std::logic_error("select_move on an empty distribution");
}

}  // namespace terra::mcts
