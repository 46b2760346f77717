#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "support/reference_game.hpp"
#include "support/tabular_oracle.hpp"
#include "support/toy_game.hpp"
#include "terra/mcts/sim_log.hpp"
#include "terra/mcts/terra_game.hpp"

using namespace terra;
using namespace terra::mcts;
using namespace terra::testing;

namespace {

using ToySearch = Search<ToyGame>;

SearchConfig cfg_with(int sims, std::uint64_t seed = 0) {
  SearchConfig c;
  c.num_simulations = sims;
  c.seed = seed;
  return c;
}

GameState post_setup() {
  GameState s = new_game(reference_config());
  for (const Action& a : reference_setup()) s = apply_action(s, a);
  return s;
}

// Follows recorded actions from the root.
template <class NodeT>
int child_by_path(const std::vector<NodeT>& nodes, const std::vector<int>& path, std::size_t len) {
  int cur = 0;
  for (std::size_t i = 0; i < len; ++i) {
    int next = -1;
    for (const Edge& e : nodes[cur].edges) {
      if (e.action == path[i]) next = e.child;
    }
    REQUIRE(next >= 0);
    cur = next;
  }
  return cur;
}

// Recomputes every edge Q from the log and compares it with the tree.
template <class NodeT>
void check_log_replay(const std::vector<NodeT>& nodes, const std::vector<SimulationRecord>& raw) {
  std::stringstream text;
  write_simulation_log(text, raw);
  const auto log = read_simulation_log(text);
  REQUIRE(log.size() == raw.size());

  std::map<std::vector<int>, std::pair<int, double>> stats;  // edge path -> (visits, sum)
  for (const auto& rec : log) {
    for (std::size_t i = 0; i < rec.path.size(); ++i) {
      std::vector<int> key(rec.path.begin(), rec.path.begin() + static_cast<long>(i) + 1);
      const double v = rec.players[i] == rec.leaf_player ? rec.leaf_value : -rec.leaf_value;
      stats[key].first += 1;
      stats[key].second += v;
    }
  }
  int checked = 0;
  for (const auto& [key, st] : stats) {
    const int parent = child_by_path(nodes, key, key.size() - 1);
    for (const Edge& e : nodes[parent].edges) {
      if (e.action != key.back()) continue;
      CHECK(e.visits == st.first);
      CHECK(std::abs(e.mean - st.second / st.first) < 1e-9);
      ++checked;
    }
  }
  CHECK(checked == static_cast<int>(stats.size()));
}

template <class NodeT>
void check_accounting(const std::vector<NodeT>& nodes) {
  for (const auto& node : nodes) {
    if (!node.expanded) continue;
    int sum = 0;
    double prior = 0.0;
    for (const Edge& e : node.edges) {
      sum += e.visits;
      prior += e.prior;
      if (e.visits > 0) CHECK(std::abs(e.mean - e.total / e.visits) < 1e-12);
    }
    CHECK(node.visits == 1 + sum);
    CHECK(std::abs(prior - 1.0) < 1e-9);
  }
}

}  // namespace

TEST_CASE("select_edge follows the PUCT formula") {
  std::vector<Edge> edges(2);
  edges[0].prior = 0.5;
  edges[1].prior = 0.5;
  CHECK(puct_score(0.0, 0.5, 1, 0, 1.0) == 0.5);
  CHECK(select_edge(edges, 1, 1.0) == 0);

  edges[0] = Edge{0, 0.1, 1, 0.2, 0.2, -1};
  edges[1] = Edge{1, 0.9, 1, 0.0, 0.0, -1};
  CHECK(puct_score(0.2, 0.1, 4, 1, 1.0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(puct_score(0.0, 0.9, 4, 1, 1.0) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(select_edge(edges, 4, 1.0) == 1);

  std::vector<Edge> one(1);
  one[0].mean = -1.0;
  CHECK(select_edge(one, 7, 1.0) == 0);
  CHECK_THROWS_AS(select_edge({}, 1, 1.0), std::logic_error);
}

TEST_CASE("select_edge on random tabular instances") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 12);
    std::vector<Edge> edges(k);
    int node_visits = 1;
    for (auto& e : edges) {
      e.prior = u(rng);
      e.visits = static_cast<int>(rng() % 20);
      e.mean = 2 * u(rng) - 1;
      node_visits += e.visits;
    }
    const double c = 0.1 + 3 * u(rng);
    std::size_t expect = 0;
    double best = -1e300;
    for (int i = 0; i < k; ++i) {
      const double direct = edges[i].mean + c * edges[i].prior * std::sqrt(double(node_visits)) / (1.0 + edges[i].visits);
      CHECK(std::abs(puct_score(edges[i].mean, edges[i].prior, node_visits, edges[i].visits, c) - direct) <= 1e-12);
      if (direct > best) {
        best = direct;
        expect = i;
      }
    }
    CHECK(select_edge(edges, node_visits, c) == expect);
  }
}

TEST_CASE("two-ply toy tree prefers the winning edge") {
  const ToyTree tree = two_ply_tree();
  ToyEvaluator eval;
  ToySearch search(eval, cfg_with(800));
  const SearchResult r = search.run({&tree, 0});
  CHECK(r.visits[0] + r.visits[1] == 800);
  CHECK(r.pi[0] > 0.9);

  TabularOracle small{tree, 1.0, {}, {}, {}, {}};
  const auto n800 = small.run(800);
  CHECK(n800[0] == r.visits[0]);
  CHECK(n800[1] == r.visits[1]);

  TabularOracle big{tree, 1.0, {}, {}, {}, {}};
  const auto n = big.run(10000);
  CHECK(double(n[0]) / (n[0] + n[1]) > 0.9);
}

TEST_CASE("search agrees with the tabular oracle on random trees") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const ToyTree tree = random_tree(seed, 5);
    ToyEvaluator eval;
    ToySearch search(eval, cfg_with(300));
    const SearchResult r = search.run({&tree, 0});
    TabularOracle oracle{tree, 1.0, {}, {}, {}, {}};
    const auto n = oracle.run(300);
    for (std::size_t a = 0; a < n.size(); ++a) CHECK(r.visits[a] == n[a]);
  }
}

TEST_CASE("expand initializes counts") {
  const GameState s = post_setup();
  UniformEvaluator eval;
  TerraSearch search(eval, cfg_with(1));
  search.run(s);
  const auto& root = search.nodes()[0];
  const std::size_t k = legal_actions(s).size();
  REQUIRE(root.edges.size() == k);
  for (const Edge& e : root.edges) CHECK(e.prior == doctest::Approx(1.0 / k).epsilon(1e-12));

  // A fresh child expanded by the single simulation.
  int expanded_children = 0;
  for (const auto& node : search.nodes()) {
    if (&node == &root || !node.expanded) continue;
    ++expanded_children;
    CHECK(node.visits == 1);
    for (const Edge& e : node.edges) {
      CHECK(e.visits == 0);
      CHECK(e.mean == 0.0);
    }
  }
  CHECK(expanded_children == 1);
}

TEST_CASE("expanding a terminal or expanded node is an error") {
  const ToyTree tree = two_ply_tree();
  ToyEvaluator eval;
  ToySearch search(eval, cfg_with(10));
  search.run({&tree, 0});
  CHECK_THROWS_AS(search.expand(0), std::logic_error);
  CHECK_THROWS_AS(search.run({&tree, 1}), std::invalid_argument);
  CHECK_THROWS_AS(ToySearch(eval, cfg_with(0)), std::invalid_argument);
  SearchConfig bad;
  bad.c_puct = 0.0;
  CHECK_THROWS_AS(ToySearch(eval, bad), std::invalid_argument);
}

TEST_CASE("backup signs and means") {
  // Root (player 0) -> one child (player 1) valued 0 by the evaluator.
  ToyTree tree;
  tree.add({0, false, 0.0, {1}, {}});
  tree.add({1, false, 0.0, {}, {}});
  ToyEvaluator eval;
  auto fresh = [&](SearchConfig cfg) {
    auto s = std::make_unique<ToySearch>(eval, cfg);
    s->run({&tree, 0});
    REQUIRE(s->nodes()[0].edges[0].visits == 1);
    REQUIRE(s->nodes()[0].edges[0].total == 0.0);
    return s;
  };

  // A value of 0.7 for the opponent reads as -0.7 at the root.
  auto opp = fresh(cfg_with(1));
  opp->backup({{0, 0}}, 0.7, 1);
  CHECK(opp->nodes()[0].edges[0].total == doctest::Approx(-0.7));
  CHECK(opp->nodes()[0].edges[0].mean == doctest::Approx(-0.35));

  auto own = fresh(cfg_with(1));
  own->backup({{0, 0}}, 0.7, 0);
  CHECK(own->nodes()[0].edges[0].total == doctest::Approx(0.7));

  // Mean of +1 and 0 is 0.5.
  auto mean = fresh(cfg_with(1));
  mean->backup({{0, 0}}, 1.0, 0);
  CHECK(mean->nodes()[0].edges[0].mean == 0.5);
  CHECK(mean->nodes()[0].edges[0].visits == 2);
  CHECK(mean->nodes()[0].visits == 3);

  SearchConfig assign = cfg_with(1);
  assign.assign_backup = true;
  auto lit = fresh(assign);
  lit->backup({{0, 0}}, 1.0, 0);
  lit->backup({{0, 0}}, -0.25, 0);
  CHECK(lit->nodes()[0].edges[0].mean == -0.25);
  CHECK(lit->nodes()[0].edges[0].total == 0.75);
}

TEST_CASE("visit accounting and log replay on the real game") {
  const GameState s = post_setup();
  UniformEvaluator eval;
  SearchConfig cfg;
  REQUIRE(cfg.num_simulations == 800);
  REQUIRE(cfg.c_puct == 1.0);
  TerraSearch search(eval, cfg);
  std::vector<SimulationRecord> log;
  const SearchResult r = search.run(s, &log);
  int total = 0;
  for (int v : r.visits) total += v;
  CHECK(total == 800);
  CHECK(log.size() == 800);
  check_accounting(search.nodes());
  check_log_replay(search.nodes(), log);

  const auto mask = encoding::legal_mask(s);
  double sum = 0;
  for (int i = 0; i < encoding::kNumActions; ++i) {
    if (!mask[i]) CHECK(r.pi[i] == 0.0);
    sum += r.pi[i];
  }
  CHECK(std::abs(sum - 1.0) < 1e-9);
}

TEST_CASE("log replay on random trees") {
  for (std::uint64_t seed = 30; seed < 40; ++seed) {
    const ToyTree tree = random_tree(seed, 6);
    ToyEvaluator eval;
    ToySearch search(eval, cfg_with(500));
    std::vector<SimulationRecord> log;
    search.run({&tree, 0}, &log);
    check_accounting(search.nodes());
    check_log_replay(search.nodes(), log);
  }
}

TEST_CASE("pending town choices are searched over town edges") {
  GameState s = new_game(reference_config());
  for (const Action& a : reference_actions()) {
    if (s.pending_towns > 0) break;
    s = apply_action(s, a);
  }
  REQUIRE(s.pending_towns > 0);
  UniformEvaluator eval;
  TerraSearch search(eval, cfg_with(50));
  const SearchResult r = search.run(s);
  CHECK(search.nodes()[0].edges.size() == 5);
  double town = 0;
  for (int k = 0; k < 5; ++k) town += r.pi[encoding::kTownIndex + k];
  CHECK(town == doctest::Approx(1.0));
}

TEST_CASE("search is deterministic") {
  const GameState s = post_setup();
  UniformEvaluator eval;
  SearchConfig cfg = cfg_with(200, 9);
  const SearchResult a = TerraSearch(eval, cfg).run(s);
  const SearchResult b = TerraSearch(eval, cfg).run(s);
  CHECK(a.visits == b.visits);
  CHECK(a.root_value == b.root_value);

  cfg.root_noise = true;
  const SearchResult c = TerraSearch(eval, cfg).run(s);
  const SearchResult d = TerraSearch(eval, cfg).run(s);
  CHECK(c.visits == d.visits);
  CHECK(c.pi == d.pi);
}

TEST_CASE("root noise keeps priors a distribution") {
  const ToyTree tree = random_tree(77, 4);
  ToyEvaluator eval;
  SearchConfig cfg = cfg_with(50, 3);
  cfg.root_noise = true;
  ToySearch search(eval, cfg);
  search.run({&tree, 0});
  double sum = 0;
  for (const Edge& e : search.nodes()[0].edges) sum += e.prior;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero-sum consistency under relabeled players") {
  for (std::uint64_t seed = 50; seed < 60; ++seed) {
    const ToyTree tree = random_tree(seed, 5);
    ToyTree swapped = tree;
    for (auto& n : swapped.nodes) {
      n.to_move = 1 - n.to_move;
      n.value0 = -n.value0;
    }
    ToyEvaluator ea;
    ToyEvaluator eb;
    const SearchResult a = ToySearch(ea, cfg_with(400)).run({&tree, 0});
    const SearchResult b = ToySearch(eb, cfg_with(400)).run({&swapped, 0});
    const double a0 = a.root_player == 0 ? a.root_value : -a.root_value;
    const double b0 = b.root_player == 0 ? b.root_value : -b.root_value;
    CHECK(std::abs(a0 + b0) < 1e-6);
  }
}

TEST_CASE("select_move") {
  std::mt19937_64 rng(1);
  SearchResult r;
  r.pi = {0.7, 0.3};
  r.visits = {7, 3};
  CHECK(select_move(r, 0.0, rng) == 0);
  r.pi = {0.5, 0.5};
  r.visits = {5, 5};
  CHECK(select_move(r, 0.0, rng) == 0);

  r.pi = {0.0, 0.2, 0.5, 0.3};
  r.visits = {0, 2, 5, 3};
  std::array<int, 4> counts{};
  for (int i = 0; i < 10000; ++i) ++counts[select_move(r, 1.0, rng)];
  CHECK(counts[0] == 0);
  for (int i = 1; i < 4; ++i) CHECK(std::abs(counts[i] / 10000.0 - r.pi[i]) < 0.02);
}

namespace {

class CountingEvaluator : public TerraEvaluator {
 public:
  Evaluation evaluate(const GameState& s) override {
    const int now = ++active;
    int seen = peak.load();
    while (now > seen && !peak.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(std::chrono::microseconds(50));
    Evaluation e = inner.evaluate(s);
    --active;
    return e;
  }
  std::atomic<int> active{0};
  std::atomic<int> peak{0};
  UniformEvaluator inner;
};

}  // namespace

TEST_CASE("evaluators without concurrency support are serialized") {
  const GameState s = post_setup();
  CountingEvaluator eval;
  auto work = [&] { TerraSearch(eval, cfg_with(60)).run(s); };
  std::thread a(work);
  std::thread b(work);
  a.join();
  b.join();
  CHECK(eval.peak.load() == 1);
}
