// Command-line entry points: train, selfplay, eval, play, serve.
//
// Exit status: 0 on success, 2 on bad usage (unknown subcommand or flag),
// 1 on runtime errors.

#include <csignal>
#include <fstream>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "terra/encoding/codec.hpp"
#include "terra/nn/checkpoint.hpp"
#include "terra/server/api.hpp"
#include "terra/train/evaluate.hpp"
#include "terra/train/loop.hpp"
#include "terra/train/selfplay.hpp"

namespace fs = std::filesystem;
using namespace terra;

namespace {

struct TrainOpts {
  std::string preset = "desk";
  int cycles = 2;
  int games = -1;
  int steps = -1;
  int sims = -1;
  std::uint64_t seed = 0;
  std::string out = "run";
  bool resume = false;
};

struct SelfPlayOpts {
  std::string checkpoint;
  int games = 1;
  int sims = 25;
  std::uint64_t seed = 0;
  std::string out;
};

struct EvalOpts {
  int games = 50;
  std::string agent_a = "random";
  std::string agent_b = "random";
  std::uint64_t seed = 0;
  int sims = 100;
  int max_plies = 500;
  std::string records;
  bool json = false;
};

struct PlayOpts {
  std::string agent = "random";
  int seat = 0;
  int sims = 100;
  std::uint64_t seed = 0;
};

struct ServeOpts {
  std::string config;
  std::string host;
  int port = -1;
  std::string data_dir;
  std::string checkpoint_dir;
};

int run_train(const TrainOpts& o) {
  train::TrainConfig cfg = train::TrainConfig::desk();
  if (o.preset == "full") {
    cfg.net = nn::NetworkConfig::full();
    cfg.search.num_simulations = 800;
  }
  cfg.cycles = o.cycles;
  if (o.games > 0) cfg.games_per_cycle = o.games;
  if (o.steps >= 0) cfg.steps_per_cycle = o.steps;
  if (o.sims > 0) cfg.search.num_simulations = o.sims;
  cfg.seed = o.seed;
  cfg.out_dir = o.out;
  cfg.resume = o.resume;
  const auto written = train::training_loop(cfg, [](const std::string& line) { std::cerr << line << '\n'; });
  for (const fs::path& p : written) std::cout << p.string() << '\n';
  return 0;
}

int run_selfplay(const SelfPlayOpts& o) {
  nn::Network<double> net = o.checkpoint.empty() ? nn::Network<double>(nn::NetworkConfig::desk(), o.seed)
                                                 : nn::load_checkpoint<double>(o.checkpoint);
  train::SelfPlayConfig cfg;
  cfg.search.num_simulations = o.sims;
  std::ofstream file;
  if (!o.out.empty()) file.open(o.out, std::ios::app);
  std::ostream& out = o.out.empty() ? std::cout : file;
  for (int g = 0; g < o.games; ++g) {
    const train::Trajectory t = train::play_selfplay_game(net, cfg, train::mix_seed(o.seed, 700, g));
    out << encoding::to_json_line(t.record) << '\n';
    std::cerr << "game " << g + 1 << ": " << t.scores.first << " - " << t.scores.second
              << (t.truncated ? " (truncated)" : "") << '\n';
  }
  return 0;
}

int run_eval(const EvalOpts& o) {
  mcts::SearchConfig search;
  search.num_simulations = o.sims;
  search.temperature_plies = 0;
  search.seed = train::mix_seed(o.seed, 600, 0);
  train::AgentHandle a = train::make_agent(o.agent_a, search);
  search.seed = train::mix_seed(o.seed, 600, 1);
  train::AgentHandle b = train::make_agent(o.agent_b, search);
  train::EvalConfig cfg;
  cfg.games = o.games;
  cfg.seed = o.seed;
  cfg.max_plies = o.max_plies;
  train::EvalResult r = train::evaluate(*a.agent, *b.agent, cfg);
  r.report.title = "Evaluation Average Scores";
  r.report.count_label = "Games";
  if (!o.records.empty()) {
    for (const auto& rec : r.records) encoding::append_record(o.records, rec);
  }
  std::cout << (o.json ? train::to_json(r.report) + "\n" : train::render_table(r.report));
  return 0;
}

std::string board_text(const GameState& s) {
  std::ostringstream out;
  for (int row = 0; row < kRows; ++row) {
    out << static_cast<char>('A' + row) << ' ' << (is_shifted_row(row) ? "  " : "");
    for (int col = 0; col < kCols; ++col) {
      const HexId h = hex_id(row, col);
      if (!on_map(h)) continue;
      const HexState& hex = s.hexes[h];
      std::string cell(1, hex.terrain == Terrain::Water ? '~' : terrain_name(hex.terrain)[0]);
      if (hex.building != Building::None) cell += std::string(1, building_name(hex.building)[0]) + std::to_string(hex.owner);
      cell.resize(4, ' ');
      out << cell;
    }
    out << '\n';
  }
  return out.str();
}

void print_status(const GameState& s) {
  std::cout << "\nround " << s.round << ", ply " << s.ply << '\n' << board_text(s);
  for (int p = 0; p < kNumPlayers; ++p) {
    const PlayerState& ps = s.players[p];
    std::cout << p << ' ' << faction_name(ps.faction) << ": " << ps.vp << " VP, " << ps.workers << "W " << ps.priests
              << "P " << ps.coins << "C, power " << ps.bowls[0] << '/' << ps.bowls[1] << '/' << ps.bowls[2]
              << ", cults";
    for (int c : ps.cult) std::cout << ' ' << c;
    std::cout << (ps.passed ? ", passed" : "") << '\n';
  }
}

int run_play(const PlayOpts& o) {
  if (o.seat != 0 && o.seat != 1) throw std::invalid_argument("--seat must be 0 or 1");
  GameConfig game;
  game.seed = o.seed;
  GameState s = new_game(game);
  mcts::SearchConfig search;
  search.num_simulations = o.sims;
  search.temperature_plies = 0;
  search.seed = train::mix_seed(o.seed, 500);
  train::AgentHandle agent = train::make_agent(o.agent, search);
  while (!is_terminal(s)) {
    if (s.to_move != o.seat) {
      const train::Decision d = agent.agent->decide(s);
      std::cout << "agent: " << describe(encoding::index_to_action(d.action)) << '\n';
      s = apply_action(s, encoding::index_to_action(d.action));
      continue;
    }
    print_status(s);
    const encoding::ActionMask mask = encoding::legal_mask(s);
    for (int i = 0; i < encoding::kNumActions; ++i)
      if (mask[i]) std::cout << "  [" << i << "] " << describe(encoding::index_to_action(i)) << '\n';
    std::cout << "your move (index, q to quit): " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line) || line == "q") return 0;
    int index = -1;
    try {
      index = std::stoi(line);
    } catch (const std::exception&) {
    }
    if (index < 0 || index >= encoding::kNumActions) {
      std::cout << "not an action index\n";
      continue;
    }
    const Action a = encoding::index_to_action(index);
    if (const auto why = check_action(s, a)) {
      std::cout << "illegal: " << *why << '\n';
      continue;
    }
    s = apply_action(s, a);
  }
  print_status(s);
  const auto [a, b] = final_scores(s);
  std::cout << "final: " << a << " - " << b << '\n';
  return 0;
}

server::HttpServer* g_server = nullptr;

int run_serve(const ServeOpts& o) {
  server::ServerConfig cfg = server::load_server_config(o.config, server::environment_overrides());
  if (!o.host.empty()) cfg.host = o.host;
  if (o.port >= 0) cfg.port = o.port;
  if (!o.data_dir.empty()) cfg.data_dir = o.data_dir;
  if (!o.checkpoint_dir.empty()) cfg.checkpoint_dir = o.checkpoint_dir;
  server::Api api(cfg);
  server::HttpServer http(api);
  const int port = http.bind(cfg.host, cfg.port);
  if (port < 0) throw std::runtime_error("cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
  std::cerr << "listening on http://" << cfg.host << ':' << port << " (" << api.session_count() << " sessions)\n";
  g_server = &http;
  std::signal(SIGINT, [](int) { g_server->stop(); });
  std::signal(SIGTERM, [](int) { g_server->stop(); });
  http.listen();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Terra Mystica self-play training and play"};
  app.require_subcommand(1);

  TrainOpts train_o;
  auto* train_cmd = app.add_subcommand("train", "run self-play training cycles, writing checkpoints");
  train_cmd->add_option("--preset", train_o.preset, "network size")->check(CLI::IsMember({"desk", "full"}));
  train_cmd->add_option("--cycles", train_o.cycles, "cycles to run")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--games", train_o.games, "self-play games per cycle")->check(CLI::PositiveNumber);
  train_cmd->add_option("--steps", train_o.steps, "SGD steps per cycle")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--sims", train_o.sims, "simulations per move")->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", train_o.seed);
  train_cmd->add_option("--out", train_o.out, "run directory");
  train_cmd->add_flag("--resume", train_o.resume, "continue from the newest checkpoint in --out");

  SelfPlayOpts sp_o;
  auto* sp_cmd = app.add_subcommand("selfplay", "play self-play games and print their records");
  sp_cmd->add_option("--checkpoint", sp_o.checkpoint, "network (default: fresh desk network)");
  sp_cmd->add_option("--games", sp_o.games)->check(CLI::PositiveNumber);
  sp_cmd->add_option("--sims", sp_o.sims)->check(CLI::PositiveNumber);
  sp_cmd->add_option("--seed", sp_o.seed);
  sp_cmd->add_option("--out", sp_o.out, "append records to this file instead of stdout");

  EvalOpts ev_o;
  auto* ev_cmd = app.add_subcommand("eval", "play agent A against agent B and print a score report");
  ev_cmd->add_option("--games", ev_o.games)->check(CLI::PositiveNumber);
  ev_cmd->add_option("--agent-a", ev_o.agent_a, "random, uniform or a checkpoint path");
  ev_cmd->add_option("--agent-b", ev_o.agent_b, "random, uniform or a checkpoint path");
  ev_cmd->add_option("--seed", ev_o.seed);
  ev_cmd->add_option("--sims", ev_o.sims, "simulations per search move")->check(CLI::PositiveNumber);
  ev_cmd->add_option("--max-plies", ev_o.max_plies)->check(CLI::PositiveNumber);
  ev_cmd->add_option("--records", ev_o.records, "append game records to this file");
  ev_cmd->add_flag("--json", ev_o.json, "print the report as JSON");

  PlayOpts play_o;
  auto* play_cmd = app.add_subcommand("play", "play against an agent in the terminal");
  play_cmd->add_option("--agent", play_o.agent, "random, uniform or a checkpoint path");
  play_cmd->add_option("--seat", play_o.seat, "0 plays Halflings, 1 Engineers");
  play_cmd->add_option("--sims", play_o.sims)->check(CLI::PositiveNumber);
  play_cmd->add_option("--seed", play_o.seed);

  ServeOpts serve_o;
  auto* serve_cmd = app.add_subcommand("serve", "start the HTTP/JSON game service");
  serve_cmd->add_option("--config", serve_o.config, "JSON server config file");
  serve_cmd->add_option("--host", serve_o.host);
  serve_cmd->add_option("--port", serve_o.port)->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--data-dir", serve_o.data_dir, "session storage");
  serve_cmd->add_option("--checkpoint-dir", serve_o.checkpoint_dir);

  if (argc > 1 && argv[1][0] != '-' && !app.get_subcommand_no_throw(argv[1])) {
    std::cerr << "unknown subcommand: " << argv[1] << "\n\n" << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {  // --help
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*train_cmd) return run_train(train_o);
    if (*sp_cmd) return run_selfplay(sp_o);
    if (*ev_cmd) return run_eval(ev_o);
    if (*play_cmd) return run_play(play_o);
    if (*serve_cmd) return run_serve(serve_o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
