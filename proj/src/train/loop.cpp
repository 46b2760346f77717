#include "terra/train/loop.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include "json.hpp"
#include <regex>

#include "terra/nn/checkpoint.hpp"
#include "terra/train/replay_buffer.hpp"

namespace terra::train {

namespace {

using json = nlohmann::json;

int latest_cycle(const std::filesystem::path& dir) {
  int best = 0;
  if (!std::filesystem::exists(dir)) return 0;
  const std::regex pattern(R"(checkpoint_(\d{4})\.bin)");
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, pattern)) best = std::max(best, std::stoi(m[1]));
  }
  return best;
}

int record_cycle(const encoding::GameRecord& r) {
  const auto it = r.tags.find("cycle");
  return it == r.tags.end() ? -1 : std::stoi(it->second);
}

void append_line(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::app);
  out << j.dump() << '\n';
}

}  // namespace

TrainConfig TrainConfig::desk() {
  TrainConfig c;
  c.search.num_simulations = 25;
  return c;
}

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, int cycle) {
  char name[32];
  std::snprintf(name, sizeof name, "checkpoint_%04d.bin", cycle);
  return dir / name;
}

std::vector<std::filesystem::path> training_loop(const TrainConfig& cfg,
                                                 const std::function<void(const std::string&)>& log) {
  cfg.net.validate();
  if (cfg.games_per_cycle < 1 || cfg.steps_per_cycle < 0 || cfg.cycles < 0)
    throw std::invalid_argument("bad training schedule");
  std::filesystem::create_directories(cfg.out_dir);
  const auto games_path = cfg.out_dir / "games.jsonl";
  const auto metrics_path = cfg.out_dir / "metrics.jsonl";
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };

  nn::Network<double> net(cfg.net, mix_seed(cfg.seed, 1));
  ReplayBuffer buffer(cfg.buffer_capacity);
  int start = 0;
  if (cfg.resume && (start = latest_cycle(cfg.out_dir)) > 0) {
    net = nn::load_checkpoint<double>(checkpoint_path(cfg.out_dir, start));
    // Keep only games of finished cycles so the file matches the checkpoint.
    std::vector<encoding::GameRecord> kept;
    if (std::filesystem::exists(games_path)) {
      for (const auto& r : encoding::read_records(games_path)) {
        if (record_cycle(r) >= 0 && record_cycle(r) < start) kept.push_back(r);
      }
    }
    std::filesystem::remove(games_path);
    for (const auto& r : kept) {
      encoding::append_record(games_path, r);
      if (!r.truncated || cfg.use_truncated_games) buffer.add(trajectory_from_record(r));
    }
    say("resumed at cycle " + std::to_string(start) + " with " + std::to_string(buffer.size()) + " examples");
  } else {
    std::filesystem::remove(games_path);
    std::filesystem::remove(metrics_path);
  }

  SelfPlayConfig sp;
  sp.search = cfg.search;
  sp.max_plies = cfg.max_plies;
  std::vector<std::filesystem::path> written;
  for (int cycle = start; cycle < cfg.cycles; ++cycle) {
    try {
      std::array<int, 3> balance{};  // z = +1, 0, -1 over new examples
      for (int g = 0; g < cfg.games_per_cycle; ++g) {
        Trajectory t = play_selfplay_game(net, sp, mix_seed(cfg.seed, 100 + cycle, g));
        t.record.tags["cycle"] = std::to_string(cycle);
        t.record.tags["game"] = std::to_string(g);
        encoding::append_record(games_path, t.record);
        say("cycle " + std::to_string(cycle + 1) + " game " + std::to_string(g + 1) + ": " +
            std::to_string(t.scores.first) + "-" + std::to_string(t.scores.second) + " in " +
            std::to_string(t.steps.size()) + " plies" + (t.truncated ? " (truncated)" : ""));
        if (t.truncated && !cfg.use_truncated_games) continue;
        for (const TrajectoryStep& s : t.steps) ++balance[1 - t.z[s.player]];
        buffer.add(t);
      }
      append_line(metrics_path, {{"cycle", cycle + 1}, {"z_balance", {{"win", balance[0]}, {"tie", balance[1]}, {"loss", balance[2]}}},
                                 {"buffer", buffer.size()}});

      buffer.reseed(mix_seed(cfg.seed, 200 + cycle));
      const int batch = std::min<int>(cfg.net.batch_size, 128);
      for (int k = 0; k < cfg.steps_per_cycle && buffer.size() > 0; ++k) {
        const nn::LossParts l = net.train_step(buffer.sample(batch));
        append_line(metrics_path, {{"cycle", cycle + 1}, {"step", net.step()}, {"loss", l.total()}, {"value", l.value},
                                   {"policy", l.policy}, {"town", l.town}, {"l2", l.l2}});
      }
    } catch (...) {
      nn::save_checkpoint(net, cfg.out_dir / "checkpoint_abort.bin");
      throw;
    }
    const auto path = checkpoint_path(cfg.out_dir, cycle + 1);
    nn::save_checkpoint(net, path);
    written.push_back(path);
    say("wrote " + path.string());
  }
  return written;
}

}  // namespace terra::train
