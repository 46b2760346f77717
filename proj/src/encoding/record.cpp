#include "terra/encoding/record.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "terra/encoding/codec.hpp"

namespace terra::encoding {

namespace {

using nlohmann::json;

json config_json(const GameConfig& c) {
  return {{"seed", c.seed},
          {"scoring_tiles", c.scoring_tiles},
          {"bonus_cards", c.bonus_cards},
          {"factions", {faction_name(c.factions[0]), faction_name(c.factions[1])}},
          {"max_plies", c.max_plies}};
}

Faction faction_from(const std::string& name) {
  if (name == "Halflings") return Faction::Halflings;
  if (name == "Engineers") return Faction::Engineers;
  throw std::invalid_argument("unknown faction: " + name);
}

GameConfig config_from(const json& j) {
  GameConfig c;
  c.seed = j.value("seed", std::uint64_t{0});
  c.scoring_tiles = j.value("scoring_tiles", std::vector<int>{});
  c.bonus_cards = j.value("bonus_cards", std::vector<int>{});
  if (j.contains("factions")) {
    const auto& f = j.at("factions");
    if (!f.is_array() || f.size() != 2) throw std::invalid_argument("factions must list two names");
    c.factions = {faction_from(f[0].get<std::string>()), faction_from(f[1].get<std::string>())};
  }
  c.max_plies = j.value("max_plies", 500);
  return c;
}

}  // namespace

std::string config_to_json(const GameConfig& config) { return config_json(config).dump(); }

GameConfig config_from_json(const std::string& text) {
  try {
    return config_from(json::parse(text));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad game config: ") + e.what());
  }
}

std::string to_json_line(const GameRecord& r) {
  json moves = json::array();
  for (const MoveRecord& m : r.moves) {
    json mj = {{"a", m.action}, {"p", m.player}};
    if (!m.pi.empty()) mj["pi"] = m.pi;
    if (m.value) mj["v"] = *m.value;
    moves.push_back(std::move(mj));
  }
  json j = {{"config", config_json(r.config)},
            {"moves", std::move(moves)},
            {"scores", {r.scores.first, r.scores.second}},
            {"truncated", r.truncated}};
  if (!r.tags.empty()) j["tags"] = r.tags;
  return j.dump();
}

GameRecord parse_record(const std::string& line) {
  try {
    const json j = json::parse(line);
    GameRecord r;
    r.config = config_from(j.at("config"));
    for (const json& mj : j.at("moves")) {
      MoveRecord m;
      m.action = mj.at("a").get<int>();
      m.player = mj.value("p", 0);
      if (mj.contains("pi")) m.pi = mj.at("pi").get<std::vector<std::pair<int, double>>>();
      if (mj.contains("v")) m.value = mj.at("v").get<double>();
      r.moves.push_back(std::move(m));
    }
    const auto scores = j.at("scores").get<std::vector<int>>();
    if (scores.size() != 2) throw std::invalid_argument("scores must have two entries");
    r.scores = {scores[0], scores[1]};
    r.truncated = j.value("truncated", false);
    if (j.contains("tags")) r.tags = j.at("tags").get<std::map<std::string, std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad game record: ") + e.what());
  }
}

GameState replay(const GameRecord& record) {
  GameState s = new_game(record.config);
  for (const MoveRecord& m : record.moves) s = apply_action(s, index_to_action(m.action));
  return s;
}

void append_record(const std::filesystem::path& path, const GameRecord& record) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << to_json_line(record) << '\n';
}

std::vector<GameRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<GameRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(parse_record(line));
  }
  return out;
}

}  // namespace terra::encoding
