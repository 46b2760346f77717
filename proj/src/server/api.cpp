#include "terra/server/api.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "terra/encoding/codec.hpp"
#include "terra/server/view.hpp"

namespace terra::server {

namespace {

Response reply(int status, const json& body) { return {status, body.dump()}; }
Response error(int status, const std::string& message) { return reply(status, {{"error", message}}); }

std::string humans_tag(const std::array<bool, kNumPlayers>& human) {
  std::string out;
  for (int p = 0; p < kNumPlayers; ++p) {
    if (!human[p]) continue;
    if (!out.empty()) out += ',';
    out += std::to_string(p);
  }
  return out;
}

std::array<bool, kNumPlayers> humans_from_tag(const std::string& tag) {
  std::array<bool, kNumPlayers> human{false, false};
  std::stringstream in(tag);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (part == "0" || part == "1") {
      human[part[0] - '0'] = true;
    } else {
      throw std::invalid_argument("bad human seat list: " + tag);
    }
  }
  return human;
}

// "human_seat": 0, 1, "both" or "none".
std::array<bool, kNumPlayers> humans_from_json(const json& j) {
  if (j.is_number_integer()) {
    const int seat = j.get<int>();
    if (seat == 0) return {true, false};
    if (seat == 1) return {false, true};
  } else if (j.is_string()) {
    if (j == "both") return {true, true};
    if (j == "none") return {false, false};
  }
  throw std::invalid_argument("human_seat must be 0, 1, \"both\" or \"none\"");
}

json seats_json(const std::array<bool, kNumPlayers>& human) {
  json out = json::array();
  for (int p = 0; p < kNumPlayers; ++p)
    if (human[p]) out.push_back(p);
  return out;
}

bool valid_id(const std::string& id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
}

json move_json(int index, int player) {
  return {{"index", index}, {"player", player}, {"description", describe(encoding::index_to_action(index))}};
}

json session_view(const SessionRecord& s) {
  json v = state_view(s.state);
  v["id"] = s.id;
  v["human_seats"] = seats_json(s.human);
  v["agent"] = s.agent;
  v["simulations"] = s.simulations;
  v["config"] = json::parse(encoding::config_to_json(s.game.config));
  json awaiting = nullptr;
  if (!is_terminal(s.state)) awaiting = s.human[s.state.to_move] ? "human" : "agent";
  v["awaiting"] = awaiting;
  json history = json::array();
  for (const encoding::MoveRecord& m : s.game.moves) history.push_back(move_json(m.action, m.player));
  v["history"] = std::move(history);
  return v;
}

void sync_scores(SessionRecord& s) {
  s.game.truncated = s.state.truncated;
  s.game.scores = is_terminal(s.state) ? final_scores(s.state) : std::pair{s.state.players[0].vp, s.state.players[1].vp};
}

}  // namespace

ServerConfig load_server_config(const std::filesystem::path& file, const std::map<std::string, std::string>& env) {
  ServerConfig c;
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("cannot read server config " + file.string());
    try {
      const json j = json::parse(in);
      c.host = j.value("host", c.host);
      c.port = j.value("port", c.port);
      c.data_dir = j.value("data_dir", c.data_dir.string());
      c.checkpoint_dir = j.value("checkpoint_dir", c.checkpoint_dir.string());
      c.default_agent = j.value("default_agent", c.default_agent);
      c.simulations = j.value("simulations", c.simulations);
      c.top_k = j.value("top_k", c.top_k);
      c.c_puct = j.value("c_puct", c.c_puct);
    } catch (const json::exception& e) {
      throw std::invalid_argument("bad server config: " + std::string(e.what()));
    }
  }
  if (auto it = env.find("TERRA_HOST"); it != env.end()) c.host = it->second;
  if (auto it = env.find("TERRA_PORT"); it != env.end()) {
    try {
      std::size_t used = 0;
      c.port = std::stoi(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::invalid_argument("TERRA_PORT is not a number: " + it->second);
    }
  }
  if (auto it = env.find("TERRA_DATA_DIR"); it != env.end()) c.data_dir = it->second;
  if (auto it = env.find("TERRA_CHECKPOINT_DIR"); it != env.end()) c.checkpoint_dir = it->second;
  if (c.port < 0 || c.port > 65535) throw std::invalid_argument("port out of range");
  if (c.simulations < 1) throw std::invalid_argument("simulations must be >= 1");
  if (c.top_k < 1) throw std::invalid_argument("top_k must be >= 1");
  return c;
}

std::map<std::string, std::string> environment_overrides() {
  std::map<std::string, std::string> env;
  for (const char* key : {"TERRA_HOST", "TERRA_PORT", "TERRA_DATA_DIR", "TERRA_CHECKPOINT_DIR"}) {
    if (const char* v = std::getenv(key)) env[key] = v;
  }
  return env;
}

encoding::GameRecord to_game_record(const SessionRecord& s) {
  encoding::GameRecord r = s.game;
  r.tags["session"] = s.id;
  r.tags["human_seats"] = humans_tag(s.human);
  r.tags["agent"] = s.agent;
  r.tags["simulations"] = std::to_string(s.simulations);
  return r;
}

SessionRecord session_from_record(const encoding::GameRecord& record) {
  for (const char* key : {"session", "human_seats", "agent", "simulations"}) {
    if (!record.tags.contains(key)) throw std::invalid_argument(std::string("session record lacks ") + key);
  }
  SessionRecord s;
  s.id = record.tags.at("session");
  s.human = humans_from_tag(record.tags.at("human_seats"));
  s.agent = record.tags.at("agent");
  s.simulations = std::stoi(record.tags.at("simulations"));
  s.game = record;
  s.game.tags.clear();
  s.state = encoding::replay(record);
  sync_scores(s);
  return s;
}

struct Api::Entry {
  std::mutex mutex;
  SessionRecord session;
};

Api::Api(ServerConfig config, AgentFactory factory) : config_(std::move(config)), factory_(std::move(factory)) {
  if (!factory_) {
    factory_ = [this](const std::string& agent, const mcts::SearchConfig& search) { return default_factory(agent, search); };
  }
  if (!config_.data_dir.empty()) load_sessions();
}

Api::~Api() = default;

std::size_t Api::session_count() const {
  std::lock_guard lock(store_mutex_);
  return sessions_.size();
}

std::shared_ptr<Api::Entry> Api::find(const std::string& id) const {
  std::lock_guard lock(store_mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

Response Api::handle(const Request& request) {
  std::string path = request.path.substr(0, request.path.find('?'));
  while (path.size() > 1 && path.back() == '/') path.pop_back();

  std::vector<std::string> parts;
  std::stringstream in(path);
  std::string part;
  while (std::getline(in, part, '/'))
    if (!part.empty()) parts.push_back(part);
  if (parts.empty() || parts[0] != "games" || parts.size() > 3) return error(404, "no route " + request.path);

  const std::string& method = request.method;
  try {
    if (parts.size() == 1) {
      if (method != "POST") return error(405, "use POST /games");
      return create(request.body);
    }
    const std::shared_ptr<Entry> entry = find(parts[1]);
    if (!entry) return error(404, "unknown session " + parts[1]);
    const std::string sub = parts.size() == 3 ? parts[2] : "";

    std::lock_guard lock(entry->mutex);
    if (sub.empty()) return method == "GET" ? view(*entry) : error(405, "use GET");
    if (sub == "legal") return method == "GET" ? legal(*entry) : error(405, "use GET");
    if (sub == "record") return method == "GET" ? record(*entry) : error(405, "use GET");
    if (sub == "actions") return method == "POST" ? human_move(*entry, request.body) : error(405, "use POST");
    if (sub == "agent-move") return method == "POST" ? agent_move(*entry) : error(405, "use POST");
    return error(404, "no route " + request.path);
  } catch (const json::exception& e) {
    return error(400, std::string("bad JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    return error(400, e.what());
  } catch (const ConfigError& e) {
    return error(400, e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

Response Api::create(const std::string& body) {
  const json j = body.empty() ? json::object() : json::parse(body);
  if (!j.is_object()) throw std::invalid_argument("request body must be an object");

  SessionRecord s;
  long number = 0;
  {
    std::lock_guard lock(store_mutex_);
    number = next_id_++;
  }
  s.id = "g" + std::to_string(number);
  s.game.config = encoding::config_from_json(j.value("config", json::object()).dump());
  if (!j.contains("config") || !j.at("config").contains("seed")) s.game.config.seed = static_cast<std::uint64_t>(number);
  if (j.contains("human_seat")) s.human = humans_from_json(j.at("human_seat"));
  s.agent = resolve_agent(j.value("agent", config_.default_agent));
  s.simulations = j.value("simulations", config_.simulations);
  if (s.simulations < 1) throw std::invalid_argument("simulations must be >= 1");
  s.state = new_game(s.game.config);
  sync_scores(s);
  persist(s);

  auto entry = std::make_shared<Entry>();
  entry->session = std::move(s);
  json v = session_view(entry->session);
  {
    std::lock_guard lock(store_mutex_);
    sessions_[entry->session.id] = entry;
  }
  return reply(201, v);
}

Response Api::view(Entry& e) { return reply(200, session_view(e.session)); }

Response Api::legal(Entry& e) {
  const GameState& s = e.session.state;
  json actions = json::array();
  const encoding::ActionMask mask = encoding::legal_mask(s);
  for (int i = 0; i < encoding::kNumActions; ++i) {
    if (!mask[i]) continue;
    actions.push_back({{"index", i}, {"description", describe(encoding::index_to_action(i))}});
  }
  json to_move = is_terminal(s) ? json(nullptr) : json(s.to_move);
  return reply(200, {{"to_move", to_move}, {"count", actions.size()}, {"actions", std::move(actions)}});
}

Response Api::human_move(Entry& e, const std::string& body) {
  const json j = json::parse(body);
  if (!j.is_object() || !j.contains("index") || !j.at("index").is_number_integer())
    throw std::invalid_argument("body must be {\"index\": <integer>}");
  const long index = j.at("index").get<long>();
  SessionRecord& s = e.session;
  if (is_terminal(s.state)) return error(409, "the game is over");
  if (!s.human[s.state.to_move]) return error(409, "it is the agent's turn");
  if (index < 0 || index >= encoding::kNumActions) return error(409, "action index out of range");
  const Action a = encoding::index_to_action(static_cast<int>(index));
  if (const auto why = check_action(s.state, a)) return error(409, *why);

  const int player = s.state.to_move;
  GameState next = apply_action(s.state, a);
  SessionRecord updated = s;
  updated.state = std::move(next);
  updated.game.moves.push_back({static_cast<int>(index), player, {}, std::nullopt});
  sync_scores(updated);
  persist(updated);
  s = std::move(updated);
  return reply(200, {{"move", move_json(static_cast<int>(index), player)}, {"state", session_view(s)}});
}

Response Api::agent_move(Entry& e) {
  SessionRecord& s = e.session;
  if (is_terminal(s.state)) return error(409, "the game is over");
  if (s.human[s.state.to_move]) return error(409, "it is the human's turn");

  mcts::SearchConfig search;
  search.num_simulations = s.simulations;
  search.c_puct = config_.c_puct;
  search.temperature_plies = 0;
  search.seed = train::mix_seed(s.game.config.seed, 500, static_cast<std::uint64_t>(s.state.ply));
  train::AgentHandle handle = factory_(s.agent, search);
  const train::Decision d = handle.agent->decide(s.state);
  const Action a = encoding::index_to_action(d.action);
  if (const auto why = check_action(s.state, a)) throw std::logic_error("agent chose an illegal move: " + *why);

  std::vector<std::pair<int, double>> top = d.pi;
  std::stable_sort(top.begin(), top.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
  if (top.size() > static_cast<std::size_t>(config_.top_k)) top.resize(config_.top_k);

  const int player = s.state.to_move;
  SessionRecord updated = s;
  updated.state = apply_action(s.state, a);
  updated.game.moves.push_back({d.action, player, top, d.value});
  sync_scores(updated);
  persist(updated);
  s = std::move(updated);

  json pi = json::array();
  for (const auto& [index, p] : top) {
    pi.push_back({{"index", index}, {"prob", p}, {"description", describe(encoding::index_to_action(index))}});
  }
  return reply(200, {{"move", move_json(d.action, player)},
                     {"pi", std::move(pi)},
                     {"v_root", d.value ? json(*d.value) : json(nullptr)},
                     {"state", session_view(s)}});
}

Response Api::record(Entry& e) { return {200, encoding::to_json_line(to_game_record(e.session))}; }

std::string Api::resolve_agent(const std::string& id) const {
  if (id == "random" || id == "uniform") return id;
  namespace fs = std::filesystem;
  if (id == "latest") {
    std::string best;
    std::error_code ec;
    for (const auto& f : fs::directory_iterator(config_.checkpoint_dir, ec)) {
      const std::string name = f.path().filename().string();
      if (name.starts_with("checkpoint_") && name.ends_with(".bin") && name > best) best = name;
    }
    if (best.empty()) throw std::invalid_argument("no checkpoints in " + config_.checkpoint_dir.string());
    return best;
  }
  if (id.find('/') != std::string::npos || id.find("..") != std::string::npos)
    throw std::invalid_argument("agent must be random, uniform, latest or a checkpoint file name");
  if (!fs::is_regular_file(config_.checkpoint_dir / id)) throw std::invalid_argument("unknown agent " + id);
  return id;
}

train::AgentHandle Api::default_factory(const std::string& agent, const mcts::SearchConfig& search) {
  if (agent == "random" || agent == "uniform") return train::make_agent(agent, search);
  std::shared_ptr<train::LoadedNetwork> net;
  {
    std::lock_guard lock(network_mutex_);
    auto& slot = networks_[agent];
    if (!slot) slot = train::load_network(config_.checkpoint_dir / agent);
    net = slot;
  }
  return train::make_agent(agent, search, net);
}

void Api::persist(const SessionRecord& s) const {
  if (config_.data_dir.empty()) return;
  namespace fs = std::filesystem;
  const fs::path dir = config_.data_dir / "sessions";
  fs::create_directories(dir);
  const fs::path target = dir / (s.id + ".jsonl");
  const fs::path tmp = dir / (s.id + ".jsonl.tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << encoding::to_json_line(to_game_record(s)) << '\n';
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

void Api::load_sessions() {
  namespace fs = std::filesystem;
  const fs::path dir = config_.data_dir / "sessions";
  if (!fs::is_directory(dir)) return;
  std::vector<fs::path> files;
  for (const auto& f : fs::directory_iterator(dir))
    if (f.path().extension() == ".jsonl") files.push_back(f.path());
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) {
    try {
      const auto records = encoding::read_records(f);
      if (records.size() != 1) throw std::invalid_argument("expected one record");
      SessionRecord s = session_from_record(records.front());
      if (s.id.size() < 2 || s.id[0] != 'g' || !valid_id(s.id)) throw std::invalid_argument("bad session id");
      next_id_ = std::max(next_id_, std::stol(s.id.substr(1)) + 1);
      auto entry = std::make_shared<Entry>();
      entry->session = std::move(s);
      sessions_[entry->session.id] = entry;
    } catch (const std::exception& e) {
      std::cerr << "skipping session file " << f << ": " << e.what() << '\n';
    }
  }
}

}  // namespace terra::server
