#pragma once

// HTTP/JSON game service. Routes (all bodies JSON):
//
//   POST /games                   create a session
//   GET  /games/{id}              full state view
//   GET  /games/{id}/legal        legal dense indices with descriptions
//   POST /games/{id}/actions      {"index": n}, a human move
//   POST /games/{id}/agent-move   search, apply and report the agent's move
//   GET  /games/{id}/record       the session as a replayable game record
//
// Errors are {"error": message}: 400 bad request, 404 unknown session or
// route, 405 wrong method, 409 illegal move or wrong side to move.

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "terra/encoding/record.hpp"
#include "terra/train/agents.hpp"

namespace terra::server {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir;  // empty: sessions live in memory only
  std::filesystem::path checkpoint_dir = ".";
  std::string default_agent = "random";
  int simulations = 100;  // per agent move
  int top_k = 5;
  double c_puct = 1.0;

  friend bool operator==(const ServerConfig&, const ServerConfig&) = default;
};

/// JSON config file (missing keys keep defaults; empty path skips the file),
/// then TERRA_HOST, TERRA_PORT, TERRA_DATA_DIR and TERRA_CHECKPOINT_DIR from
/// `env`. Throws std::invalid_argument on malformed input.
ServerConfig load_server_config(const std::filesystem::path& file, const std::map<std::string, std::string>& env);

/// The TERRA_* variables present in the process environment.
std::map<std::string, std::string> environment_overrides();

/// One game between the humans and an agent. The game record's moves are the
/// action history; agent moves carry their top-k visit shares and root value.
struct SessionRecord {
  std::string id;
  encoding::GameRecord game;
  GameState state;
  std::array<bool, kNumPlayers> human{true, false};
  std::string agent = "random";
  int simulations = 100;
};

/// Game record with session metadata in its tags.
encoding::GameRecord to_game_record(const SessionRecord& session);

/// Rebuilds a session by replaying the record. Throws std::invalid_argument
/// when metadata is missing and RuleError when a move is illegal.
SessionRecord session_from_record(const encoding::GameRecord& record);

struct Request {
  std::string method;
  std::string path;
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;
};

/// Builds the agent for one move; the default understands "random",
/// "uniform" and checkpoint file names under checkpoint_dir.
using AgentFactory = std::function<train::AgentHandle(const std::string& agent, const mcts::SearchConfig& search)>;

class Api {
 public:
  /// Loads persisted sessions from data_dir when it is set.
  explicit Api(ServerConfig config, AgentFactory factory = {});
  ~Api();

  /// Thread-safe. Requests on one session are serialized; an agent move
  /// holds only its own session.
  Response handle(const Request& request);

  std::size_t session_count() const;
  const ServerConfig& config() const { return config_; }

 private:
  struct Entry;

  Response create(const std::string& body);
  Response view(Entry& e);
  Response legal(Entry& e);
  Response human_move(Entry& e, const std::string& body);
  Response agent_move(Entry& e);
  Response record(Entry& e);

  std::shared_ptr<Entry> find(const std::string& id) const;
  std::string resolve_agent(const std::string& id) const;
  train::AgentHandle default_factory(const std::string& agent, const mcts::SearchConfig& search);
  void persist(const SessionRecord& s) const;
  void load_sessions();

  ServerConfig config_;
  AgentFactory factory_;
  mutable std::mutex store_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  long next_id_ = 1;
  std::mutex network_mutex_;
  std::map<std::string, std::shared_ptr<train::LoadedNetwork>> networks_;
};

/// Blocking HTTP front end over an Api.
class HttpServer {
 public:
  explicit HttpServer(Api& api);
  ~HttpServer();

  /// Binds host:port (port 0 picks a free one); returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace terra::server
