#pragma once

#include "json.hpp"
#include "terra/rules/engine.hpp"

namespace terra::server {

using nlohmann::json;

/// Everything a client needs to draw the game: board, bridges, players with
/// resources and cult positions, cult board, round tiles, bonus cards,
/// pending decisions and scores (final scores once the game is over).
json state_view(const GameState& state);

}  // namespace terra::server
