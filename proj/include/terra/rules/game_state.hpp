#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "terra/rules/board.hpp"
#include "terra/rules/types.hpp"

namespace terra {

/// Upper bound on river-crossing bridge sites on the base map.
inline constexpr int kMaxBridgeSites = 48;

struct GameConfig {
  std::uint64_t seed = 0;
  std::vector<int> scoring_tiles;  // empty: seeded draw; otherwise one id per round
  std::vector<int> bonus_cards;    // empty: seeded draw; otherwise five ids
  std::array<Faction, kNumPlayers> factions{Faction::Halflings, Faction::Engineers};
  int max_plies = 500;

  friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

struct HexState {
  Terrain terrain = Terrain::Water;
  Building building = Building::None;
  std::int8_t owner = -1;
  bool in_town = false;

  friend bool operator==(const HexState&, const HexState&) = default;
};

struct PlayerState {
  Faction faction = Faction::Halflings;
  int workers = 0;
  int priests = 0;
  int coins = 0;
  std::array<int, 3> bowls{};
  int vp = 0;
  int shipping = 0;
  int dig_level = 0;
  std::array<int, kNumCults> cult{};
  std::array<int, kNumBuildingTypes> buildings{};  // placed, indexed by building_slot
  int bonus_card = -1;
  std::uint16_t favors = 0;  // bit i: owns favor tile i
  std::array<int, kNumTownTiles> towns{};
  int bridges_placed = 0;
  int keys = 0;  // one per town founded
  int priests_on_cult = 0;
  bool passed = false;
  bool used_bonus_special = false;
  bool used_favor_cult = false;

  bool has_favor(int tile) const { return (favors >> tile) & 1U; }
  int built(Building b) const { return buildings[building_slot(b)]; }
  int power_total() const { return bowls[0] + bowls[1] + bowls[2]; }
  int towns_founded() const;
  int keys_available() const;

  friend bool operator==(const PlayerState&, const PlayerState&) = default;
};

/// Who still owes a decision outside the normal turn order.
struct PendingSpades {
  int count = 0;
  bool can_build = false;
  bool can_pay_extra = false;
  bool scores = true;  // counts for the round's spade scoring tile

  friend bool operator==(const PendingSpades&, const PendingSpades&) = default;
};

/// Complete Markovian snapshot of a two-player game.
struct GameState {
  std::array<HexState, kNumHexes> hexes{};
  std::array<std::int8_t, kMaxBridgeSites> bridges{};  // owner per bridge site, -1 free
  std::array<PlayerState, kNumPlayers> players{};

  int round = 0;  // 0 = setup
  Phase phase = Phase::Setup;
  int to_move = 0;
  int start_player = 0;
  int next_start_player = -1;
  int setup_step = 0;

  std::array<int, kNumRounds> scoring_tiles{};
  std::uint16_t bonus_in_play = 0;  // bit per bonus card id
  std::array<int, kNumBonusCards> bonus_coins{};
  std::array<int, kNumFavorTiles> favor_supply{};
  std::array<int, kNumTownTiles> town_supply{};
  std::array<bool, kNumPowerActions> power_taken{};
  std::array<std::int8_t, kNumCults> cult_three_slot{};  // owner or -1
  std::array<int, kNumCults> cult_two_slots_used{};

  int pending_towns = 0;
  PendingSpades pending_spades;
  std::array<int, kNumPlayers> cleanup_spades{};

  int ply = 0;
  int max_plies = 500;
  bool truncated = false;

  const PlayerState& current() const { return players[to_move]; }
  bool bonus_available(int card) const;

  friend bool operator==(const GameState&, const GameState&) = default;
};

}  // namespace terra
