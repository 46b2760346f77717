#pragma once

// Static game components: faction boards, scoring tiles, bonus cards,
// favor tiles, town tiles and board power actions.

#include <array>
#include <span>

#include "terra/rules/types.hpp"

namespace terra {

struct FactionBoard {
  Faction faction;
  Terrain home;
  Resources start;         // power field unused; see start_bowls
  std::array<int, 3> start_bowls;
  std::array<int, kNumCults> start_cult;
  Resources dwelling_cost;
  Resources trading_post_cost;  // coins doubled when no neighbor
  Resources temple_cost;
  Resources stronghold_cost;
  Resources sanctuary_cost;
  Resources shipping_cost;
  Resources dig_cost;
  int max_shipping;
  int max_dig;
  // Cumulative income by number of buildings placed.
  int base_workers;
  std::array<int, 9> dwelling_workers;
  std::array<int, 5> trading_post_coins;
  std::array<int, 5> trading_post_power;
  std::array<int, 4> temple_priests;
  std::array<int, 4> temple_power;
  int stronghold_power;
  int sanctuary_priests;
};

const FactionBoard& faction_board(Faction f);

enum class ScoringAction : std::uint8_t { Spade, Town, Dwelling, StrongholdSanctuary, TradingPost };

enum class CultReward : std::uint8_t { Coin, Spade, Priest, Worker, Power };

struct ScoringTile {
  ScoringAction action;
  int vp;
  Cult cult;
  int cult_steps;  // reward granted per this many steps on the track
  CultReward reward;
  int reward_amount;
};

inline constexpr std::array<ScoringTile, kNumScoringTiles> kScoringTiles{{
    {ScoringAction::Spade, 2, Cult::Earth, 1, CultReward::Coin, 1},
    {ScoringAction::Town, 5, Cult::Earth, 4, CultReward::Spade, 1},
    {ScoringAction::Dwelling, 2, Cult::Water, 4, CultReward::Priest, 1},
    {ScoringAction::StrongholdSanctuary, 5, Cult::Fire, 2, CultReward::Worker, 1},
    {ScoringAction::Dwelling, 2, Cult::Fire, 4, CultReward::Power, 4},
    {ScoringAction::TradingPost, 3, Cult::Water, 4, CultReward::Spade, 1},
    {ScoringAction::StrongholdSanctuary, 5, Cult::Air, 2, CultReward::Worker, 1},
    {ScoringAction::TradingPost, 3, Cult::Air, 4, CultReward::Spade, 1},
}};

// The spade scoring tile may not be scheduled in the last two rounds.
inline constexpr int kSpadeScoringTile = 0;

enum class PassBonus : std::uint8_t { None, PerDwelling, PerTradingPost, PerStrongholdSanctuary };

struct BonusCard {
  Resources income;
  int shipping_bonus;
  bool spade_action;
  bool cult_action;
  PassBonus pass_bonus;
  int pass_vp;
};

inline constexpr std::array<BonusCard, kNumBonusCards> kBonusCards{{
    {{0, 0, 2, 0}, 0, true, false, PassBonus::None, 0},
    {{0, 0, 4, 0}, 0, false, true, PassBonus::None, 0},
    {{0, 0, 6, 0}, 0, false, false, PassBonus::None, 0},
    {{0, 0, 0, 3}, 1, false, false, PassBonus::None, 0},
    {{1, 0, 0, 3}, 0, false, false, PassBonus::None, 0},
    {{0, 0, 2, 0}, 0, false, false, PassBonus::PerStrongholdSanctuary, 4},
    {{1, 0, 0, 0}, 0, false, false, PassBonus::PerTradingPost, 2},
    {{0, 1, 0, 0}, 0, false, false, PassBonus::None, 0},
    {{0, 0, 2, 0}, 0, false, false, PassBonus::PerDwelling, 1},
}};

enum class FavorEffect : std::uint8_t {
  None,
  TownPowerSix,
  CultAction,
  Income,
  TradingPostVp,
  DwellingVp,
  PassTradingPostVp,
};

struct FavorTile {
  Cult cult;
  int steps;
  int copies;
  FavorEffect effect;
  Resources income;
};

inline constexpr std::array<FavorTile, kNumFavorTiles> kFavorTiles{{
    {Cult::Fire, 3, 1, FavorEffect::None, {}},
    {Cult::Water, 3, 1, FavorEffect::None, {}},
    {Cult::Earth, 3, 1, FavorEffect::None, {}},
    {Cult::Air, 3, 1, FavorEffect::None, {}},
    {Cult::Fire, 2, 3, FavorEffect::TownPowerSix, {}},
    {Cult::Water, 2, 3, FavorEffect::CultAction, {}},
    {Cult::Earth, 2, 3, FavorEffect::Income, {1, 0, 0, 1}},
    {Cult::Air, 2, 3, FavorEffect::Income, {0, 0, 0, 4}},
    {Cult::Fire, 1, 3, FavorEffect::Income, {0, 0, 3, 0}},
    {Cult::Water, 1, 3, FavorEffect::TradingPostVp, {}},
    {Cult::Earth, 1, 3, FavorEffect::DwellingVp, {}},
    {Cult::Air, 1, 3, FavorEffect::PassTradingPostVp, {}},
}};

inline constexpr int kFavorTradingPostVp = 3;
inline constexpr int kFavorDwellingVp = 2;
inline constexpr std::array<int, 5> kFavorPassTradingPostVp{0, 2, 3, 3, 4};

struct TownTile {
  int vp;
  Resources reward;
  int cult_steps;  // on every track
  int copies;
};

inline constexpr std::array<TownTile, kNumTownTiles> kTownTiles{{
    {5, {0, 0, 6, 0}, 0, 2},
    {7, {2, 0, 0, 0}, 0, 2},
    {9, {0, 1, 0, 0}, 0, 2},
    {6, {0, 0, 0, 8}, 0, 2},
    {8, {0, 0, 0, 0}, 1, 2},
}};

enum class PowerActionKind : std::uint8_t { Bridge, Priest, Workers, Coins, Spade, TwoSpades };

struct PowerActionSpec {
  PowerActionKind kind;
  int cost;
  Resources gain;
  int spades;
};

inline constexpr std::array<PowerActionSpec, kNumPowerActions> kPowerActions{{
    {PowerActionKind::Bridge, 3, {}, 0},
    {PowerActionKind::Priest, 3, {0, 1, 0, 0}, 0},
    {PowerActionKind::Workers, 4, {2, 0, 0, 0}, 0},
    {PowerActionKind::Coins, 4, {0, 0, 7, 0}, 0},
    {PowerActionKind::Spade, 4, {}, 1},
    {PowerActionKind::TwoSpades, 6, {}, 2},
}};

// Special action slots.
inline constexpr int kSpecialSpade = 0;
inline constexpr int kSpecialCult = 1;
inline constexpr int kSpecialFaction = 2;

inline constexpr Resources kEngineersBridgeCost{2, 0, 0, 0};
inline constexpr int kEngineersStrongholdBridgeVp = 3;
inline constexpr int kHalflingsStrongholdSpades = 3;
inline constexpr int kHalflingsSpadeVp = 1;

// Shipping advance VP by level reached (index = new level).
inline constexpr std::array<int, 4> kShippingVp{0, 2, 3, 4};
inline constexpr int kDigVp = 6;

// Power gained when a cult marker reaches or passes these positions.
inline constexpr std::array<std::pair<int, int>, 4> kCultPowerThresholds{{{3, 1}, {5, 2}, {7, 2}, {10, 3}}};

// Priest slots on each cult track for two players.
inline constexpr int kCultTwoSlots = 3;

// End-game scoring.
inline constexpr std::array<int, 2> kAreaVp{18, 12};
inline constexpr std::array<int, 2> kCultVp{8, 4};
inline constexpr int kCoinsPerVp = 3;

}  // namespace terra
