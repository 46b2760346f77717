#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace terra {

inline constexpr int kNumPlayers = 2;
inline constexpr int kRows = 9;
inline constexpr int kCols = 13;
inline constexpr int kNumHexes = kRows * kCols;
inline constexpr int kNumRounds = 6;

// Ordered as the terraforming cycle; WATER sits outside the cycle.
enum class Terrain : std::uint8_t { Plain, Swamp, Lake, Forest, Mountain, Wasteland, Desert, Water };
inline constexpr int kNumLandTerrains = 7;

enum class Building : std::uint8_t { None, Dwelling, TradingPost, Temple, Sanctuary, Stronghold };
inline constexpr int kNumBuildingTypes = 5;  // excluding None

enum class Faction : std::uint8_t { Engineers, Halflings };

enum class Cult : std::uint8_t { Fire, Water, Earth, Air };
inline constexpr int kNumCults = 4;
inline constexpr int kCultMax = 10;

enum class Phase : std::uint8_t { Setup, Actions, Cleanup, End };

enum class UpgradeKind : std::uint8_t {
  DwellingToTradingPost,
  TradingPostToStronghold,
  TradingPostToTemple,
  TempleToSanctuary,
};
inline constexpr int kNumUpgradeKinds = 4;

inline constexpr int kNumScoringTiles = 8;
inline constexpr int kNumBonusCards = 9;
inline constexpr int kNumBonusInPlay = kNumPlayers + 3;
inline constexpr int kNumFavorTiles = 12;
inline constexpr int kNumTownTiles = 5;
inline constexpr int kNumPowerActions = 6;
inline constexpr int kNumSpecialActions = 3;
inline constexpr int kMaxBridges = 3;
inline constexpr int kMaxPriests = 7;
inline constexpr int kStartingVp = 20;

// Building stock per player, indexed by Building - 1.
inline constexpr std::array<int, kNumBuildingTypes> kBuildingStock{8, 4, 3, 1, 1};

// Power value of a building for town founding, indexed by Building.
inline constexpr std::array<int, 6> kBuildingPower{0, 1, 2, 2, 3, 3};

inline constexpr int building_slot(Building b) { return static_cast<int>(b) - 1; }

/// Thrown for actions that break a game rule; the message names the rule.
class RuleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown for malformed game configurations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Worker/priest/coin/power amounts.
struct Resources {
  int workers = 0;
  int priests = 0;
  int coins = 0;
  int power = 0;  // spent from bowl III (cost) or gained through the bowls (income)

  friend bool operator==(const Resources&, const Resources&) = default;
};

const char* terrain_name(Terrain t);
const char* building_name(Building b);
const char* faction_name(Faction f);
const char* cult_name(Cult c);
const char* upgrade_name(UpgradeKind k);

/// Steps around the terraforming cycle between two land terrains (0..3).
int terraform_distance(Terrain from, Terrain to);

}  // namespace terra
