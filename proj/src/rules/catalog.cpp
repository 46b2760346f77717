#include "terra/rules/catalog.hpp"

#include <cstdlib>

namespace terra {

namespace {

const FactionBoard kHalflings{
    .faction = Faction::Halflings,
    .home = Terrain::Plain,
    .start = {3, 0, 15, 0},
    .start_bowls = {3, 9, 0},
    .start_cult = {0, 0, 1, 1},
    .dwelling_cost = {1, 0, 2, 0},
    .trading_post_cost = {2, 0, 3, 0},
    .temple_cost = {2, 0, 5, 0},
    .stronghold_cost = {4, 0, 8, 0},
    .sanctuary_cost = {4, 0, 6, 0},
    .shipping_cost = {0, 1, 4, 0},
    .dig_cost = {2, 1, 1, 0},
    .max_shipping = 3,
    .max_dig = 2,
    .base_workers = 1,
    .dwelling_workers = {0, 1, 2, 3, 4, 5, 6, 7, 7},
    .trading_post_coins = {0, 2, 4, 6, 8},
    .trading_post_power = {0, 1, 2, 4, 6},
    .temple_priests = {0, 1, 2, 3},
    .temple_power = {0, 0, 0, 0},
    .stronghold_power = 2,
    .sanctuary_priests = 1,
};

const FactionBoard kEngineers{
    .faction = Faction::Engineers,
    .home = Terrain::Mountain,
    .start = {2, 0, 10, 0},
    .start_bowls = {3, 9, 0},
    .start_cult = {0, 0, 0, 0},
    .dwelling_cost = {1, 0, 1, 0},
    .trading_post_cost = {1, 0, 2, 0},
    .temple_cost = {1, 0, 4, 0},
    .stronghold_cost = {3, 0, 6, 0},
    .sanctuary_cost = {3, 0, 6, 0},
    .shipping_cost = {0, 1, 4, 0},
    .dig_cost = {2, 1, 5, 0},
    .max_shipping = 3,
    .max_dig = 2,
    .base_workers = 0,
    .dwelling_workers = {0, 1, 2, 2, 3, 4, 4, 5, 6},
    .trading_post_coins = {0, 2, 4, 6, 8},
    .trading_post_power = {0, 1, 2, 4, 6},
    .temple_priests = {0, 1, 1, 2},
    .temple_power = {0, 0, 5, 5},
    .stronghold_power = 2,
    .sanctuary_priests = 1,
};

}  // namespace

const FactionBoard& faction_board(Faction f) { return f == Faction::Halflings ? kHalflings : kEngineers; }

const char* terrain_name(Terrain t) {
  static constexpr const char* names[] = {"plain", "swamp", "lake", "forest", "mountain", "wasteland", "desert", "water"};
  return names[static_cast<int>(t)];
}

const char* building_name(Building b) {
  static constexpr const char* names[] = {"none", "dwelling", "trading post", "temple", "sanctuary", "stronghold"};
  return names[static_cast<int>(b)];
}

const char* faction_name(Faction f) { return f == Faction::Halflings ? "Halflings" : "Engineers"; }

const char* cult_name(Cult c) {
  static constexpr const char* names[] = {"fire", "water", "earth", "air"};
  return names[static_cast<int>(c)];
}

const char* upgrade_name(UpgradeKind k) {
  static constexpr const char* names[] = {"dwelling->trading post", "trading post->stronghold",
                                          "trading post->temple", "temple->sanctuary"};
  return names[static_cast<int>(k)];
}

int terraform_distance(Terrain from, Terrain to) {
  const int d = std::abs(static_cast<int>(from) - static_cast<int>(to));
  return d > kNumLandTerrains / 2 ? kNumLandTerrains - d : d;
}

}  // namespace terra
