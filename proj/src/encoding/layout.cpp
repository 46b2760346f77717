#include "terra/encoding/layout.hpp"

#include "json.hpp"

namespace terra::encoding {

namespace {

std::vector<LayerField> build_fields() {
  std::vector<LayerField> f;
  const char* terrains[] = {"plain", "swamp", "lake", "forest", "mountain", "wasteland", "desert", "water"};
  for (int i = 0; i < 8; ++i) f.push_back({std::string("terrain.") + terrains[i], kTerrainOffset + i, 1, 1.0, true});
  const char* structures[] = {"dwelling", "trading_post", "temple", "sanctuary", "stronghold"};
  for (int i = 0; i < 5; ++i) f.push_back({std::string("structure.") + structures[i], kStructureOffset + i, 1, 1.0, true});
  f.push_back({"power_action_taken", kPowerActionOffset, 6, 1.0, true});
  for (int t = 0; t < 8; ++t) {
    const std::string tile = "scoring_tile." + std::to_string(t + 1);
    f.push_back({tile + ".round", kScoringOffset + t * kScoringSlotsPerTile, 6, 1.0, true});
    f.push_back({tile + ".in_game", kScoringOffset + t * kScoringSlotsPerTile + 6, 1, 1.0, true});
  }
  f.push_back({"favor_supply", kFavorSupplyOffset, 12, 3.0, false});
  f.push_back({"bonus_in_play", kBonusInPlayOffset, 9, 1.0, true});
  for (int p = 0; p < 2; ++p) {
    const int base = kPlayerOffset + p * kPlayerBlockSize;
    const std::string pre = "player" + std::to_string(p) + ".";
    f.push_back({pre + "workers", base + kPWorkers, 1, 30.0, false});
    f.push_back({pre + "priests", base + kPPriests, 1, 7.0, false});
    f.push_back({pre + "coins", base + kPCoins, 1, 30.0, false});
    f.push_back({pre + "power_bowls", base + kPBowls, 3, 12.0, false});
    f.push_back({pre + "workers_per_spade", base + kPSpadeCost, 1, 3.0, false});
    f.push_back({pre + "shipping", base + kPShipping, 1, 3.0, false});
    f.push_back({pre + "cult", base + kPCult, 4, 10.0, false});
    f.push_back({pre + "dwellings", base + kPBuildings + 0, 1, 8.0, false});
    f.push_back({pre + "trading_posts", base + kPBuildings + 1, 1, 4.0, false});
    f.push_back({pre + "temples", base + kPBuildings + 2, 1, 3.0, false});
    f.push_back({pre + "sanctuaries", base + kPBuildings + 3, 1, 1.0, false});
    f.push_back({pre + "strongholds", base + kPBuildings + 4, 1, 1.0, false});
    f.push_back({pre + "vp", base + kPVp, 1, 200.0, false});
    f.push_back({pre + "income.workers", base + kPIncome + 0, 1, 10.0, false});
    f.push_back({pre + "income.priests", base + kPIncome + 1, 1, 5.0, false});
    f.push_back({pre + "income.coins", base + kPIncome + 2, 1, 17.0, false});
    f.push_back({pre + "income.power", base + kPIncome + 3, 1, 21.0, false});
    f.push_back({pre + "bridges_available", base + kPBridgesLeft, 1, 3.0, false});
    f.push_back({pre + "bridge_cells", base + kPBridgeCells, 1, 1.0, true});
    f.push_back({pre + "bonus_card", base + kPBonus, 9, 1.0, true});
    f.push_back({pre + "favor.5_12", base + kPFavors, 8, 1.0, true});
    f.push_back({pre + "favor.1_2_packed", base + kPFavors + 8, 1, 3.0, false});
    f.push_back({pre + "favor.3_4_packed", base + kPFavors + 9, 1, 3.0, false});
    f.push_back({pre + "town_tiles", base + kPTowns, 5, 2.0, false});
  }
  f.push_back({"faction_to_play", kFactionOffset, kNumFactionLayers, 1.0, true});
  return f;
}

}  // namespace

const std::vector<LayerField>& layer_fields() {
  static const std::vector<LayerField> fields = build_fields();
  return fields;
}

std::string layout_manifest() {
  nlohmann::ordered_json doc;
  doc["shape"] = {kBoardRows, kBoardCols, kNumLayers};
  auto& arr = doc["fields"];
  arr = nlohmann::ordered_json::array();
  for (const auto& f : layer_fields()) {
    arr.push_back({{"name", f.name}, {"offset", f.offset}, {"width", f.width}, {"scale", f.scale}, {"binary", f.binary}});
  }
  return doc.dump(2);
}

std::uint64_t layout_hash() {
  static const std::uint64_t hash = [] {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : layout_manifest()) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return h;
  }();
  return hash;
}

}  // namespace terra::encoding
