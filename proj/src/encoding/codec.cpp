#include "terra/encoding/codec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "terra/rules/catalog.hpp"
#include "terra/rules/engine.hpp"

namespace terra::encoding {

namespace {

struct IndexOf {
  ActionIndex operator()(const TerraformBuild& a) const {
    return a.hex * kHexPlanes + (a.build ? kNumLandTerrains : 0) + static_cast<int>(a.target);
  }
  ActionIndex operator()(const Upgrade& a) const { return a.hex * kHexPlanes + 14 + static_cast<int>(a.kind); }
  ActionIndex operator()(const SendPriest& a) const { return kCultPriestOffset + static_cast<int>(a.cult) * 3 + (3 - a.steps); }
  ActionIndex operator()(const AdvanceShipping&) const { return kShippingIndex; }
  ActionIndex operator()(const AdvanceSpade&) const { return kSpadeIndex; }
  ActionIndex operator()(const PowerAction& a) const { return kPowerActionIndex + a.slot; }
  ActionIndex operator()(const SpecialAction& a) const { return kSpecialActionIndex + a.slot; }
  ActionIndex operator()(const Pass& a) const { return kPassIndex + a.bonus_card; }
  ActionIndex operator()(const TownTileChoice& a) const { return kTownIndex + a.tile; }
};

double scaled(double raw, double scale) { return std::clamp(raw / scale, 0.0, 1.0); }

void write_player(StateTensor& t, const GameState& s, int p) {
  const PlayerState& me = s.players[p];
  const int base = kPlayerOffset + p * kPlayerBlockSize;
  auto set = [&](int off, double value) { t.fill_layer(base + off, value); };

  set(kPWorkers, scaled(me.workers, 30));
  set(kPPriests, scaled(me.priests, 7));
  set(kPCoins, scaled(me.coins, 30));
  for (int b = 0; b < 3; ++b) set(kPBowls + b, scaled(me.bowls[b], 12));
  set(kPSpadeCost, scaled(spade_cost(me), 3));
  set(kPShipping, scaled(me.shipping, 3));
  for (int c = 0; c < kNumCults; ++c) set(kPCult + c, scaled(me.cult[c], 10));
  for (int b = 0; b < kNumBuildingTypes; ++b) set(kPBuildings + b, scaled(me.buildings[b], kBuildingStock[b]));
  set(kPVp, scaled(me.vp, 200));
  const Resources inc = income(me);
  set(kPIncome + 0, scaled(inc.workers, 10));
  set(kPIncome + 1, scaled(inc.priests, 5));
  set(kPIncome + 2, scaled(inc.coins, 17));
  set(kPIncome + 3, scaled(inc.power, 21));
  set(kPBridgesLeft, scaled(kMaxBridges - me.bridges_placed, 3));

  const auto& sites = BoardTopology::instance().bridge_sites();
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (s.bridges[i] != p) continue;
    for (HexId h : {sites[i].a, sites[i].b}) {
      const auto [c0, c1] = doubled_columns(hex_row(h), hex_col(h));
      t.at(base + kPBridgeCells, hex_row(h), c0) = 1.0;
      t.at(base + kPBridgeCells, hex_row(h), c1) = 1.0;
    }
  }

  if (me.bonus_card >= 0) set(kPBonus + me.bonus_card, 1.0);
  for (int f = 4; f < kNumFavorTiles; ++f) {
    if (me.has_favor(f)) set(kPFavors + f - 4, 1.0);
  }
  set(kPFavors + 8, (me.has_favor(0) + 2.0 * me.has_favor(1)) / 3.0);
  set(kPFavors + 9, (me.has_favor(2) + 2.0 * me.has_favor(3)) / 3.0);
  for (int k = 0; k < kNumTownTiles; ++k) set(kPTowns + k, scaled(me.towns[k], 2));
}

}  // namespace

ActionIndex action_to_index(const Action& a) { return std::visit(IndexOf{}, a); }

Action index_to_action(ActionIndex i) {
  if (i < 0 || i >= kNumActions) throw std::out_of_range("action index out of range: " + std::to_string(i));
  if (i < kHexActions) {
    const HexId hex = i / kHexPlanes;
    const int plane = i % kHexPlanes;
    if (plane < 14) return TerraformBuild{hex, static_cast<Terrain>(plane % kNumLandTerrains), plane >= kNumLandTerrains};
    return Upgrade{hex, static_cast<UpgradeKind>(plane - 14)};
  }
  if (i < kShippingIndex) {
    const int k = i - kCultPriestOffset;
    return SendPriest{static_cast<Cult>(k / 3), 3 - k % 3};
  }
  if (i == kShippingIndex) return AdvanceShipping{};
  if (i == kSpadeIndex) return AdvanceSpade{};
  if (i < kSpecialActionIndex) return PowerAction{i - kPowerActionIndex};
  if (i < kPassIndex) return SpecialAction{i - kSpecialActionIndex};
  if (i < kTownIndex) return Pass{i - kPassIndex};
  return TownTileChoice{i - kTownIndex};
}

void StateTensor::fill_layer(int layer, double v) {
  std::fill_n(data_.begin() + layer * kPlaneSize, kPlaneSize, v);
}

std::pair<int, int> doubled_columns(int row, int col) {
  const int c0 = 2 * col + (is_shifted_row(row) ? 1 : 0);
  return {c0, c0 + 1};
}

StateTensor encode_state(const GameState& s) {
  StateTensor t;

  // Shifted rows leave columns 0 and 25 as river padding.
  for (int r = 0; r < kBoardRows; ++r) {
    if (!is_shifted_row(r)) continue;
    t.at(kWaterLayer, r, 0) = 1.0;
    t.at(kWaterLayer, r, kBoardCols - 1) = 1.0;
  }
  for (HexId h = 0; h < kNumHexes; ++h) {
    if (!on_map(h)) continue;
    const int r = hex_row(h);
    const auto [c0, c1] = doubled_columns(r, hex_col(h));
    const HexState& hex = s.hexes[h];
    for (int c : {c0, c1}) {
      t.at(kTerrainOffset + static_cast<int>(hex.terrain), r, c) = 1.0;
      if (hex.building != Building::None) t.at(kStructureOffset + building_slot(hex.building), r, c) = 1.0;
    }
  }

  for (int k = 0; k < kNumPowerActions; ++k) {
    if (s.power_taken[k]) t.fill_layer(kPowerActionOffset + k, 1.0);
  }
  // Past rounds' tiles are dropped; the in-game slot stays for the whole game.
  for (int r = 0; r < kNumRounds; ++r) {
    const int tile = s.scoring_tiles[r];
    if (r + 1 >= s.round) t.fill_layer(kScoringOffset + tile * kScoringSlotsPerTile + r, 1.0);
    t.fill_layer(kScoringOffset + tile * kScoringSlotsPerTile + 6, 1.0);
  }
  for (int f = 0; f < kNumFavorTiles; ++f) t.fill_layer(kFavorSupplyOffset + f, scaled(s.favor_supply[f], 3));
  for (int b = 0; b < kNumBonusCards; ++b) {
    if ((s.bonus_in_play >> b) & 1U) t.fill_layer(kBonusInPlayOffset + b, 1.0);
  }
  for (int p = 0; p < kNumPlayers; ++p) write_player(t, s, p);

  const Faction to_play = s.players[s.to_move].faction;
  t.fill_layer(kFactionOffset + (to_play == Faction::Engineers ? kEngineersFactionLayer : kHalflingsFactionLayer), 1.0);
  return t;
}

ActionMask legal_mask(const GameState& s) {
  ActionMask mask;
  for (const Action& a : legal_actions(s)) mask.set(action_to_index(a));
  return mask;
}

MaskedPolicy mask_and_renormalize(std::span<const double> main, std::span<const double> town, const ActionMask& mask) {
  if (main.size() != kNumMainActions || town.size() != kNumTownActions)
    throw std::invalid_argument("policy heads have the wrong size");
  if (mask.none()) throw std::invalid_argument("no legal action to renormalize over");

  MaskedPolicy out{std::vector<double>(kNumMainActions, 0.0), std::vector<double>(kNumTownActions, 0.0)};
  auto head = [&](std::span<const double> p, std::vector<double>& dst, int offset) {
    double total = 0.0;
    int legal = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!mask[offset + i]) continue;
      ++legal;
      const double v = std::isfinite(p[i]) && p[i] > 0.0 ? p[i] : 0.0;
      dst[i] = v;
      total += v;
    }
    if (legal == 0) return;
    if (!(total > 0.0) || !std::isfinite(total)) {
      for (std::size_t i = 0; i < p.size(); ++i) dst[i] = mask[offset + i] ? 1.0 / legal : 0.0;
      return;
    }
    for (double& v : dst) v /= total;
  };
  head(main, out.main, 0);
  head(town, out.town, kNumMainActions);
  return out;
}

}  // namespace terra::encoding
