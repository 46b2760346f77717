#pragma once

// Input-plane layout of the state tensor (9 x 26 x 206).
//
// Block offsets:
//   0   terrain one-hot (7 land + water)           8
//   8   structures                                  5
//   13  board power actions taken                   6
//   19  scoring tiles: 8 types x (6 rounds + game)  56
//   75  favor tile supply (count / 3)               12
//   87  bonus cards in play                         9
//   96  player 0 block                              48
//   144 player 1 block                              48
//   192 faction to play (one-hot over 14)           14
//
// Player block (offsets relative to the block start, scale = divisor):
//   0 workers/30  1 priests/7  2 coins/30  3-5 power bowls/12
//   6 workers per spade/3  7 shipping/3  8-11 cult positions/10
//   12-16 buildings placed (D/8, TP/4, TE/3, SA/1, SH/1)  17 VP/200
//   18-21 next-round income (workers/10, priests/5, coins/17, power/21)
//   22 bridges available/3  23 bridge endpoints (per cell)
//   24-32 bonus card held  33-42 favor tiles  43-47 town tiles (count/2)
//
// Favor layers 33-40 are tiles 5..12 as bits; 41 packs tiles 1 and 2 as
// (t1 + 2 t2) / 3 and 42 packs tiles 3 and 4 the same way.
//
// Count layers saturate at 1 when the count exceeds the scale.

#include <cstdint>
#include <string>
#include <vector>

namespace terra::encoding {

inline constexpr int kBoardRows = 9;
inline constexpr int kBoardCols = 26;
inline constexpr int kNumLayers = 206;
inline constexpr int kPlaneSize = kBoardRows * kBoardCols;
inline constexpr int kTensorSize = kNumLayers * kPlaneSize;

inline constexpr int kTerrainOffset = 0;
inline constexpr int kWaterLayer = 7;
inline constexpr int kStructureOffset = 8;
inline constexpr int kPowerActionOffset = 13;
inline constexpr int kScoringOffset = 19;
inline constexpr int kScoringSlotsPerTile = 7;
inline constexpr int kFavorSupplyOffset = 75;
inline constexpr int kBonusInPlayOffset = 87;
inline constexpr int kPlayerOffset = 96;
inline constexpr int kPlayerBlockSize = 48;
inline constexpr int kFactionOffset = 192;
inline constexpr int kNumFactionLayers = 14;

// Player block sub-offsets.
inline constexpr int kPWorkers = 0;
inline constexpr int kPPriests = 1;
inline constexpr int kPCoins = 2;
inline constexpr int kPBowls = 3;
inline constexpr int kPSpadeCost = 6;
inline constexpr int kPShipping = 7;
inline constexpr int kPCult = 8;
inline constexpr int kPBuildings = 12;
inline constexpr int kPVp = 17;
inline constexpr int kPIncome = 18;
inline constexpr int kPBridgesLeft = 22;
inline constexpr int kPBridgeCells = 23;
inline constexpr int kPBonus = 24;
inline constexpr int kPFavors = 33;
inline constexpr int kPTowns = 43;

/// Index of each of the 14 base-game factions in the faction block.
inline constexpr int kEngineersFactionLayer = 6;
inline constexpr int kHalflingsFactionLayer = 9;

struct LayerField {
  std::string name;
  int offset;
  int width;
  double scale;  // stored value = min(raw / scale, 1)
  bool binary;
};

/// Every named field of the layout, ordered by offset and covering [0, 206).
const std::vector<LayerField>& layer_fields();

/// Structured-text (JSON) manifest of the layout.
std::string layout_manifest();

/// FNV-1a 64 of the manifest text; embedded in checkpoints.
std::uint64_t layout_hash();

}  // namespace terra::encoding
