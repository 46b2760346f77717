#pragma once

#include <bitset>
#include <span>
#include <vector>

#include "terra/encoding/layout.hpp"
#include "terra/rules/action.hpp"
#include "terra/rules/game_state.hpp"

namespace terra::encoding {

// Dense action index blocks.
inline constexpr int kHexPlanes = 18;  // 7 terraform, 7 terraform+build, 4 upgrades
inline constexpr int kHexActions = kNumHexes * kHexPlanes;  // 2106
inline constexpr int kCultPriestOffset = kHexActions;       // 4 cults x {3,2,1} steps
inline constexpr int kShippingIndex = kCultPriestOffset + 12;
inline constexpr int kSpadeIndex = kShippingIndex + 1;
inline constexpr int kPowerActionIndex = kSpadeIndex + 1;
inline constexpr int kSpecialActionIndex = kPowerActionIndex + 6;
inline constexpr int kPassIndex = kSpecialActionIndex + 3;
inline constexpr int kTownIndex = kPassIndex + 9;
inline constexpr int kNumMainActions = kTownIndex;  // 2138
inline constexpr int kNumTownActions = 5;
inline constexpr int kNumActions = kNumMainActions + kNumTownActions;  // 2143

using ActionIndex = int;
using ActionMask = std::bitset<kNumActions>;

ActionIndex action_to_index(const Action& a);

/// Throws std::out_of_range for indices outside [0, 2143).
Action index_to_action(ActionIndex i);

/// Layer-major (layer, row, col) values.
class StateTensor {
 public:
  StateTensor() : data_(kTensorSize, 0.0) {}

  double& at(int layer, int row, int col) { return data_[(layer * kBoardRows + row) * kBoardCols + col]; }
  double at(int layer, int row, int col) const { return data_[(layer * kBoardRows + row) * kBoardCols + col]; }
  void fill_layer(int layer, double v);

  std::span<const double> data() const { return data_; }
  std::span<const double> layer(int l) const { return std::span(data_).subspan(l * kPlaneSize, kPlaneSize); }

  friend bool operator==(const StateTensor&, const StateTensor&) = default;

 private:
  std::vector<double> data_;
};

/// Doubled-grid columns covered by hex (row, col): {2c, 2c+1}, shifted rows one to the right.
std::pair<int, int> doubled_columns(int row, int col);

StateTensor encode_state(const GameState& state);

ActionMask legal_mask(const GameState& state);

struct MaskedPolicy {
  std::vector<double> main;  // kNumMainActions
  std::vector<double> town;  // kNumTownActions
};

/// Zeroes illegal entries and renormalizes each head independently; a head
/// whose legal mass is zero falls back to uniform over its legal entries.
/// Throws std::invalid_argument when the mask has no legal entry at all.
MaskedPolicy mask_and_renormalize(std::span<const double> main, std::span<const double> town, const ActionMask& mask);

}  // namespace terra::encoding
