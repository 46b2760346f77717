#pragma once

#include <array>
#include <bitset>
#include <vector>

#include "terra/rules/types.hpp"

namespace terra {

using HexId = int;
using HexSet = std::bitset<kNumHexes>;

inline constexpr HexId hex_id(int row, int col) { return row * kCols + col; }
inline constexpr int hex_row(HexId h) { return h / kCols; }
inline constexpr int hex_col(HexId h) { return h % kCols; }

/// Rows with index 1, 3, 5, 7 are shifted half a hex right and hold 12 hexes;
/// their 13th column is off the map.
inline constexpr bool is_shifted_row(int row) { return row % 2 == 1; }
inline constexpr bool on_map(HexId h) { return !(is_shifted_row(hex_row(h)) && hex_col(h) == kCols - 1); }

/// A pair of land hexes separated by a one-hex-wide river.
struct BridgeSite {
  HexId a;
  HexId b;
};

/// Fixed topology of the base map.
class BoardTopology {
 public:
  static const BoardTopology& instance();

  Terrain initial_terrain(HexId h) const { return terrain_[h]; }
  bool is_land(HexId h) const { return on_map(h) && terrain_[h] != Terrain::Water; }
  const std::vector<HexId>& neighbors(HexId h) const { return neighbors_[h]; }
  bool adjacent(HexId a, HexId b) const { return adjacency_[a][b]; }

  /// Fewest river hexes crossed between two land hexes; 0 when directly
  /// adjacent, kUnreachable when no river path exists.
  int ship_distance(HexId a, HexId b) const { return ship_distance_[a][b]; }
  static constexpr int kUnreachable = 99;

  const std::vector<BridgeSite>& bridge_sites() const { return bridge_sites_; }
  const std::vector<HexId>& land_hexes() const { return land_; }

 private:
  BoardTopology();

  std::array<Terrain, kNumHexes> terrain_{};
  std::array<std::vector<HexId>, kNumHexes> neighbors_;
  std::array<std::bitset<kNumHexes>, kNumHexes> adjacency_;
  std::array<std::array<std::uint8_t, kNumHexes>, kNumHexes> ship_distance_{};
  std::vector<BridgeSite> bridge_sites_;
  std::vector<HexId> land_;
};

/// "A1".."I13" style label.
std::string hex_label(HexId h);

}  // namespace terra
