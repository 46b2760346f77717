#include "terra/rules/board.hpp"

#include <deque>
#include <string_view>

namespace terra {

namespace {

// Base map, one letter per hex: P plain, S swamp, L lake, F forest,
// M mountain, W wasteland, D desert, . river. Shifted rows list 12 hexes.
constexpr std::array<std::string_view, kRows> kBaseMap{
    "PMFLDWPSWFLWS",
    "D..PS..DS..D",
    "..S.M.F.F.M..",
    "FLD..WL.W.WP",
    "SPWLSPMD..FSL",
    "MF..DF...PMP",
    "...M.W.F.DSLD",
    "DLP...LS.MPM",
    "WSMLWFDPM.LFW",
};

Terrain parse_terrain(char c) {
  switch (c) {
    case 'P': return Terrain::Plain;
    case 'S': return Terrain::Swamp;
    case 'L': return Terrain::Lake;
    case 'F': return Terrain::Forest;
    case 'M': return Terrain::Mountain;
    case 'W': return Terrain::Wasteland;
    case 'D': return Terrain::Desert;
    default: return Terrain::Water;
  }
}

}  // namespace

const BoardTopology& BoardTopology::instance() {
  static const BoardTopology topology;
  return topology;
}

BoardTopology::BoardTopology() {
  for (int r = 0; r < kRows; ++r) {
    for (int c = 0; c < kCols; ++c) {
      const HexId h = hex_id(r, c);
      terrain_[h] = c < static_cast<int>(kBaseMap[r].size()) ? parse_terrain(kBaseMap[r][c]) : Terrain::Water;
      if (is_land(h)) land_.push_back(h);
    }
  }

  for (HexId h = 0; h < kNumHexes; ++h) {
    if (!on_map(h)) continue;
    const int r = hex_row(h);
    const int c = hex_col(h);
    // Diagonal neighbors sit at columns {c-1, c} from an unshifted row and
    // {c, c+1} from a shifted one.
    const int lo = is_shifted_row(r) ? c : c - 1;
    const std::array<std::pair<int, int>, 6> candidates{{
        {r, c - 1}, {r, c + 1}, {r - 1, lo}, {r - 1, lo + 1}, {r + 1, lo}, {r + 1, lo + 1}}};
    for (auto [nr, nc] : candidates) {
      if (nr < 0 || nr >= kRows || nc < 0 || nc >= kCols) continue;
      const HexId n = hex_id(nr, nc);
      if (!on_map(n)) continue;
      neighbors_[h].push_back(n);
      adjacency_[h].set(n);
    }
  }

  // River distances: BFS through river hexes from each land hex.
  for (auto& row : ship_distance_) row.fill(kUnreachable);
  for (HexId src : land_) {
    std::array<int, kNumHexes> depth;
    depth.fill(-1);
    std::deque<HexId> queue;
    for (HexId n : neighbors_[src]) {
      if (is_land(n)) {
        ship_distance_[src][n] = 0;
      } else if (depth[n] < 0) {
        depth[n] = 1;
        queue.push_back(n);
      }
    }
    while (!queue.empty()) {
      const HexId w = queue.front();
      queue.pop_front();
      for (HexId n : neighbors_[w]) {
        if (is_land(n)) {
          if (n != src && ship_distance_[src][n] > depth[w]) ship_distance_[src][n] = static_cast<std::uint8_t>(depth[w]);
        } else if (depth[n] < 0) {
          depth[n] = depth[w] + 1;
          queue.push_back(n);
        }
      }
    }
  }

  // Bridge sites: non-adjacent land pairs whose two common neighbors are river.
  for (std::size_t i = 0; i < land_.size(); ++i) {
    for (std::size_t j = i + 1; j < land_.size(); ++j) {
      const HexId a = land_[i];
      const HexId b = land_[j];
      if (adjacency_[a][b]) continue;
      const auto common = adjacency_[a] & adjacency_[b];
      if (common.count() != 2) continue;
      bool river = true;
      for (HexId n : neighbors_[a]) {
        if (common[n] && is_land(n)) river = false;
      }
      if (river) bridge_sites_.push_back({a, b});
    }
  }
}

std::string hex_label(HexId h) {
  std::string s(1, static_cast<char>('A' + hex_row(h)));
  s += std::to_string(hex_col(h) + 1);
  return s;
}

}  // namespace terra
