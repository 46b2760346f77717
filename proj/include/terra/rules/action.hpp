#pragma once

#include <string>
#include <variant>

#include "terra/rules/board.hpp"
#include "terra/rules/types.hpp"

namespace terra {

/// Transform a hex toward `target` and optionally build a dwelling on it.
/// target == current terrain with build == true means "build without terraforming".
struct TerraformBuild {
  HexId hex = 0;
  Terrain target = Terrain::Plain;
  bool build = false;
  friend bool operator==(const TerraformBuild&, const TerraformBuild&) = default;
};

struct AdvanceShipping {
  friend bool operator==(const AdvanceShipping&, const AdvanceShipping&) = default;
};

struct AdvanceSpade {
  friend bool operator==(const AdvanceSpade&, const AdvanceSpade&) = default;
};

struct Upgrade {
  HexId hex = 0;
  UpgradeKind kind = UpgradeKind::DwellingToTradingPost;
  friend bool operator==(const Upgrade&, const Upgrade&) = default;
};

struct SendPriest {
  Cult cult = Cult::Fire;
  int steps = 3;  // 3, 2 or 1
  friend bool operator==(const SendPriest&, const SendPriest&) = default;
};

struct PowerAction {
  int slot = 0;
  friend bool operator==(const PowerAction&, const PowerAction&) = default;
};

struct SpecialAction {
  int slot = 0;
  friend bool operator==(const SpecialAction&, const SpecialAction&) = default;
};

struct Pass {
  int bonus_card = 0;
  friend bool operator==(const Pass&, const Pass&) = default;
};

struct TownTileChoice {
  int tile = 0;
  friend bool operator==(const TownTileChoice&, const TownTileChoice&) = default;
};

using Action = std::variant<TerraformBuild, AdvanceShipping, AdvanceSpade, Upgrade, SendPriest, PowerAction,
                            SpecialAction, Pass, TownTileChoice>;

std::string describe(const Action& a);

}  // namespace terra
