#include "terra/rules/action.hpp"

#include "terra/rules/catalog.hpp"

namespace terra {

namespace {

struct Describer {
  std::string operator()(const TerraformBuild& a) const {
    std::string s = "terraform " + hex_label(a.hex) + " to " + terrain_name(a.target);
    return a.build ? s + " and build a dwelling" : s;
  }
  std::string operator()(const AdvanceShipping&) const { return "advance shipping"; }
  std::string operator()(const AdvanceSpade&) const { return "advance spade exchange"; }
  std::string operator()(const Upgrade& a) const { return std::string("upgrade ") + hex_label(a.hex) + " " + upgrade_name(a.kind); }
  std::string operator()(const SendPriest& a) const {
    return std::string("send priest to ") + cult_name(a.cult) + " for " + std::to_string(a.steps) + " step(s)";
  }
  std::string operator()(const PowerAction& a) const {
    static constexpr const char* names[] = {"bridge", "1 priest", "2 workers", "7 coins", "1 spade", "2 spades"};
    return std::string("power action: ") + names[a.slot];
  }
  std::string operator()(const SpecialAction& a) const {
    static constexpr const char* names[] = {"bonus spade", "cult step", "faction ability"};
    return std::string("special action: ") + names[a.slot];
  }
  std::string operator()(const Pass& a) const { return "pass, taking bonus card " + std::to_string(a.bonus_card + 1); }
  std::string operator()(const TownTileChoice& a) const { return "take town tile " + std::to_string(a.tile + 1); }
};

}  // namespace

std::string describe(const Action& a) { return std::visit(Describer{}, a); }

}  // namespace terra
