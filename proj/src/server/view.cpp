#include "terra/server/view.hpp"

#include "terra/rules/board.hpp"
#include "terra/rules/catalog.hpp"

namespace terra::server {

namespace {

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Setup: return "setup";
    case Phase::Actions: return "actions";
    case Phase::Cleanup: return "cleanup";
    case Phase::End: return "end";
  }
  return "?";
}

const char* scoring_action_name(ScoringAction a) {
  switch (a) {
    case ScoringAction::Spade: return "spade";
    case ScoringAction::Town: return "town";
    case ScoringAction::Dwelling: return "dwelling";
    case ScoringAction::StrongholdSanctuary: return "stronghold/sanctuary";
    case ScoringAction::TradingPost: return "trading post";
  }
  return "?";
}

const char* reward_name(CultReward r) {
  switch (r) {
    case CultReward::Coin: return "coin";
    case CultReward::Spade: return "spade";
    case CultReward::Priest: return "priest";
    case CultReward::Worker: return "worker";
    case CultReward::Power: return "power";
  }
  return "?";
}

json resources(const Resources& r) {
  return {{"workers", r.workers}, {"priests", r.priests}, {"coins", r.coins}, {"power", r.power}};
}

json player_view(const GameState& s, int seat) {
  const PlayerState& p = s.players[seat];
  json cults = json::object();
  for (int c = 0; c < kNumCults; ++c) cults[cult_name(static_cast<Cult>(c))] = p.cult[c];
  json buildings = json::object();
  for (int b = 1; b <= kNumBuildingTypes; ++b) {
    const auto kind = static_cast<Building>(b);
    buildings[building_name(kind)] = p.built(kind);
  }
  json favors = json::array();
  for (int f = 0; f < kNumFavorTiles; ++f)
    if (p.has_favor(f)) favors.push_back(f);
  json towns = json::array();
  for (int t = 0; t < kNumTownTiles; ++t)
    for (int k = 0; k < p.towns[t]; ++k) towns.push_back(t);
  return {{"seat", seat},
          {"faction", faction_name(p.faction)},
          {"home", terrain_name(faction_board(p.faction).home)},
          {"vp", p.vp},
          {"workers", p.workers},
          {"priests", p.priests},
          {"coins", p.coins},
          {"power", p.bowls},
          {"shipping", p.shipping},
          {"effective_shipping", effective_shipping(p)},
          {"dig_level", p.dig_level},
          {"spade_cost", spade_cost(p)},
          {"cults", std::move(cults)},
          {"priests_on_cult", p.priests_on_cult},
          {"buildings", std::move(buildings)},
          {"bonus_card", p.bonus_card},
          {"favors", std::move(favors)},
          {"towns", std::move(towns)},
          {"keys", p.keys_available()},
          {"bridges_placed", p.bridges_placed},
          {"passed", p.passed},
          {"income", resources(income(p))}};
}

}  // namespace

json state_view(const GameState& s) {
  const bool terminal = is_terminal(s);
  json board = json::array();
  for (HexId h = 0; h < kNumHexes; ++h) {
    if (!on_map(h)) continue;
    const HexState& hex = s.hexes[h];
    json cell = {{"hex", hex_label(h)},
                 {"row", hex_row(h)},
                 {"col", hex_col(h)},
                 {"terrain", terrain_name(hex.terrain)},
                 {"building", nullptr},
                 {"owner", nullptr},
                 {"in_town", hex.in_town}};
    if (hex.building != Building::None) {
      cell["building"] = building_name(hex.building);
      cell["owner"] = hex.owner;
    }
    board.push_back(std::move(cell));
  }

  json bridges = json::array();
  const auto& sites = BoardTopology::instance().bridge_sites();
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (s.bridges[i] < 0) continue;
    bridges.push_back({{"from", hex_label(sites[i].a)}, {"to", hex_label(sites[i].b)}, {"owner", s.bridges[i]}});
  }

  json scoring = json::array();
  for (int r = 0; r < kNumRounds; ++r) {
    const int id = s.scoring_tiles[r];
    const ScoringTile& t = kScoringTiles[id];
    scoring.push_back({{"round", r + 1},
                       {"id", id},
                       {"scores", scoring_action_name(t.action)},
                       {"vp", t.vp},
                       {"cult", cult_name(t.cult)},
                       {"cult_steps", t.cult_steps},
                       {"reward", reward_name(t.reward)},
                       {"reward_amount", t.reward_amount}});
  }

  json bonus = json::array();
  for (int c = 0; c < kNumBonusCards; ++c) {
    if (!((s.bonus_in_play >> c) & 1U)) continue;
    bonus.push_back({{"id", c}, {"available", s.bonus_available(c)}, {"coins", s.bonus_coins[c]}});
  }

  json cult_board = json::array();
  for (int c = 0; c < kNumCults; ++c) {
    cult_board.push_back({{"cult", cult_name(static_cast<Cult>(c))},
                          {"positions", {s.players[0].cult[c], s.players[1].cult[c]}},
                          {"three_slot", s.cult_three_slot[c]},
                          {"two_slots_used", s.cult_two_slots_used[c]}});
  }

  json towns_left = json::array();
  for (int t = 0; t < kNumTownTiles; ++t) towns_left.push_back({{"id", t}, {"vp", kTownTiles[t].vp}, {"left", s.town_supply[t]}});

  json v = {{"round", s.round},
            {"phase", phase_name(s.phase)},
            {"to_move", terminal ? json(nullptr) : json(s.to_move)},
            {"start_player", s.start_player},
            {"ply", s.ply},
            {"terminal", terminal},
            {"truncated", s.truncated},
            {"board", std::move(board)},
            {"bridges", std::move(bridges)},
            {"players", {player_view(s, 0), player_view(s, 1)}},
            {"cult_board", std::move(cult_board)},
            {"scoring_tiles", std::move(scoring)},
            {"bonus_cards", std::move(bonus)},
            {"power_actions_taken", s.power_taken},
            {"town_tiles", std::move(towns_left)},
            {"pending",
             {{"town_choices", s.pending_towns},
              {"spades", s.pending_spades.count},
              {"spades_can_build", s.pending_spades.can_build},
              {"spades_can_pay_extra", s.pending_spades.can_pay_extra}}}};
  if (terminal) {
    const auto [a, b] = final_scores(s);
    v["scores"] = {a, b};
    v["winner"] = a == b ? json(nullptr) : json(a > b ? 0 : 1);
  } else {
    v["scores"] = {s.players[0].vp, s.players[1].vp};
  }
  return v;
}

}  // namespace terra::server
