#include "terra/rules/engine.hpp"

#include <algorithm>
#include <bit>
#include <random>

namespace terra {

namespace {

const BoardTopology& topo() { return BoardTopology::instance(); }

constexpr int opponent(int p) { return 1 - p; }

Resources operator+(Resources a, const Resources& b) {
  a.workers += b.workers;
  a.priests += b.priests;
  a.coins += b.coins;
  a.power += b.power;
  return a;
}

Terrain home_of(const PlayerState& p) { return faction_board(p.faction).home; }

// Setup placement order (dwellings) and bonus-card pick order, relative to the start player.
constexpr std::array<int, 4> kSetupDwellingOrder{0, 1, 1, 0};
constexpr std::array<int, 2> kSetupBonusOrder{1, 0};
constexpr int kSetupSteps = 6;

int setup_player(int step) {
  return step < 4 ? kSetupDwellingOrder[step] : kSetupBonusOrder[step - 4];
}

// ---------------------------------------------------------------------------
// Payment planning

struct PaymentPlan {
  bool feasible = false;
  int priests_for_workers = 0;
  int priests_for_coins = 0;
  int workers_for_coins = 0;
  int power_spent = 0;  // from bowl III after burning
  int burn = 0;
};

// Shortfalls are covered by power first; workers then priests substitute for
// power only as far as needed to avoid burning more than bowl II allows.
PaymentPlan plan_payment(const PlayerState& p, const Resources& cost) {
  PaymentPlan plan;
  const int short_priests = std::max(0, cost.priests - p.priests);
  int short_workers = std::max(0, cost.workers - p.workers);
  int short_coins = std::max(0, cost.coins - p.coins);
  int spare_priests = std::max(0, p.priests - cost.priests);
  int spare_workers = std::max(0, p.workers - cost.workers);

  int power = cost.power + 5 * short_priests + 3 * short_workers + short_coins;
  const int bowl3 = p.bowls[2];
  while (power > bowl3 && spare_workers > 0 && short_coins > 0) {
    --spare_workers;
    --short_coins;
    ++plan.workers_for_coins;
    --power;
  }
  auto burn_needed = [&] { return std::max(0, power - bowl3); };
  while (2 * burn_needed() > p.bowls[1]) {
    if (spare_priests > 0 && short_workers > 0) {
      --spare_priests;
      --short_workers;
      ++plan.priests_for_workers;
      power -= 3;
    } else if (spare_priests > 0 && short_coins > 0) {
      --spare_priests;
      --short_coins;
      ++plan.priests_for_coins;
      power -= 1;
    } else {
      return plan;
    }
  }
  plan.burn = burn_needed();
  plan.power_spent = power;
  plan.feasible = true;
  return plan;
}

void gain_priests(PlayerState& p, int n) {
  const int room = kMaxPriests - p.priests_on_cult - p.priests;
  p.priests += std::clamp(n, 0, std::max(0, room));
}

void gain(PlayerState& p, const Resources& r) {
  p.workers += r.workers;
  p.coins += r.coins;
  gain_priests(p, r.priests);
  gain_power(p, r.power);
}

// ---------------------------------------------------------------------------
// Board queries

bool bridge_connects(const GameState& s, int player, HexId a, HexId b) {
  const auto& sites = topo().bridge_sites();
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (s.bridges[i] != player) continue;
    if ((sites[i].a == a && sites[i].b == b) || (sites[i].a == b && sites[i].b == a)) return true;
  }
  return false;
}

std::vector<HexId> buildings_of(const GameState& s, int player) {
  std::vector<HexId> out;
  for (HexId h = 0; h < kNumHexes; ++h) {
    if (s.hexes[h].building != Building::None && s.hexes[h].owner == player) out.push_back(h);
  }
  return out;
}

bool has_reachable_free_land(const HexSet& reach) { return reach.any(); }

bool opponent_adjacent(const GameState& s, int player, HexId h) {
  for (HexId n : topo().neighbors(h)) {
    if (s.hexes[n].building != Building::None && s.hexes[n].owner == opponent(player)) return true;
  }
  return false;
}

std::vector<int> free_bridge_sites(const GameState& s, int player) {
  std::vector<int> out;
  const auto& sites = topo().bridge_sites();
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (s.bridges[i] != -1) continue;
    if (s.hexes[sites[i].a].owner == player || s.hexes[sites[i].b].owner == player) out.push_back(static_cast<int>(i));
  }
  return out;
}

int cult_cap(const GameState& s, int player, Cult c) {
  const auto& me = s.players[player];
  const bool top_free = s.players[opponent(player)].cult[static_cast<int>(c)] < kCultMax;
  return me.keys_available() > 0 && top_free ? kCultMax : kCultMax - 1;
}

int cult_gain(const GameState& s, int player, Cult c, int steps) {
  const int pos = s.players[player].cult[static_cast<int>(c)];
  if (pos >= kCultMax) return 0;
  return std::max(0, std::min(pos + steps, cult_cap(s, player, c)) - pos);
}

// Lowest track that can still advance, preferring the least advanced.
std::optional<Cult> auto_cult_track(const GameState& s, int player) {
  std::optional<Cult> best;
  for (int c = 0; c < kNumCults; ++c) {
    if (cult_gain(s, player, static_cast<Cult>(c), 1) == 0) continue;
    if (!best || s.players[player].cult[c] < s.players[player].cult[static_cast<int>(*best)]) best = static_cast<Cult>(c);
  }
  return best;
}

bool cult_special_available(const PlayerState& p) {
  const bool from_bonus = p.bonus_card >= 0 && kBonusCards[p.bonus_card].cult_action && !p.used_bonus_special;
  const bool from_favor = p.has_favor(5) && !p.used_favor_cult;
  return from_bonus || from_favor;
}

bool spade_special_available(const PlayerState& p) {
  return p.bonus_card >= 0 && kBonusCards[p.bonus_card].spade_action && !p.used_bonus_special;
}

Resources trading_post_cost(const GameState& s, int player, HexId h) {
  Resources cost = faction_board(s.players[player].faction).trading_post_cost;
  if (!opponent_adjacent(s, player, h)) cost.coins *= 2;
  return cost;
}

Resources upgrade_cost(const GameState& s, int player, HexId h, UpgradeKind k) {
  const auto& fb = faction_board(s.players[player].faction);
  switch (k) {
    case UpgradeKind::DwellingToTradingPost: return trading_post_cost(s, player, h);
    case UpgradeKind::TradingPostToStronghold: return fb.stronghold_cost;
    case UpgradeKind::TradingPostToTemple: return fb.temple_cost;
    case UpgradeKind::TempleToSanctuary: return fb.sanctuary_cost;
  }
  return {};
}

std::pair<Building, Building> upgrade_buildings(UpgradeKind k) {
  switch (k) {
    case UpgradeKind::DwellingToTradingPost: return {Building::Dwelling, Building::TradingPost};
    case UpgradeKind::TradingPostToStronghold: return {Building::TradingPost, Building::Stronghold};
    case UpgradeKind::TradingPostToTemple: return {Building::TradingPost, Building::Temple};
    case UpgradeKind::TempleToSanctuary: return {Building::Temple, Building::Sanctuary};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Legality

class Checker {
 public:
  explicit Checker(const GameState& s) : s_(s), player_(s.to_move), me_(s.players[s.to_move]) {}

  std::optional<std::string> operator()(const Action& a) {
    if (s_.phase == Phase::End) return "the game is over";
    if (s_.phase == Phase::Setup) return std::visit([&](const auto& x) { return setup(x); }, a);
    if (s_.pending_towns > 0) {
      if (const auto* t = std::get_if<TownTileChoice>(&a)) return town(*t);
      return "a town tile must be chosen first";
    }
    if (s_.pending_spades.count > 0) {
      if (const auto* t = std::get_if<TerraformBuild>(&a)) return free_spades(*t);
      return "pending spades must be used first";
    }
    if (s_.phase == Phase::Cleanup) return "no decision pending in cleanup";
    return std::visit([&](const auto& x) { return main(x); }, a);
  }

  const HexSet& reach() {
    if (!reach_) reach_ = reachable_hexes(s_, player_);
    return *reach_;
  }

 private:
  using Result = std::optional<std::string>;

  Result afford(const Resources& cost, const char* what) const {
    if (can_afford(me_, cost)) return std::nullopt;
    return std::string("cannot afford ") + what;
  }

  Result free_land(HexId h) const {
    if (h < 0 || h >= kNumHexes || !topo().is_land(h)) return "hex is not buildable land";
    if (s_.hexes[h].building != Building::None) return "hex " + hex_label(h) + " is occupied";
    return std::nullopt;
  }

  // Setup: dwellings on home terrain, then bonus-card picks.
  Result setup(const TerraformBuild& a) {
    if (s_.setup_step >= 4) return "setup expects a bonus card pick";
    if (auto e = free_land(a.hex)) return e;
    const Terrain home = home_of(me_);
    if (s_.hexes[a.hex].terrain != home || a.target != home || !a.build)
      return "setup dwellings go on unoccupied home terrain without terraforming";
    return std::nullopt;
  }
  Result setup(const Pass& a) {
    if (s_.setup_step < 4) return "setup expects a dwelling placement";
    if (a.bonus_card < 0 || a.bonus_card >= kNumBonusCards || !s_.bonus_available(a.bonus_card))
      return "bonus card is not available";
    return std::nullopt;
  }
  template <typename T>
  Result setup(const T&) {
    return "only dwelling placement and bonus card picks are allowed during setup";
  }

  Result town(const TownTileChoice& a) const {
    if (a.tile < 0 || a.tile >= kNumTownTiles || s_.town_supply[a.tile] == 0) return "town tile is not available";
    return std::nullopt;
  }

  Result free_spades(const TerraformBuild& a) {
    const PendingSpades& ps = s_.pending_spades;
    if (auto e = free_land(a.hex)) return e;
    if (!reach()[a.hex]) return "hex " + hex_label(a.hex) + " is not reachable from your structures";
    if (a.target == Terrain::Water) return "cannot terraform into water";
    const int dist = terraform_distance(s_.hexes[a.hex].terrain, a.target);
    if (dist == 0) return "free spades must transform terrain";
    const int extra = std::max(0, dist - ps.count);
    if (extra > 0 && !ps.can_pay_extra) return "not enough free spades";
    Resources cost{extra * spade_cost(me_), 0, 0, 0};
    if (a.build) {
      if (!ps.can_build) return "cannot build with these spades";
      if (a.target != home_of(me_)) return "dwellings only go on home terrain";
      if (me_.built(Building::Dwelling) >= kBuildingStock[0]) return "no dwellings left";
      cost = cost + faction_board(me_.faction).dwelling_cost;
    }
    return afford(cost, "the spades and building");
  }

  Result main(const TerraformBuild& a) {
    if (auto e = free_land(a.hex)) return e;
    if (!reach()[a.hex]) return "hex " + hex_label(a.hex) + " is not reachable from your structures";
    if (a.target == Terrain::Water) return "cannot terraform into water";
    const Terrain home = home_of(me_);
    const int dist = terraform_distance(s_.hexes[a.hex].terrain, a.target);
    if (dist == 0 && !a.build) return "terraforming to the same terrain does nothing";
    Resources cost{dist * spade_cost(me_), 0, 0, 0};
    if (a.build) {
      if (a.target != home) return "dwellings only go on home terrain";
      if (me_.built(Building::Dwelling) >= kBuildingStock[0]) return "no dwellings left";
      cost = cost + faction_board(me_.faction).dwelling_cost;
    }
    return afford(cost, "the spades and building");
  }

  Result main(const AdvanceShipping&) {
    if (me_.shipping >= faction_board(me_.faction).max_shipping) return "shipping is at its maximum";
    return afford(faction_board(me_.faction).shipping_cost, "the shipping advance");
  }

  Result main(const AdvanceSpade&) {
    if (me_.dig_level >= faction_board(me_.faction).max_dig) return "spade exchange is at its maximum";
    return afford(faction_board(me_.faction).dig_cost, "the spade advance");
  }

  Result main(const Upgrade& a) {
    if (a.hex < 0 || a.hex >= kNumHexes) return "hex out of range";
    const HexState& hex = s_.hexes[a.hex];
    if (hex.owner != player_) return "no own building at " + hex_label(a.hex);
    const auto [from, to] = upgrade_buildings(a.kind);
    if (hex.building != from) return std::string("upgrade requires a ") + building_name(from);
    if (me_.built(to) >= kBuildingStock[building_slot(to)]) return std::string("no ") + building_name(to) + " left";
    return afford(upgrade_cost(s_, player_, a.hex, a.kind), "the upgrade");
  }

  Result main(const SendPriest& a) {
    const int c = static_cast<int>(a.cult);
    if (c < 0 || c >= kNumCults || a.steps < 1 || a.steps > 3) return "malformed priest action";
    if (a.steps == 3 && s_.cult_three_slot[c] != -1) return "the 3-step slot is taken";
    if (a.steps == 2 && s_.cult_two_slots_used[c] >= kCultTwoSlots) return "all 2-step slots are taken";
    if (cult_gain(s_, player_, a.cult, a.steps) == 0) return "cult track cannot advance";
    return afford({0, 1, 0, 0}, "a priest");
  }

  Result main(const PowerAction& a) {
    if (a.slot < 0 || a.slot >= kNumPowerActions) return "unknown power action";
    if (s_.power_taken[a.slot]) return "power action already taken this round";
    const auto& spec = kPowerActions[a.slot];
    if (auto e = afford({0, 0, 0, spec.cost}, "the power")) return e;
    if (spec.kind == PowerActionKind::Bridge) {
      if (me_.bridges_placed >= kMaxBridges) return "no bridges left";
      if (free_bridge_sites(s_, player_).empty()) return "no bridge site next to your structures";
    }
    if (spec.spades > 0 && !has_reachable_free_land(reach())) return "no reachable hex to terraform";
    return std::nullopt;
  }

  Result main(const SpecialAction& a) {
    switch (a.slot) {
      case kSpecialSpade:
        if (!spade_special_available(me_)) return "no spade special action available";
        if (!has_reachable_free_land(reach())) return "no reachable hex to terraform";
        return std::nullopt;
      case kSpecialCult:
        if (!cult_special_available(me_)) return "no cult special action available";
        if (!auto_cult_track(s_, player_)) return "no cult track can advance";
        return std::nullopt;
      case kSpecialFaction:
        if (me_.faction != Faction::Engineers) return "faction has no special action";
        if (me_.bridges_placed >= kMaxBridges) return "no bridges left";
        if (free_bridge_sites(s_, player_).empty()) return "no bridge site next to your structures";
        return afford(kEngineersBridgeCost, "the bridge");
      default: return "unknown special action";
    }
  }

  Result main(const Pass& a) {
    if (a.bonus_card < 0 || a.bonus_card >= kNumBonusCards) return "unknown bonus card";
    if (s_.round == kNumRounds) {
      if (a.bonus_card != me_.bonus_card) return "final-round pass keeps the held bonus card";
      return std::nullopt;
    }
    if (!s_.bonus_available(a.bonus_card)) return "bonus card is not available";
    return std::nullopt;
  }

  Result main(const TownTileChoice&) { return "no town has been founded"; }

  const GameState& s_;
  int player_;
  const PlayerState& me_;
  std::optional<HexSet> reach_;
};

// ---------------------------------------------------------------------------
// State transitions

class Mutator {
 public:
  explicit Mutator(GameState& s) : s_(s) {}

  void apply(const Action& a) {
    const int p = s_.to_move;
    if (s_.phase == Phase::Setup) {
      setup(p, a);
      return;
    }
    if (s_.pending_towns > 0) {
      take_town(p, std::get<TownTileChoice>(a).tile);
    } else if (s_.pending_spades.count > 0) {
      use_free_spades(p, std::get<TerraformBuild>(a));
    } else {
      std::visit([&](const auto& x) { main(p, x); }, a);
    }
    advance();
  }

 private:
  PlayerState& P(int p) { return s_.players[p]; }

  void setup(int p, const Action& a) {
    if (const auto* t = std::get_if<TerraformBuild>(&a)) {
      place_building(p, t->hex, Building::Dwelling, false);
    } else {
      take_bonus(p, std::get<Pass>(a).bonus_card);
    }
    ++s_.ply;
    ++s_.setup_step;
    if (s_.setup_step >= kSetupSteps) {
      start_round();
    } else {
      s_.to_move = (s_.start_player + setup_player(s_.setup_step)) % kNumPlayers;
    }
  }

  void score(int p, ScoringAction what, int times) {
    if (s_.phase != Phase::Actions || s_.round < 1) return;
    const auto& tile = kScoringTiles[s_.scoring_tiles[s_.round - 1]];
    if (tile.action == what) P(p).vp += tile.vp * times;
  }

  void spades_used(int p, int n, bool scores) {
    if (P(p).faction == Faction::Halflings) P(p).vp += kHalflingsSpadeVp * n;
    if (scores) score(p, ScoringAction::Spade, n);
  }

  void place_building(int p, HexId h, Building b, bool scores) {
    HexState& hex = s_.hexes[h];
    if (hex.building != Building::None) --P(p).buildings[building_slot(hex.building)];
    hex.building = b;
    hex.owner = static_cast<std::int8_t>(p);
    ++P(p).buildings[building_slot(b)];
    if (!scores) return;
    switch (b) {
      case Building::Dwelling:
        score(p, ScoringAction::Dwelling, 1);
        if (P(p).has_favor(10)) P(p).vp += kFavorDwellingVp;
        break;
      case Building::TradingPost:
        score(p, ScoringAction::TradingPost, 1);
        if (P(p).has_favor(9)) P(p).vp += kFavorTradingPostVp;
        break;
      case Building::Stronghold:
      case Building::Sanctuary: score(p, ScoringAction::StrongholdSanctuary, 1); break;
      default: break;
    }
  }

  void advance_cult(int p, Cult c, int steps) {
    const int gained = cult_gain(s_, p, c, steps);
    int& pos = P(p).cult[static_cast<int>(c)];
    const int before = pos;
    pos += gained;
    for (auto [threshold, power] : kCultPowerThresholds) {
      if (before < threshold && pos >= threshold) gain_power(P(p), power);
    }
  }

  void take_favor(int p) {
    for (int f = 0; f < kNumFavorTiles; ++f) {
      if (s_.favor_supply[f] == 0 || P(p).has_favor(f)) continue;
      --s_.favor_supply[f];
      P(p).favors = static_cast<std::uint16_t>(P(p).favors | (1U << f));
      advance_cult(p, kFavorTiles[f].cult, kFavorTiles[f].steps);
      return;
    }
  }

  void take_bonus(int p, int card) {
    P(p).bonus_card = card;
    P(p).coins += s_.bonus_coins[card];
    s_.bonus_coins[card] = 0;
  }

  void take_town(int p, int tile) {
    --s_.pending_towns;
    --s_.town_supply[tile];
    ++P(p).towns[tile];
    ++P(p).keys;
    const auto& t = kTownTiles[tile];
    P(p).vp += t.vp;
    gain(P(p), t.reward);
    for (int c = 0; c < kNumCults; ++c) advance_cult(p, static_cast<Cult>(c), t.cult_steps);
    score(p, ScoringAction::Town, 1);
  }

  void place_bridge(int p) {
    const auto sites = free_bridge_sites(s_, p);
    s_.bridges[sites.front()] = static_cast<std::int8_t>(p);
    ++P(p).bridges_placed;
  }

  // Marks town membership and queues a town tile for each newly founded town.
  void check_towns(int p) {
    const auto own = buildings_of(s_, p);
    HexSet seen;
    const int power_needed = P(p).has_favor(4) ? 6 : 7;
    for (HexId start : own) {
      if (seen[start]) continue;
      std::vector<HexId> group{start};
      seen.set(start);
      for (std::size_t i = 0; i < group.size(); ++i) {
        for (HexId other : own) {
          if (seen[other]) continue;
          if (topo().adjacent(group[i], other) || bridge_connects(s_, p, group[i], other)) {
            seen.set(other);
            group.push_back(other);
          }
        }
      }
      bool any_town = false;
      bool sanctuary = false;
      int power = 0;
      for (HexId h : group) {
        any_town |= s_.hexes[h].in_town;
        sanctuary |= s_.hexes[h].building == Building::Sanctuary;
        power += kBuildingPower[static_cast<int>(s_.hexes[h].building)];
      }
      const int size_needed = sanctuary ? 3 : 4;
      const bool founds = !any_town && static_cast<int>(group.size()) >= size_needed && power >= power_needed;
      if (any_town || founds) {
        for (HexId h : group) s_.hexes[h].in_town = true;
      }
      if (founds) {
        const bool tiles_left = std::any_of(s_.town_supply.begin(), s_.town_supply.end(), [](int n) { return n > 0; });
        if (tiles_left) ++s_.pending_towns;
      }
    }
  }

  void terraform(HexId h, Terrain target) { s_.hexes[h].terrain = target; }

  void use_free_spades(int p, const TerraformBuild& a) {
    PendingSpades& ps = s_.pending_spades;
    const int dist = terraform_distance(s_.hexes[a.hex].terrain, a.target);
    const int extra = std::max(0, dist - ps.count);
    Resources cost{extra * spade_cost(P(p)), 0, 0, 0};
    if (a.build) cost = cost + faction_board(P(p).faction).dwelling_cost;
    pay(P(p), cost);
    terraform(a.hex, a.target);
    spades_used(p, dist, ps.scores);
    ps.count -= std::min(dist, ps.count);
    ps.can_pay_extra = false;
    if (a.build) {
      place_building(p, a.hex, Building::Dwelling, true);
      ps.can_build = false;
      check_towns(p);
    }
    if (ps.count > 0 && !reachable_hexes(s_, p).any()) ps.count = 0;
    if (ps.count == 0) ps = PendingSpades{};
  }

  void grant_spades(int n, bool can_build, bool can_pay_extra, bool scores) {
    s_.pending_spades = PendingSpades{n, can_build, can_pay_extra, scores};
  }

  void main(int p, const TerraformBuild& a) {
    const int dist = terraform_distance(s_.hexes[a.hex].terrain, a.target);
    Resources cost{dist * spade_cost(P(p)), 0, 0, 0};
    if (a.build) cost = cost + faction_board(P(p).faction).dwelling_cost;
    pay(P(p), cost);
    if (dist > 0) {
      terraform(a.hex, a.target);
      spades_used(p, dist, true);
    }
    if (a.build) {
      place_building(p, a.hex, Building::Dwelling, true);
      check_towns(p);
    }
  }

  void main(int p, const AdvanceShipping&) {
    pay(P(p), faction_board(P(p).faction).shipping_cost);
    ++P(p).shipping;
    P(p).vp += kShippingVp[P(p).shipping];
  }

  void main(int p, const AdvanceSpade&) {
    pay(P(p), faction_board(P(p).faction).dig_cost);
    ++P(p).dig_level;
    P(p).vp += kDigVp;
  }

  void main(int p, const Upgrade& a) {
    pay(P(p), upgrade_cost(s_, p, a.hex, a.kind));
    const Building to = upgrade_buildings(a.kind).second;
    place_building(p, a.hex, to, true);
    if (to == Building::Temple || to == Building::Sanctuary) take_favor(p);
    check_towns(p);
    if (to == Building::Stronghold && P(p).faction == Faction::Halflings && reachable_hexes(s_, p).any())
      grant_spades(kHalflingsStrongholdSpades, true, false, true);
  }

  void main(int p, const SendPriest& a) {
    pay(P(p), {0, 1, 0, 0});
    const int c = static_cast<int>(a.cult);
    if (a.steps == 3) {
      s_.cult_three_slot[c] = static_cast<std::int8_t>(p);
      ++P(p).priests_on_cult;
    } else if (a.steps == 2) {
      ++s_.cult_two_slots_used[c];
      ++P(p).priests_on_cult;
    }
    advance_cult(p, a.cult, a.steps);
  }

  void main(int p, const PowerAction& a) {
    const auto& spec = kPowerActions[a.slot];
    pay(P(p), {0, 0, 0, spec.cost});
    s_.power_taken[a.slot] = true;
    gain(P(p), spec.gain);
    if (spec.kind == PowerActionKind::Bridge) {
      place_bridge(p);
      check_towns(p);
    }
    if (spec.spades > 0) grant_spades(spec.spades, true, true, true);
  }

  void main(int p, const SpecialAction& a) {
    switch (a.slot) {
      case kSpecialSpade:
        P(p).used_bonus_special = true;
        grant_spades(1, true, true, true);
        break;
      case kSpecialCult: {
        PlayerState& me = P(p);
        if (me.bonus_card >= 0 && kBonusCards[me.bonus_card].cult_action && !me.used_bonus_special) {
          me.used_bonus_special = true;
        } else {
          me.used_favor_cult = true;
        }
        advance_cult(p, *auto_cult_track(s_, p), 1);
        break;
      }
      case kSpecialFaction:
        pay(P(p), kEngineersBridgeCost);
        place_bridge(p);
        check_towns(p);
        break;
      default: break;
    }
  }

  int pass_vp(int p) const {
    const PlayerState& me = s_.players[p];
    int vp = 0;
    if (me.bonus_card >= 0) {
      const auto& card = kBonusCards[me.bonus_card];
      switch (card.pass_bonus) {
        case PassBonus::PerDwelling: vp += card.pass_vp * me.built(Building::Dwelling); break;
        case PassBonus::PerTradingPost: vp += card.pass_vp * me.built(Building::TradingPost); break;
        case PassBonus::PerStrongholdSanctuary:
          vp += card.pass_vp * (me.built(Building::Stronghold) + me.built(Building::Sanctuary));
          break;
        case PassBonus::None: break;
      }
    }
    if (me.has_favor(11)) vp += kFavorPassTradingPostVp[me.built(Building::TradingPost)];
    if (me.faction == Faction::Engineers && me.built(Building::Stronghold) > 0) {
      const auto& sites = topo().bridge_sites();
      for (std::size_t i = 0; i < sites.size(); ++i) {
        if (s_.bridges[i] == p && s_.hexes[sites[i].a].owner == p && s_.hexes[sites[i].b].owner == p)
          vp += kEngineersStrongholdBridgeVp;
      }
    }
    return vp;
  }

  void main(int p, const Pass& a) {
    if (s_.next_start_player < 0) s_.next_start_player = p;
    P(p).vp += pass_vp(p);
    if (s_.round < kNumRounds) take_bonus(p, a.bonus_card);
    P(p).passed = true;
  }

  void main(int, const TownTileChoice&) {}

  // Turn bookkeeping after a resolved decision.
  void advance() {
    ++s_.ply;
    if (s_.ply >= s_.max_plies) {
      s_.truncated = true;
      s_.phase = Phase::End;
      s_.pending_towns = 0;
      s_.pending_spades = PendingSpades{};
      return;
    }
    if (s_.pending_towns > 0 || s_.pending_spades.count > 0) return;
    if (s_.phase == Phase::Cleanup) {
      s_.cleanup_spades[s_.to_move] = 0;
      continue_cleanup();
      return;
    }
    const int other = opponent(s_.to_move);
    if (!s_.players[other].passed) {
      s_.to_move = other;
    } else if (s_.players[s_.to_move].passed) {
      end_round();
    }
  }

  void end_round() {
    if (s_.round == kNumRounds) {
      final_scoring();
      s_.phase = Phase::End;
      return;
    }
    const auto& tile = kScoringTiles[s_.scoring_tiles[s_.round - 1]];
    for (int p = 0; p < kNumPlayers; ++p) {
      const int times = P(p).cult[static_cast<int>(tile.cult)] / tile.cult_steps;
      const int n = times * tile.reward_amount;
      switch (tile.reward) {
        case CultReward::Coin: P(p).coins += n; break;
        case CultReward::Priest: gain_priests(P(p), n); break;
        case CultReward::Worker: P(p).workers += n; break;
        case CultReward::Power: gain_power(P(p), n); break;
        case CultReward::Spade: s_.cleanup_spades[p] = n; break;
      }
    }
    for (int card = 0; card < kNumBonusCards; ++card) {
      if (s_.bonus_available(card)) ++s_.bonus_coins[card];
    }
    s_.power_taken.fill(false);
    for (auto& p : s_.players) {
      p.passed = false;
      p.used_bonus_special = false;
      p.used_favor_cult = false;
    }
    if (s_.next_start_player >= 0) s_.start_player = s_.next_start_player;
    s_.next_start_player = -1;
    s_.phase = Phase::Cleanup;
    continue_cleanup();
  }

  void continue_cleanup() {
    for (int k = 0; k < kNumPlayers; ++k) {
      const int p = (s_.start_player + k) % kNumPlayers;
      if (s_.cleanup_spades[p] == 0) continue;
      if (!reachable_hexes(s_, p).any()) {
        s_.cleanup_spades[p] = 0;
        continue;
      }
      s_.to_move = p;
      s_.pending_spades = PendingSpades{s_.cleanup_spades[p], false, false, false};
      return;
    }
    start_round();
  }

  void start_round() {
    ++s_.round;
    for (auto& p : s_.players) gain(p, income(p));
    s_.phase = Phase::Actions;
    s_.to_move = s_.start_player;
  }

  void final_scoring() {
    std::array<int, kNumPlayers> network{};
    for (int p = 0; p < kNumPlayers; ++p) network[p] = largest_network(s_, p);
    award_ranked(network, kAreaVp, false);
    for (int c = 0; c < kNumCults; ++c) award_ranked({P(0).cult[c], P(1).cult[c]}, kCultVp, true);
    for (auto& p : s_.players) {
      const int coins = p.coins + p.workers + p.priests + p.bowls[2] + p.bowls[1] / 2;
      p.vp += coins / kCoinsPerVp;
    }
  }

  // Two-player ranking; ties split the pooled VP (rounded down).
  void award_ranked(std::array<int, kNumPlayers> value, const std::array<int, 2>& vp, bool zero_scores_nothing) {
    auto eligible = [&](int p) { return !zero_scores_nothing || value[p] > 0; };
    if (value[0] == value[1]) {
      if (eligible(0)) {
        const int share = (vp[0] + vp[1]) / 2;
        P(0).vp += share;
        P(1).vp += share;
      }
      return;
    }
    const int first = value[0] > value[1] ? 0 : 1;
    if (eligible(first)) P(first).vp += vp[0];
    if (eligible(opponent(first))) P(opponent(first)).vp += vp[1];
  }

  GameState& s_;
};

}  // namespace

// ---------------------------------------------------------------------------

int PlayerState::towns_founded() const {
  int n = 0;
  for (int t : towns) n += t;
  return n;
}

int PlayerState::keys_available() const {
  int used = 0;
  for (int c : cult) used += c >= kCultMax ? 1 : 0;
  return keys - used;
}

bool GameState::bonus_available(int card) const {
  if (!((bonus_in_play >> card) & 1U)) return false;
  for (const auto& p : players) {
    if (p.bonus_card == card) return false;
  }
  return true;
}

int effective_shipping(const PlayerState& p) {
  return p.shipping + (p.bonus_card >= 0 ? kBonusCards[p.bonus_card].shipping_bonus : 0);
}

int spade_cost(const PlayerState& p) { return 3 - p.dig_level; }

Resources income(const PlayerState& p) {
  const auto& fb = faction_board(p.faction);
  Resources r;
  r.workers = fb.base_workers + fb.dwelling_workers[p.built(Building::Dwelling)];
  r.coins = fb.trading_post_coins[p.built(Building::TradingPost)];
  r.power = fb.trading_post_power[p.built(Building::TradingPost)] + fb.temple_power[p.built(Building::Temple)] +
            fb.stronghold_power * p.built(Building::Stronghold);
  r.priests = fb.temple_priests[p.built(Building::Temple)] + fb.sanctuary_priests * p.built(Building::Sanctuary);
  if (p.bonus_card >= 0) r = r + kBonusCards[p.bonus_card].income;
  for (int f = 0; f < kNumFavorTiles; ++f) {
    if (p.has_favor(f)) r = r + kFavorTiles[f].income;
  }
  return r;
}

bool can_afford(const PlayerState& p, const Resources& cost) { return plan_payment(p, cost).feasible; }

void pay(PlayerState& p, const Resources& cost) {
  const PaymentPlan plan = plan_payment(p, cost);
  if (!plan.feasible) throw RuleError("cannot afford cost");
  const int priests_from_power = std::max(0, cost.priests - p.priests);
  const int workers_short = std::max(0, cost.workers - p.workers);
  const int coins_short = std::max(0, cost.coins - p.coins);
  p.bowls[1] -= 2 * plan.burn;
  p.bowls[2] += plan.burn;
  p.bowls[2] -= plan.power_spent;
  p.bowls[0] += plan.power_spent;
  p.priests += priests_from_power - cost.priests - plan.priests_for_workers - plan.priests_for_coins;
  p.workers += workers_short - cost.workers - plan.workers_for_coins;
  p.coins += coins_short - cost.coins;
}

void gain_power(PlayerState& p, int amount) {
  const int first = std::min(amount, p.bowls[0]);
  p.bowls[0] -= first;
  p.bowls[1] += first;
  amount -= first;
  const int second = std::min(amount, p.bowls[1]);
  p.bowls[1] -= second;
  p.bowls[2] += second;
}

HexSet reachable_hexes(const GameState& s, int player) {
  const auto& t = topo();
  const int range = effective_shipping(s.players[player]);
  const auto own = buildings_of(s, player);
  HexSet out;
  for (HexId h : t.land_hexes()) {
    if (s.hexes[h].building != Building::None) continue;
    for (HexId b : own) {
      if (t.adjacent(b, h) || t.ship_distance(b, h) <= range || bridge_connects(s, player, b, h)) {
        out.set(h);
        break;
      }
    }
  }
  return out;
}

int largest_network(const GameState& s, int player) {
  const auto& t = topo();
  const auto own = buildings_of(s, player);
  const int range = s.players[player].shipping;
  std::vector<bool> seen(own.size(), false);
  int best = 0;
  for (std::size_t i = 0; i < own.size(); ++i) {
    if (seen[i]) continue;
    std::vector<std::size_t> stack{i};
    seen[i] = true;
    int size = 0;
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      ++size;
      for (std::size_t j = 0; j < own.size(); ++j) {
        if (seen[j]) continue;
        const HexId a = own[k];
        const HexId b = own[j];
        if (t.adjacent(a, b) || t.ship_distance(a, b) <= range || bridge_connects(s, player, a, b)) {
          seen[j] = true;
          stack.push_back(j);
        }
      }
    }
    best = std::max(best, size);
  }
  return best;
}

namespace {

void validate_config(const GameConfig& c) {
  if (c.factions[0] == c.factions[1]) throw ConfigError("players need distinct factions");
  if (c.max_plies <= 0) throw ConfigError("max_plies must be positive");
  if (!c.scoring_tiles.empty()) {
    if (c.scoring_tiles.size() != kNumRounds) throw ConfigError("exactly 6 scoring tiles are required");
    std::array<bool, kNumScoringTiles> used{};
    for (std::size_t r = 0; r < c.scoring_tiles.size(); ++r) {
      const int t = c.scoring_tiles[r];
      if (t < 0 || t >= kNumScoringTiles || used[t]) throw ConfigError("scoring tiles must be distinct ids in [0,8)");
      used[t] = true;
      if (t == kSpadeScoringTile && r >= 4) throw ConfigError("the spade scoring tile cannot be used in rounds 5-6");
    }
  }
  if (!c.bonus_cards.empty()) {
    if (c.bonus_cards.size() != kNumBonusInPlay) throw ConfigError("exactly 5 bonus cards are required");
    std::array<bool, kNumBonusCards> used{};
    for (int b : c.bonus_cards) {
      if (b < 0 || b >= kNumBonusCards || used[b]) throw ConfigError("bonus cards must be distinct ids in [0,9)");
      used[b] = true;
    }
  }
}

template <std::size_t N>
void shuffle_ids(std::array<int, N>& ids, std::mt19937_64& rng) {
  for (std::size_t i = N - 1; i > 0; --i) {
    const std::size_t j = rng() % (i + 1);
    std::swap(ids[i], ids[j]);
  }
}

}  // namespace

GameState new_game(const GameConfig& config) {
  validate_config(config);
  std::mt19937_64 rng(config.seed);
  GameState s;

  if (config.scoring_tiles.empty()) {
    std::array<int, kNumScoringTiles> ids{0, 1, 2, 3, 4, 5, 6, 7};
    do {
      shuffle_ids(ids, rng);
    } while (ids[4] == kSpadeScoringTile || ids[5] == kSpadeScoringTile);
    std::copy_n(ids.begin(), kNumRounds, s.scoring_tiles.begin());
  } else {
    std::copy(config.scoring_tiles.begin(), config.scoring_tiles.end(), s.scoring_tiles.begin());
  }

  std::vector<int> bonus = config.bonus_cards;
  if (bonus.empty()) {
    std::array<int, kNumBonusCards> ids{0, 1, 2, 3, 4, 5, 6, 7, 8};
    shuffle_ids(ids, rng);
    bonus.assign(ids.begin(), ids.begin() + kNumBonusInPlay);
  }
  for (int b : bonus) s.bonus_in_play = static_cast<std::uint16_t>(s.bonus_in_play | (1U << b));

  const auto& t = BoardTopology::instance();
  for (HexId h = 0; h < kNumHexes; ++h) s.hexes[h].terrain = t.initial_terrain(h);
  s.bridges.fill(-1);
  if (t.bridge_sites().size() > kMaxBridgeSites) throw ConfigError("bridge site table too small");

  for (int p = 0; p < kNumPlayers; ++p) {
    const auto& fb = faction_board(config.factions[p]);
    PlayerState& ps = s.players[p];
    ps.faction = fb.faction;
    ps.workers = fb.start.workers;
    ps.priests = fb.start.priests;
    ps.coins = fb.start.coins;
    ps.bowls = fb.start_bowls;
    ps.cult = fb.start_cult;
    ps.vp = kStartingVp;
  }
  for (int f = 0; f < kNumFavorTiles; ++f) s.favor_supply[f] = kFavorTiles[f].copies;
  for (int k = 0; k < kNumTownTiles; ++k) s.town_supply[k] = kTownTiles[k].copies;
  s.cult_three_slot.fill(-1);
  s.max_plies = config.max_plies;
  s.phase = Phase::Setup;
  s.to_move = setup_player(0);
  return s;
}

std::vector<Action> legal_actions(const GameState& s) {
  std::vector<Action> out;
  if (s.phase == Phase::End) return out;
  Checker check(s);
  auto consider = [&](const Action& a) {
    if (!check(a)) out.push_back(a);
  };

  if (s.pending_towns > 0) {
    for (int k = 0; k < kNumTownTiles; ++k) consider(TownTileChoice{k});
    return out;
  }

  const auto& land = BoardTopology::instance().land_hexes();
  const bool placing = s.phase == Phase::Setup && s.setup_step < 4;
  const bool picking = s.phase == Phase::Setup && s.setup_step >= 4;
  const bool spades = s.pending_spades.count > 0;

  if (placing || spades || s.phase == Phase::Actions) {
    const HexSet* reach = placing ? nullptr : &check.reach();
    for (HexId h : land) {
      if (s.hexes[h].building != Building::None) continue;
      if (reach && !(*reach)[h]) continue;
      for (int t = 0; t < kNumLandTerrains; ++t) {
        consider(TerraformBuild{h, static_cast<Terrain>(t), false});
        consider(TerraformBuild{h, static_cast<Terrain>(t), true});
      }
    }
  }
  if (picking) {
    for (int b = 0; b < kNumBonusCards; ++b) consider(Pass{b});
  }
  if (s.phase != Phase::Actions || spades) return out;

  consider(AdvanceShipping{});
  consider(AdvanceSpade{});
  for (HexId h = 0; h < kNumHexes; ++h) {
    if (s.hexes[h].owner != s.to_move) continue;
    for (int k = 0; k < kNumUpgradeKinds; ++k) consider(Upgrade{h, static_cast<UpgradeKind>(k)});
  }
  for (int c = 0; c < kNumCults; ++c) {
    for (int steps = 3; steps >= 1; --steps) consider(SendPriest{static_cast<Cult>(c), steps});
  }
  for (int k = 0; k < kNumPowerActions; ++k) consider(PowerAction{k});
  for (int k = 0; k < kNumSpecialActions; ++k) consider(SpecialAction{k});
  for (int b = 0; b < kNumBonusCards; ++b) consider(Pass{b});
  return out;
}

std::optional<std::string> check_action(const GameState& state, const Action& a) {
  Checker check(state);
  return check(a);
}

GameState apply_action(const GameState& state, const Action& a) {
  if (auto violation = check_action(state, a)) throw RuleError(*violation);
  GameState next = state;
  Mutator(next).apply(a);
  return next;
}

bool is_terminal(const GameState& state) { return state.phase == Phase::End; }

std::pair<int, int> final_scores(const GameState& state) {
  if (!is_terminal(state)) throw RuleError("final scores requested before the game ended");
  return {state.players[0].vp, state.players[1].vp};
}

int outcome(const GameState& state, int player) {
  const auto [a, b] = final_scores(state);
  const int mine = player == 0 ? a : b;
  const int theirs = player == 0 ? b : a;
  return (mine > theirs) - (mine < theirs);
}

}  // namespace terra
