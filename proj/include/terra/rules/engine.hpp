#pragma once

// Two-player Terra Mystica rules (Engineers vs Halflings, base game).
//
// Deviations from the printed rules:
//  - no leech: building next to an opponent never offers them power;
//  - favor tiles, the cult track of a cult-step action and bridge sites are
//    chosen automatically (lowest available id / lowest track / lowest site),
//    since the action space has no slot for those choices;
//  - free spades (power actions, bonus card, Halflings stronghold, round-end
//    cult rewards) are a pending decision resolved with TerraformBuild actions.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "terra/rules/action.hpp"
#include "terra/rules/catalog.hpp"
#include "terra/rules/game_state.hpp"

namespace terra {

GameState new_game(const GameConfig& config);

std::vector<Action> legal_actions(const GameState& state);

/// Rule violated by `a` in `state`, or nullopt when the action is legal.
std::optional<std::string> check_action(const GameState& state, const Action& a);

/// Successor state. Throws RuleError (input untouched) for illegal actions.
GameState apply_action(const GameState& state, const Action& a);

bool is_terminal(const GameState& state);

/// Final VP including area, cult and resource scoring. Throws for non-terminal states.
std::pair<int, int> final_scores(const GameState& state);

/// +1 win, 0 tie, -1 loss for `player`. Throws for non-terminal states.
int outcome(const GameState& state, int player);

// Helpers shared with the encoder, the server and tests.

/// Hexes reachable for building by `player`: adjacency, own bridges, shipping.
HexSet reachable_hexes(const GameState& state, int player);

/// Effective shipping range including a held shipping bonus card.
int effective_shipping(const PlayerState& p);

/// Workers per spade at the player's dig level.
int spade_cost(const PlayerState& p);

/// Next-round income from buildings, bonus card and favor tiles.
Resources income(const PlayerState& p);

bool can_afford(const PlayerState& p, const Resources& cost);

/// Debit `cost`, converting power (with burning), priests and workers as needed.
void pay(PlayerState& p, const Resources& cost);

/// Move `amount` power tokens forward through the bowls.
void gain_power(PlayerState& p, int amount);

/// Largest connected building group for area scoring.
int largest_network(const GameState& state, int player);

}  // namespace terra
