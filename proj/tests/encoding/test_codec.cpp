#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "support/playout.hpp"
#include "support/reference_game.hpp"
#include "terra/encoding/codec.hpp"
#include "terra/encoding/record.hpp"

using namespace terra;
using namespace terra::encoding;
using namespace terra::testing;

namespace {

bool all_equal(std::span<const double> layer, double v) {
  return std::all_of(layer.begin(), layer.end(), [v](double x) { return x == v; });
}

}  // namespace

TEST_CASE("layout fields are contiguous and cover 206 layers") {
  int next = 0;
  for (const auto& f : layer_fields()) {
    CAPTURE(f.name);
    CHECK(f.offset == next);
    CHECK(f.width > 0);
    CHECK(f.scale > 0.0);
    next = f.offset + f.width;
  }
  CHECK(next == kNumLayers);
  CHECK(kNumLayers == 48 * 2 + 110);

  const auto doc = nlohmann::json::parse(layout_manifest());
  CHECK(doc["shape"] == nlohmann::json::array({9, 26, 206}));
  CHECK(doc["fields"].size() == layer_fields().size());
  CHECK(layout_hash() == layout_hash());
}

TEST_CASE("action index blocks") {
  CHECK(kNumActions == 9 * 13 * 18 + 4 * 3 + 25);
  CHECK(action_to_index(Pass{0}) == 2129);
  CHECK(action_to_index(AdvanceShipping{}) == 2118);
  CHECK(action_to_index(AdvanceSpade{}) == 2119);
  CHECK(action_to_index(PowerAction{0}) == 2120);
  CHECK(action_to_index(SpecialAction{0}) == 2126);
  CHECK(action_to_index(TownTileChoice{0}) == 2138);
  CHECK(action_to_index(SendPriest{Cult::Fire, 3}) == 2106);
  CHECK(index_to_action(0) == Action{TerraformBuild{hex_id(0, 0), Terrain::Plain, false}});
  CHECK(index_to_action(2142) == Action{TownTileChoice{4}});
  CHECK(index_to_action(7) == Action{TerraformBuild{0, Terrain::Plain, true}});
  CHECK(index_to_action(14) == Action{Upgrade{0, UpgradeKind::DwellingToTradingPost}});
  CHECK(index_to_action(18) == Action{TerraformBuild{1, Terrain::Plain, false}});
  CHECK_THROWS_AS(index_to_action(-1), std::out_of_range);
  CHECK_THROWS_AS(index_to_action(2143), std::out_of_range);
}

TEST_CASE("codec round-trips every index") {
  for (int i = 0; i < kNumActions; ++i) {
    CAPTURE(i);
    REQUIRE(action_to_index(index_to_action(i)) == i);
  }
  std::mt19937_64 rng(3);
  for (int k = 0; k < 1000; ++k) {
    const int i = static_cast<int>(rng() % kNumActions);
    CHECK(action_to_index(index_to_action(i)) == i);
  }
}

TEST_CASE("encoded states have the documented shape and range") {
  const auto states = sample_states(5, 2, 900);
  const StateTensor first = encode_state(states.front());
  CHECK(first.data().size() == static_cast<std::size_t>(9 * 26 * 206));
  for (const GameState& s : states) {
    const StateTensor t = encode_state(s);
    for (double v : t.data()) REQUIRE((v >= 0.0 && v <= 1.0));
    for (const auto& f : layer_fields()) {
      if (!f.binary) continue;
      for (int l = f.offset; l < f.offset + f.width; ++l) {
        for (double v : t.layer(l)) REQUIRE((v == 0.0 || v == 1.0));
      }
    }
    CHECK(std::equal(t.layer(kWaterLayer).begin(), t.layer(kWaterLayer).end(), first.layer(kWaterLayer).begin()));
  }
}

TEST_CASE("doubled columns and river padding") {
  const GameState s = new_game(GameConfig{});
  const StateTensor t = encode_state(s);
  for (int r = 0; r < 9; ++r) {
    if (r % 2 == 1) {
      CHECK(t.at(kWaterLayer, r, 0) == 1.0);
      CHECK(t.at(kWaterLayer, r, 25) == 1.0);
    }
    for (int c = 0; c < 13; ++c) {
      if (!on_map(hex_id(r, c))) continue;
      const auto [a, b] = doubled_columns(r, c);
      CHECK(b == a + 1);
      for (int l = 0; l < kNumLayers; ++l) REQUIRE(t.at(l, r, a) == t.at(l, r, b));
    }
  }
  // Every cell carries exactly one terrain.
  for (int r = 0; r < 9; ++r) {
    for (int c = 0; c < 26; ++c) {
      double sum = 0;
      for (int l = 0; l < 8; ++l) sum += t.at(l, r, c);
      CHECK(sum == 1.0);
    }
  }
}

TEST_CASE("faction block marks the player to move") {
  GameState s = new_game(reference_config());
  REQUIRE(s.players[s.to_move].faction == Faction::Halflings);
  StateTensor t = encode_state(s);
  int ones = 0;
  int zeros = 0;
  for (int l = kFactionOffset; l < kFactionOffset + kNumFactionLayers; ++l) {
    ones += all_equal(t.layer(l), 1.0);
    zeros += all_equal(t.layer(l), 0.0);
  }
  CHECK(ones == 1);
  CHECK(zeros == 13);
  CHECK(all_equal(t.layer(kFactionOffset + kHalflingsFactionLayer), 1.0));

  s = apply_action(s, reference_setup()[0]);
  t = encode_state(s);
  CHECK(all_equal(t.layer(kFactionOffset + kEngineersFactionLayer), 1.0));
}

TEST_CASE("player blocks carry resources and structures") {
  GameState s = new_game(reference_config());
  for (const Action& a : reference_actions()) {
    if (s.players[1].bridges_placed > 0) break;
    s = apply_action(s, a);
  }
  const StateTensor t = encode_state(s);
  const int p0 = kPlayerOffset;
  const int p1 = kPlayerOffset + kPlayerBlockSize;
  CHECK(t.at(p0 + kPWorkers, 0, 0) == doctest::Approx(s.players[0].workers / 30.0));
  CHECK(t.at(p0 + kPCoins, 4, 7) == doctest::Approx(s.players[0].coins / 30.0));
  CHECK(t.at(p1 + kPBridgesLeft, 0, 0) == doctest::Approx(2.0 / 3.0));
  const auto [c0, c1] = doubled_columns(7, 9);  // H10
  CHECK(t.at(p1 + kPBridgeCells, 7, c0) == 1.0);
  CHECK(t.at(p1 + kPBridgeCells, 7, c1) == 1.0);
  CHECK(t.at(p0 + kPBridgeCells, 7, c0) == 0.0);
  CHECK(t.at(kStructureOffset + building_slot(Building::Dwelling), 7, c0) == 1.0);
  CHECK(t.at(p0 + kPBonus + s.players[0].bonus_card, 0, 0) == 1.0);
}

TEST_CASE("past scoring rounds drop out of the tile block") {
  GameState s = new_game(reference_config());
  for (const Action& a : reference_setup()) s = apply_action(s, a);
  const auto rounds = reference_rounds();
  for (const Action& a : rounds[0].actions) s = apply_action(s, a);
  REQUIRE(s.round == 2);
  const StateTensor t = encode_state(s);
  auto slot = [&](int tile, int k) { return all_equal(t.layer(kScoringOffset + tile * kScoringSlotsPerTile + k), 1.0); };
  CHECK_FALSE(slot(2, 0));
  CHECK(slot(2, 6));
  CHECK(slot(3, 1));
  CHECK(slot(7, 5));
  CHECK(all_equal(t.layer(kScoringOffset + 0 * kScoringSlotsPerTile + 6), 0.0));
}

TEST_CASE("legal mask mirrors legal_actions") {
  for (const GameState& s : sample_states(5, 3, 1200)) {
    const ActionMask m = legal_mask(s);
    CHECK(m.count() == legal_actions(s).size());
    for (int i = kNumMainActions; i < kNumActions; ++i) CHECK(m[i] == (s.pending_towns > 0 && s.town_supply[i - kNumMainActions] > 0));
  }
  CHECK(legal_mask(random_playout(2)).none());
}

TEST_CASE("legal mask at a pending town choice") {
  GameState s = new_game(reference_config());
  for (const Action& a : reference_actions()) {
    if (s.pending_towns > 0) break;
    s = apply_action(s, a);
  }
  REQUIRE(s.pending_towns == 1);
  s.town_supply[2] = 0;  // pretend both copies of one tile are gone
  const ActionMask m = legal_mask(s);
  CHECK(m.count() == 4);
  for (int k = 0; k < 5; ++k) CHECK(m[kTownIndex + k] == (k != 2));
}

TEST_CASE("mask_and_renormalize") {
  std::vector<double> main(kNumMainActions, 1.0);
  std::vector<double> town(kNumTownActions, 1.0);

  SUBCASE("single legal action") {
    ActionMask m;
    m.set(kPassIndex + 3);
    const auto out = mask_and_renormalize(main, town, m);
    CHECK(out.main[kPassIndex + 3] == 1.0);
    CHECK(std::accumulate(out.main.begin(), out.main.end(), 0.0) == 1.0);
  }
  SUBCASE("uniform over k legal") {
    ActionMask m;
    for (int i : {5, 70, 2118, 2137}) m.set(i);
    const auto out = mask_and_renormalize(main, town, m);
    for (int i : {5, 70, 2118, 2137}) CHECK(out.main[i] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(out.main[6] == 0.0);
  }
  SUBCASE("zero mass falls back to uniform") {
    ActionMask m;
    m.set(1);
    m.set(2);
    main[1] = 0.0;
    main[2] = 0.0;
    main[3] = 5.0;
    const auto out = mask_and_renormalize(main, town, m);
    CHECK(out.main[1] == 0.5);
    CHECK(out.main[2] == 0.5);
    CHECK(out.main[3] == 0.0);
  }
  SUBCASE("town head is independent") {
    ActionMask m;
    m.set(kTownIndex + 1);
    m.set(kTownIndex + 4);
    town = {0.0, 3.0, 0.0, 0.0, 1.0};
    const auto out = mask_and_renormalize(main, town, m);
    CHECK(out.town[1] == 0.75);
    CHECK(out.town[4] == 0.25);
    CHECK(std::all_of(out.main.begin(), out.main.end(), [](double x) { return x == 0.0; }));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(mask_and_renormalize(main, town, ActionMask{}), std::invalid_argument);
    std::vector<double> short_main(10, 1.0);
    ActionMask m;
    m.set(0);
    CHECK_THROWS_AS(mask_and_renormalize(short_main, town, m), std::invalid_argument);
  }
}

TEST_CASE("mask_and_renormalize yields distributions on random inputs") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> main(kNumMainActions);
    std::vector<double> town(kNumTownActions);
    const bool degenerate = trial % 4 == 0;
    for (double& x : main) x = degenerate ? 0.0 : u(rng);
    for (double& x : town) x = degenerate ? 0.0 : u(rng);
    ActionMask m;
    const bool town_turn = trial % 5 == 0;
    const int k = 1 + static_cast<int>(rng() % 40);
    for (int j = 0; j < k; ++j) {
      if (town_turn) m.set(kTownIndex + rng() % 5);
      else m.set(rng() % kNumMainActions);
    }
    const auto out = mask_and_renormalize(main, town, m);
    const auto& head = town_turn ? out.town : out.main;
    const double sum = std::accumulate(head.begin(), head.end(), 0.0);
    CHECK(std::abs(sum - 1.0) < 1e-9);
    for (std::size_t i = 0; i < head.size(); ++i) {
      const int idx = static_cast<int>(i) + (town_turn ? kNumMainActions : 0);
      if (!m[idx]) CHECK(head[i] == 0.0);
      CHECK(head[i] >= 0.0);
    }
  }
}

TEST_CASE("game records round-trip and replay") {
  GameRecord r;
  r.config = reference_config();
  r.tags["agent_a"] = "scripted";
  GameState s = new_game(r.config);
  for (const Action& a : reference_actions()) {
    MoveRecord m;
    m.action = action_to_index(a);
    m.player = s.to_move;
    if (r.moves.size() == 3) {
      m.pi = {{m.action, 0.75}, {kPassIndex, 0.25}};
      m.value = -0.5;
    }
    r.moves.push_back(m);
    s = apply_action(s, a);
  }
  r.scores = final_scores(s);
  const std::string line = to_json_line(r);
  CHECK(line.find('\n') == std::string::npos);
  const GameRecord back = parse_record(line);
  CHECK(back == r);
  const GameState end = replay(back);
  CHECK(end == s);
  CHECK(final_scores(end) == std::pair{kReferenceFinalHalflings, kReferenceFinalEngineers});

  CHECK_THROWS_AS(parse_record("{\"moves\": []}"), std::invalid_argument);
  CHECK_THROWS_AS(parse_record("not json"), std::invalid_argument);
}
