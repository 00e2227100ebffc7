// Copyright 2026 The FTQL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ftql/game.hpp"
#include "ftql/quantize.hpp"
#include "ftql/rng.hpp"
#include "json.hpp"
#include "test_util.hpp"

using ftql::Game;
using ftql::MixedProfile;
using ftql::PureProfile;
using nlohmann::json;

TEST_CASE("payoff lookup matches the declared tensors") {
  Game g = testutil::coordination_game();
  CHECK(g.num_players() == 2);
  CHECK(g.num_actions(0) == 2);
  CHECK(g.num_profiles() == 4);
  CHECK(g.payoff(0, {0, 0}) == 5.1);
  CHECK(g.payoff(0, {0, 1}) == 2.4);
  CHECK(g.payoff(1, {1, 0}) == 2.4);
  CHECK(g.payoff(1, {1, 1}) == 5.1);
  CHECK(g.action_labels(1)[1] == "b2");
  CHECK(g.profile_label({0, 1}) == "a1|b2");
}

TEST_CASE("constructor rejects malformed games") {
  CHECK_THROWS_AS(Game({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(Game({{"a"}, {}}, {{0.0}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(Game({{"a", "b"}}, {{1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Game({{"a,b", "c"}}, {{1.0, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Game({{"a", "b"}}, {{1.0, std::nan("")}}),
                  std::invalid_argument);
}

TEST_CASE("json round trip preserves the game") {
  json j;
  j["actions"] = json::array(
      {json::array({"a1", "a2"}), json::array({"b1", "b2"})});
  j["payoffs"] = {{{5.1, 2.4}, {2.4, 5.1}}, {{5.1, 2.4}, {2.4, 5.1}}};
  Game g = Game::from_json(j);
  CHECK(g.to_json() == j);
  CHECK(g.payoff(0, {1, 0}) == 2.4);
}

TEST_CASE("json parsing rejects unknown keys and ragged tensors") {
  json base;
  base["actions"] = json::array(
      {json::array({"a1", "a2"}), json::array({"b1", "b2"})});
  base["payoffs"] = {{{5.1, 2.4}, {2.4, 5.1}}, {{5.1, 2.4}, {2.4, 5.1}}};
  json extra = base;
  extra["comment"] = "hello";
  CHECK_THROWS_AS(Game::from_json(extra), std::invalid_argument);

  json ragged = base;
  ragged["payoffs"][0][1] = {2.4};  // second row truncated
  CHECK_THROWS_AS(Game::from_json(ragged), std::invalid_argument);

  json missing = {{"actions", {{"a1", "a2"}, {"b1", "b2"}}}};
  CHECK_THROWS_AS(Game::from_json(missing), std::invalid_argument);
}

TEST_CASE("three player json nests player-major") {
  json j;
  j["actions"] = json::array({json::array({"a1", "a2"}),
                              json::array({"b1", "b2"}),
                              json::array({"c1", "c2"})});
  j["payoffs"] = json::array();
  // payoff(i, (a,b,c)) = 100*i + 4a + 2b + c, nested [a][b][c] per player
  for (int i = 0; i < 3; ++i) {
    json per_player = json::array();
    for (int a = 0; a < 2; ++a) {
      json rows = json::array();
      for (int b = 0; b < 2; ++b) {
        json row = json::array();
        for (int c = 0; c < 2; ++c) row.push_back(100 * i + 4 * a + 2 * b + c);
        rows.push_back(row);
      }
      per_player.push_back(rows);
    }
    j["payoffs"].push_back(per_player);
  }
  Game g = Game::from_json(j);
  CHECK(g.payoff(0, {1, 0, 1}) == 5.0);
  CHECK(g.payoff(2, {0, 1, 1}) == 203.0);
  CHECK(g.to_json() == j);
}

TEST_CASE("mixed payoff agrees with an independent enumeration") {
  ftql::Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Game g = testutil::random_game({2, 3, 2}, rng);
    MixedProfile x = {testutil::random_simplex_point(2, rng),
                      testutil::random_simplex_point(3, rng),
                      testutil::random_simplex_point(2, rng)};
    for (int i = 0; i < 3; ++i) {
      double expected = 0.0;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 3; ++b) {
          for (int c = 0; c < 2; ++c) {
            expected +=
                x[0][a] * x[1][b] * x[2][c] * g.payoff(i, {a, b, c});
          }
        }
      }
      CHECK(g.mixed_payoff(x, i) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("payoff vector rows contract against the mixed payoff") {
  ftql::Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    Game g = testutil::random_game({3, 2}, rng);
    MixedProfile x = {testutil::random_simplex_point(3, rng),
                      testutil::random_simplex_point(2, rng)};
    for (int i = 0; i < 2; ++i) {
      std::vector<double> v = g.payoff_vector(x, i);
      double dot = 0.0;
      for (std::size_t a = 0; a < v.size(); ++a) dot += x[i][a] * v[a];
      CHECK(dot == doctest::Approx(g.mixed_payoff(x, i)).epsilon(1e-12));
    }
  }
}

TEST_CASE("payoff vector at a pure profile picks tensor entries exactly") {
  Game g = testutil::coordination_game();
  MixedProfile x = {{1.0, 0.0}, {0.0, 1.0}};  // (a1, b2)
  std::vector<double> v0 = g.payoff_vector(x, 0);
  CHECK(v0[0] == 2.4);  // u1(a1, b2)
  CHECK(v0[1] == 5.1);  // u1(a2, b2)
  std::vector<double> v1 = g.payoff_vector(x, 1);
  CHECK(v1[0] == 5.1);  // u2(a1, b1)
  CHECK(v1[1] == 2.4);  // u2(a1, b2)
}

namespace {

// Brute-force oracle: a profile is a strict equilibrium iff every unilateral
// deviation strictly lowers the deviator's payoff.
bool oracle_strict_nash(const Game& g, const PureProfile& profile) {
  for (int i = 0; i < g.num_players(); ++i) {
    for (int alt = 0; alt < g.num_actions(i); ++alt) {
      if (alt == profile[i]) continue;
      PureProfile dev = profile;
      dev[i] = alt;
      if (g.payoff(i, dev) >= g.payoff(i, profile)) return false;
    }
  }
  return true;
}

std::vector<PureProfile> oracle_enumerate(const Game& g) {
  std::vector<PureProfile> found;
  PureProfile p(g.num_players(), 0);
  while (true) {
    if (oracle_strict_nash(g, p)) found.push_back(p);
    int i = g.num_players() - 1;
    while (i >= 0) {
      if (++p[i] < g.num_actions(i)) break;
      p[i] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return found;
}

}  // namespace

TEST_CASE("strict equilibria of the canned games") {
  Game coord = testutil::coordination_game();
  std::vector<PureProfile> diag = {{0, 0}, {1, 1}};
  CHECK(coord.enumerate_strict_nash() == diag);

  Game anti = testutil::anti_coordination_game();
  std::vector<PureProfile> off = {{0, 1}, {1, 0}};
  CHECK(anti.enumerate_strict_nash() == off);
  CHECK(anti.is_strict_nash({0, 1}));
  CHECK_FALSE(anti.is_strict_nash({0, 0}));
}

TEST_CASE("strict equilibrium enumeration matches the oracle on random games") {
  ftql::Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    Game g = testutil::random_game({2, 2}, rng);
    CHECK(g.enumerate_strict_nash() == oracle_enumerate(g));
  }
  for (int trial = 0; trial < 100; ++trial) {
    Game g = testutil::random_game({3, 3}, rng);
    CHECK(g.enumerate_strict_nash() == oracle_enumerate(g));
  }
  for (int trial = 0; trial < 50; ++trial) {
    Game g = testutil::random_game({2, 3, 2}, rng);
    CHECK(g.enumerate_strict_nash() == oracle_enumerate(g));
  }
}

TEST_CASE("minimum payoff gap of the canned games") {
  Game coord = testutil::coordination_game();
  CHECK(coord.min_payoff_gap({0, 0}) == doctest::Approx(2.7).epsilon(1e-12));
  Game anti = testutil::anti_coordination_game();
  CHECK(anti.min_payoff_gap({0, 1}) == doctest::Approx(1.8).epsilon(1e-12));
}

TEST_CASE("minimum payoff gap rejects non-equilibria") {
  Game anti = testutil::anti_coordination_game();
  CHECK_THROWS_AS(anti.min_payoff_gap({0, 0}), std::invalid_argument);
  // the message names the profitable deviation
  try {
    anti.min_payoff_gap({0, 0});
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("player") != std::string::npos);
  }
}

TEST_CASE("quantizing a game maps every tensor entry") {
  Game g = testutil::small_stakes_game();
  ftql::QuantizationScheme q(ftql::RoundingRule::kHalfAway, 1.0);
  Game quantized = g.quantized(q);
  CHECK(quantized.payoff(0, {0, 0}) == 0.0);
  CHECK(quantized.payoff(0, {0, 1}) == 1.0);
  CHECK(quantized.payoff(1, {1, 0}) == 1.0);
  CHECK(quantized.payoff(1, {1, 1}) == 0.0);
  CHECK(quantized.min_payoff_gap({0, 1}) == 1.0);
  // labels survive the transform
  CHECK(quantized.action_labels(0) == g.action_labels(0));
}

TEST_CASE("simplex membership tolerance") {
  CHECK(ftql::in_simplex({0.5, 0.5}));
  CHECK(ftql::in_simplex({1.0, 0.0}));
  CHECK(ftql::in_simplex({0.5 + 1e-12, 0.5}));
  CHECK_FALSE(ftql::in_simplex({0.6, 0.6}));
  CHECK_FALSE(ftql::in_simplex({-0.1, 1.1}));
  CHECK_FALSE(ftql::in_simplex({}));
}

TEST_CASE("profile validation") {
  Game g = testutil::coordination_game();
  CHECK_THROWS_AS(g.payoff(0, {0}), std::invalid_argument);
  CHECK_THROWS_AS(g.payoff(0, {0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(g.payoff(2, {0, 0}), std::out_of_range);
  MixedProfile bad = {{0.5, 0.5}, {0.7, 0.7}};
  CHECK_THROWS_AS(g.mixed_payoff(bad, 0), std::invalid_argument);
}
