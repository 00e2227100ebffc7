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

#ifndef FTQL_GAME_HPP_
#define FTQL_GAME_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ftql/quantize.hpp"
#include "json.hpp"

namespace ftql {

// One action index per player.
using PureProfile = std::vector<int>;
// One probability vector per player.
using MixedProfile = std::vector<std::vector<double>>;

// p is a probability vector: entries >= -tol, sum within tol of 1.
bool in_simplex(const std::vector<double>& p, double tol = 1e-9);

// Finite normal-form game with dense payoff tensors, one per player.
//
// JSON format:
//   {"actions": [["a1","a2"], ["b1","b2"]],
//    "payoffs": [[[5.1,2.4],[2.4,5.1]], [[5.1,2.4],[2.4,5.1]]]}
// payoffs[i] is nested by action index of player 1, then player 2, ... so
// payoffs[i][j][k] is player i's payoff when player 1 plays j and player 2
// plays k.
class Game {
 public:
  Game(std::vector<std::vector<std::string>> actions,
       std::vector<std::vector<double>> payoffs);

  static Game from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  int num_players() const { return static_cast<int>(actions_.size()); }
  int num_actions(int player) const;
  const std::vector<std::string>& action_labels(int player) const;
  std::int64_t num_profiles() const;

  double payoff(int player, const PureProfile& a) const;

  // Expected payoff of `player` under the mixed profile x.
  double mixed_payoff(const MixedProfile& x, int player) const;

  // v_i(x): expected payoff of each of player i's actions against the
  // opponents' mixed strategies (player i's own component of x is ignored).
  std::vector<double> payoff_vector(const MixedProfile& x, int player) const;

  bool is_strict_nash(const PureProfile& a) const;
  // All strict Nash equilibria in lexicographic profile order.
  std::vector<PureProfile> enumerate_strict_nash() const;

  // Smallest unilateral-deviation payoff loss at a strict equilibrium.
  double min_payoff_gap(const PureProfile& eq) const;

  // The game with every payoff entry quantized.
  Game quantized(const QuantizationScheme& q) const;

  void check_profile(const PureProfile& a) const;
  void check_mixed_profile(const MixedProfile& x, double tol = 1e-9) const;

  // "a1|b2" style label for CSV/JSON output.
  std::string profile_label(const PureProfile& a) const;

 private:
  std::int64_t flat_index(const PureProfile& a) const;

  std::vector<std::vector<std::string>> actions_;
  std::vector<std::vector<double>> payoffs_;  // [player][flat profile index]
  std::vector<std::int64_t> strides_;         // last player varies fastest
};

}  // namespace ftql

#endif  // FTQL_GAME_HPP_
