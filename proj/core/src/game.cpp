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

#include "ftql/game.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ftql {
namespace {

constexpr std::int64_t kMaxEnumerableProfiles = 10'000'000;

// Depth-first flatten of the nested payoff array for one player; validates
// that the nesting is rectangular and matches the action counts.
void flatten_payoffs(const nlohmann::json& node, const std::vector<int>& dims,
                     std::size_t depth, std::vector<double>* out) {
  if (depth == dims.size()) {
    if (!node.is_number()) {
      throw std::invalid_argument("game payoffs: expected a number at depth " +
                                  std::to_string(depth));
    }
    out->push_back(node.get<double>());
    return;
  }
  if (!node.is_array() ||
      node.size() != static_cast<std::size_t>(dims[depth])) {
    throw std::invalid_argument(
        "game payoffs: expected an array of length " +
        std::to_string(dims[depth]) + " at depth " + std::to_string(depth));
  }
  for (const auto& child : node) {
    flatten_payoffs(child, dims, depth + 1, out);
  }
}

nlohmann::json nest_payoffs(const std::vector<double>& flat,
                            const std::vector<int>& dims, std::size_t depth,
                            std::int64_t offset, std::int64_t stride) {
  nlohmann::json arr = nlohmann::json::array();
  if (depth + 1 == dims.size()) {
    for (int k = 0; k < dims[depth]; ++k) arr.push_back(flat[offset + k]);
    return arr;
  }
  std::int64_t child_stride = stride / dims[depth];
  for (int k = 0; k < dims[depth]; ++k) {
    arr.push_back(nest_payoffs(flat, dims, depth + 1,
                               offset + k * child_stride, child_stride));
  }
  return arr;
}

// Advances a profile odometer-style (last player fastest); returns false
// once every profile has been visited.
bool next_profile(PureProfile* a, const std::vector<int>& dims) {
  for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
    if (++(*a)[i] < dims[i]) return true;
    (*a)[i] = 0;
  }
  return false;
}

}  // namespace

bool in_simplex(const std::vector<double>& p, double tol) {
  if (p.empty()) return false;
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < -tol) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

Game::Game(std::vector<std::vector<std::string>> actions,
           std::vector<std::vector<double>> payoffs)
    : actions_(std::move(actions)), payoffs_(std::move(payoffs)) {
  if (actions_.empty()) {
    throw std::invalid_argument("game: needs at least one player");
  }
  if (payoffs_.size() != actions_.size()) {
    throw std::invalid_argument("game: one payoff tensor per player required");
  }
  std::int64_t total = 1;
  for (const auto& labels : actions_) {
    if (labels.empty()) {
      throw std::invalid_argument("game: every player needs >= 1 action");
    }
    for (const std::string& label : labels) {
      // labels end up in CSV fields and joined profile names
      if (label.empty() || label.find(',') != std::string::npos ||
          label.find('|') != std::string::npos) {
        throw std::invalid_argument(
            "game: action labels must be non-empty and free of ',' and '|'");
      }
    }
    if (total > kMaxEnumerableProfiles / static_cast<std::int64_t>(labels.size())) {
      throw std::invalid_argument("game: profile space too large");
    }
    total *= static_cast<std::int64_t>(labels.size());
  }
  strides_.assign(actions_.size(), 1);
  for (int i = static_cast<int>(actions_.size()) - 2; i >= 0; --i) {
    strides_[i] = strides_[i + 1] *
                  static_cast<std::int64_t>(actions_[i + 1].size());
  }
  for (const auto& tensor : payoffs_) {
    if (static_cast<std::int64_t>(tensor.size()) != total) {
      throw std::invalid_argument("game: payoff tensor size mismatch");
    }
    for (double u : tensor) {
      if (!std::isfinite(u)) {
        throw std::invalid_argument("game: payoffs must be finite");
      }
    }
  }
}

Game Game::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("actions") || !j.contains("payoffs")) {
    throw std::invalid_argument(
        "game: expected an object with \"actions\" and \"payoffs\"");
  }
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "actions" && key != "payoffs") {
      throw std::invalid_argument("game: unknown key \"" + key + "\"");
    }
  }
  std::vector<std::vector<std::string>> actions;
  for (const auto& player_actions : j.at("actions")) {
    std::vector<std::string> labels;
    for (const auto& label : player_actions) {
      if (!label.is_string()) {
        throw std::invalid_argument("game: action labels must be strings");
      }
      labels.push_back(label.get<std::string>());
    }
    actions.push_back(std::move(labels));
  }
  std::vector<int> dims;
  dims.reserve(actions.size());
  for (const auto& labels : actions) dims.push_back(static_cast<int>(labels.size()));

  const auto& payoffs_json = j.at("payoffs");
  if (!payoffs_json.is_array() || payoffs_json.size() != actions.size()) {
    throw std::invalid_argument("game: payoffs must list one tensor per player");
  }
  std::vector<std::vector<double>> payoffs;
  for (const auto& tensor : payoffs_json) {
    std::vector<double> flat;
    flatten_payoffs(tensor, dims, 0, &flat);
    payoffs.push_back(std::move(flat));
  }
  return Game(std::move(actions), std::move(payoffs));
}

nlohmann::json Game::to_json() const {
  std::vector<int> dims;
  for (const auto& labels : actions_) dims.push_back(static_cast<int>(labels.size()));
  nlohmann::json j;
  j["actions"] = actions_;
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& flat : payoffs_) {
    tensors.push_back(nest_payoffs(flat, dims, 0, 0,
                                   static_cast<std::int64_t>(flat.size())));
  }
  j["payoffs"] = std::move(tensors);
  return j;
}

int Game::num_actions(int player) const {
  if (player < 0 || player >= num_players()) {
    throw std::out_of_range("game: player index out of range");
  }
  return static_cast<int>(actions_[player].size());
}

const std::vector<std::string>& Game::action_labels(int player) const {
  if (player < 0 || player >= num_players()) {
    throw std::out_of_range("game: player index out of range");
  }
  return actions_[player];
}

std::int64_t Game::num_profiles() const {
  return static_cast<std::int64_t>(payoffs_[0].size());
}

void Game::check_profile(const PureProfile& a) const {
  if (static_cast<int>(a.size()) != num_players()) {
    throw std::invalid_argument("profile: wrong number of players");
  }
  for (int i = 0; i < num_players(); ++i) {
    if (a[i] < 0 || a[i] >= num_actions(i)) {
      throw std::invalid_argument("profile: action index out of range for player " +
                                  std::to_string(i + 1));
    }
  }
}

void Game::check_mixed_profile(const MixedProfile& x, double tol) const {
  if (static_cast<int>(x.size()) != num_players()) {
    throw std::invalid_argument("mixed profile: wrong number of players");
  }
  for (int i = 0; i < num_players(); ++i) {
    if (static_cast<int>(x[i].size()) != num_actions(i)) {
      throw std::invalid_argument(
          "mixed profile: wrong number of actions for player " +
          std::to_string(i + 1));
    }
    if (!in_simplex(x[i], tol)) {
      throw std::invalid_argument(
          "mixed profile: player " + std::to_string(i + 1) +
          " strategy is not a probability vector");
    }
  }
}

std::int64_t Game::flat_index(const PureProfile& a) const {
  std::int64_t idx = 0;
  for (int i = 0; i < num_players(); ++i) idx += strides_[i] * a[i];
  return idx;
}

double Game::payoff(int player, const PureProfile& a) const {
  if (player < 0 || player >= num_players()) {
    throw std::out_of_range("game: player index out of range");
  }
  check_profile(a);
  return payoffs_[player][flat_index(a)];
}

double Game::mixed_payoff(const MixedProfile& x, int player) const {
  if (player < 0 || player >= num_players()) {
    throw std::out_of_range("game: player index out of range");
  }
  check_mixed_profile(x);
  std::vector<int> dims;
  for (const auto& labels : actions_) dims.push_back(static_cast<int>(labels.size()));
  PureProfile a(num_players(), 0);
  double total = 0.0;
  do {
    double w = 1.0;
    for (int i = 0; i < num_players(); ++i) w *= x[i][a[i]];
    total += w * payoffs_[player][flat_index(a)];
  } while (next_profile(&a, dims));
  return total;
}

std::vector<double> Game::payoff_vector(const MixedProfile& x,
                                        int player) const {
  if (player < 0 || player >= num_players()) {
    throw std::out_of_range("game: player index out of range");
  }
  check_mixed_profile(x);
  std::vector<int> dims;
  for (const auto& labels : actions_) dims.push_back(static_cast<int>(labels.size()));
  std::vector<double> v(num_actions(player), 0.0);
  for (int alpha = 0; alpha < num_actions(player); ++alpha) {
    PureProfile a(num_players(), 0);
    a[player] = alpha;
    double total = 0.0;
    // Walk the opponents' profiles; player's own coordinate stays at alpha.
    std::vector<int> opp_dims = dims;
    opp_dims[player] = 1;
    PureProfile counter(num_players(), 0);
    do {
      double w = 1.0;
      for (int i = 0; i < num_players(); ++i) {
        if (i == player) continue;
        a[i] = counter[i];
        w *= x[i][a[i]];
      }
      total += w * payoffs_[player][flat_index(a)];
    } while (next_profile(&counter, opp_dims));
    v[alpha] = total;
  }
  return v;
}

bool Game::is_strict_nash(const PureProfile& a) const {
  check_profile(a);
  for (int i = 0; i < num_players(); ++i) {
    double at_profile = payoffs_[i][flat_index(a)];
    PureProfile dev = a;
    for (int alpha = 0; alpha < num_actions(i); ++alpha) {
      if (alpha == a[i]) continue;
      dev[i] = alpha;
      if (payoffs_[i][flat_index(dev)] >= at_profile) return false;
    }
  }
  return true;
}

std::vector<PureProfile> Game::enumerate_strict_nash() const {
  if (num_profiles() > kMaxEnumerableProfiles) {
    throw std::runtime_error("enumerate_strict_nash: profile space too large");
  }
  std::vector<int> dims;
  for (const auto& labels : actions_) dims.push_back(static_cast<int>(labels.size()));
  std::vector<PureProfile> found;
  PureProfile a(num_players(), 0);
  do {
    if (is_strict_nash(a)) found.push_back(a);
  } while (next_profile(&a, dims));
  return found;
}

double Game::min_payoff_gap(const PureProfile& eq) const {
  check_profile(eq);
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < num_players(); ++i) {
    double at_eq = payoffs_[i][flat_index(eq)];
    PureProfile dev = eq;
    for (int alpha = 0; alpha < num_actions(i); ++alpha) {
      if (alpha == eq[i]) continue;
      dev[i] = alpha;
      double diff = at_eq - payoffs_[i][flat_index(dev)];
      if (diff <= 0.0) {
        throw std::invalid_argument(
            "min_payoff_gap: profile is not a strict equilibrium (player " +
            std::to_string(i + 1) + " does not lose by deviating to \"" +
            actions_[i][alpha] + "\")");
      }
      gap = std::min(gap, diff);
    }
    dev[i] = eq[i];
  }
  if (!std::isfinite(gap)) {
    // Every player has a single action; no deviation exists.
    throw std::invalid_argument(
        "min_payoff_gap: no unilateral deviations exist");
  }
  return gap;
}

Game Game::quantized(const QuantizationScheme& q) const {
  std::vector<std::vector<double>> quantized_payoffs;
  quantized_payoffs.reserve(payoffs_.size());
  for (const auto& tensor : payoffs_) quantized_payoffs.push_back(q.quantize(tensor));
  return Game(actions_, std::move(quantized_payoffs));
}

std::string Game::profile_label(const PureProfile& a) const {
  check_profile(a);
  std::string label;
  for (int i = 0; i < num_players(); ++i) {
    if (i > 0) label += "|";
    label += actions_[i][a[i]];
  }
  return label;
}

}  // namespace ftql
