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

#include "ftql/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ftql {

double Schedule::step_size(int stage) const {
  if (stage < 1) throw std::invalid_argument("schedule: stage index starts at 1");
  return step_coefficient * std::pow(static_cast<double>(stage), -step_exponent);
}

double Schedule::exploration(int stage) const {
  if (stage < 1) throw std::invalid_argument("schedule: stage index starts at 1");
  return exploration_coefficient *
         std::pow(static_cast<double>(stage), -exploration_exponent);
}

bool Schedule::is_valid() const {
  double p = step_exponent;
  double q = exploration_exponent;
  return p <= 1.0 && p + q > 1.0 && 2.0 * p - 2.0 * q > 1.0;
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kNone: return "none";
    case NoiseKind::kUniform: return "uniform";
    case NoiseKind::kGaussian: return "gaussian";
  }
  throw std::logic_error("unreachable noise kind");
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "none") return NoiseKind::kNone;
  if (name == "uniform") return NoiseKind::kUniform;
  if (name == "gaussian") return NoiseKind::kGaussian;
  throw std::invalid_argument("unknown noise kind: " + name);
}

double NoiseModel::variance_bound() const {
  switch (kind) {
    case NoiseKind::kNone: return 0.0;
    case NoiseKind::kUniform: return parameter * parameter / 3.0;
    case NoiseKind::kGaussian: return parameter * parameter;
  }
  throw std::logic_error("unreachable noise kind");
}

double NoiseModel::sample(Rng& rng) const {
  switch (kind) {
    case NoiseKind::kNone: return 0.0;
    case NoiseKind::kUniform: return rng.uniform(-parameter, parameter);
    case NoiseKind::kGaussian: return rng.gaussian(parameter);
  }
  throw std::logic_error("unreachable noise kind");
}

std::string to_string(FeedbackMode mode) {
  switch (mode) {
    case FeedbackMode::kExactVector: return "exact-vector";
    case FeedbackMode::kQuantizedVector: return "quantized-vector";
    case FeedbackMode::kBanditIwe: return "bandit-iwe";
  }
  throw std::logic_error("unreachable feedback mode");
}

FeedbackMode feedback_mode_from_string(const std::string& name) {
  if (name == "exact-vector") return FeedbackMode::kExactVector;
  if (name == "quantized-vector") return FeedbackMode::kQuantizedVector;
  if (name == "bandit-iwe") return FeedbackMode::kBanditIwe;
  throw std::invalid_argument("unknown feedback mode: " + name);
}

void FeedbackChannel::validate() const {
  if (mode == FeedbackMode::kExactVector) {
    if (!quantizer.is_identity()) {
      throw std::invalid_argument(
          "feedback: exact-vector requires the identity quantizer");
    }
    if (!noise.is_none()) {
      throw std::invalid_argument("feedback: exact-vector requires no noise");
    }
  }
  if (!noise.is_none() && noise.parameter <= 0.0) {
    throw std::invalid_argument("feedback: noise parameter must be > 0");
  }
}

LearnerState make_initial_state(const Game& game, const Regularizer& reg,
                                const Schedule& schedule,
                                const FeedbackChannel& channel,
                                std::vector<std::vector<double>> scores) {
  if (static_cast<int>(scores.size()) != game.num_players()) {
    throw std::invalid_argument("initial scores: wrong number of players");
  }
  LearnerState state;
  state.stage = 1;
  state.scores = std::move(scores);
  state.strategies.resize(state.scores.size());
  for (int i = 0; i < game.num_players(); ++i) {
    if (static_cast<int>(state.scores[i].size()) != game.num_actions(i)) {
      throw std::invalid_argument("initial scores: wrong number of actions");
    }
    state.strategies[i] = reg.choice_map(state.scores[i]);
  }
  if (channel.mode == FeedbackMode::kBanditIwe) {
    double eps = schedule.exploration(1);
    state.sampling.resize(state.strategies.size());
    for (std::size_t i = 0; i < state.strategies.size(); ++i) {
      state.sampling[i] = sampling_strategy(state.strategies[i], eps);
    }
  }
  return state;
}

std::vector<double> sampling_strategy(const std::vector<double>& x,
                                      double eps) {
  if (!in_simplex(x)) {
    throw std::invalid_argument("sampling_strategy: not a probability vector");
  }
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("sampling_strategy: eps must lie in [0, 1]");
  }
  double n = static_cast<double>(x.size());
  std::vector<double> mixed(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) {
    mixed[a] = (1.0 - eps) * x[a] + eps / n;
  }
  return mixed;
}

std::vector<double> realized_feedback(const Game& game, const PureProfile& a,
                                      const FeedbackChannel& channel,
                                      Rng& rng) {
  if (channel.mode != FeedbackMode::kBanditIwe) {
    throw std::invalid_argument("realized_feedback: bandit-iwe mode only");
  }
  game.check_profile(a);
  std::vector<double> u_hat(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    double noise = channel.noise.is_none() ? 0.0 : channel.noise.sample(rng);
    u_hat[i] = channel.quantizer.quantize(game.payoff(i, a) + noise);
  }
  return u_hat;
}

std::vector<double> iwe_estimate(int chosen, double realized_payoff,
                                 const std::vector<double>& sampling_probs) {
  if (chosen < 0 || chosen >= static_cast<int>(sampling_probs.size())) {
    throw std::invalid_argument("iwe_estimate: chosen action out of range");
  }
  for (double p : sampling_probs) {
    if (!(p > 0.0)) {
      throw std::domain_error(
          "iwe_estimate: sampling probabilities must be strictly positive");
    }
  }
  std::vector<double> v(sampling_probs.size(), 0.0);
  v[chosen] = realized_payoff / sampling_probs[chosen];
  return v;
}

std::vector<std::vector<double>> vector_feedback(const Game& game,
                                                 const MixedProfile& x,
                                                 const FeedbackChannel& channel,
                                                 Rng& rng) {
  if (channel.mode == FeedbackMode::kBanditIwe) {
    throw std::invalid_argument("vector_feedback: vector modes only");
  }
  channel.validate();
  std::vector<std::vector<double>> v(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    v[i] = game.payoff_vector(x, i);
    if (channel.mode == FeedbackMode::kQuantizedVector) {
      for (double& coord : v[i]) {
        double noise = channel.noise.is_none() ? 0.0 : channel.noise.sample(rng);
        coord = channel.quantizer.quantize(coord + noise);
      }
    }
  }
  return v;
}

LearnerState ftql_step(const LearnerState& state, const Game& game,
                       const Regularizer& reg, const Schedule& schedule,
                       const FeedbackChannel& channel, Rng& rng,
                       StepTrace* trace) {
  channel.validate();
  int n = state.stage;
  double gamma = schedule.step_size(n);

  std::vector<std::vector<double>> v;
  if (channel.mode == FeedbackMode::kBanditIwe) {
    PureProfile a(game.num_players());
    for (int i = 0; i < game.num_players(); ++i) {
      a[i] = rng.categorical(state.sampling[i]);
    }
    std::vector<double> u_hat = realized_feedback(game, a, channel, rng);
    v.resize(game.num_players());
    for (int i = 0; i < game.num_players(); ++i) {
      v[i] = iwe_estimate(a[i], u_hat[i], state.sampling[i]);
    }
    if (trace != nullptr) {
      trace->actions = std::move(a);
      trace->realized_payoffs = std::move(u_hat);
    }
  } else {
    v = vector_feedback(game, state.strategies, channel, rng);
    if (trace != nullptr) {
      trace->actions.clear();
      trace->realized_payoffs.clear();
    }
  }

  LearnerState next;
  next.stage = n + 1;
  next.scores = state.scores;
  next.strategies.resize(state.scores.size());
  for (int i = 0; i < game.num_players(); ++i) {
    for (int alpha = 0; alpha < game.num_actions(i); ++alpha) {
      next.scores[i][alpha] += gamma * v[i][alpha];
    }
    next.strategies[i] = reg.choice_map(next.scores[i]);
  }
  if (channel.mode == FeedbackMode::kBanditIwe) {
    double eps = schedule.exploration(n + 1);
    next.sampling.resize(next.strategies.size());
    for (std::size_t i = 0; i < next.strategies.size(); ++i) {
      next.sampling[i] = sampling_strategy(next.strategies[i], eps);
    }
  }
  return next;
}

const StageLog& TrajectoryRecord::at_stage(int stage) const {
  // Logged stages are strictly increasing; binary search by stage index.
  auto it = std::lower_bound(
      stages.begin(), stages.end(), stage,
      [](const StageLog& log, int s) { return log.stage < s; });
  if (it == stages.end() || it->stage != stage) {
    throw std::out_of_range("trajectory record: stage " +
                            std::to_string(stage) + " was not logged");
  }
  return *it;
}

const StageLog& TrajectoryRecord::final_stage() const {
  if (stages.empty()) {
    throw std::out_of_range("trajectory record: empty log");
  }
  return stages.back();
}

}  // namespace ftql
