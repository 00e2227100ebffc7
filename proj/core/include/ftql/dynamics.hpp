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

#ifndef FTQL_DYNAMICS_HPP_
#define FTQL_DYNAMICS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ftql/game.hpp"
#include "ftql/quantize.hpp"
#include "ftql/regularizer.hpp"
#include "ftql/rng.hpp"

namespace ftql {

// Power-law step and exploration schedules, indexed from stage n = 1:
//   step_size(n)   = g0 * n^-p
//   exploration(n) = e0 * n^-q
struct Schedule {
  double step_coefficient = 1.0;         // g0 > 0
  double step_exponent = 0.0;            // p in [0, 1]
  double exploration_coefficient = 1.0;  // e0 in (0, 1]
  double exploration_exponent = 0.0;     // q >= 0

  double step_size(int stage) const;
  double exploration(int stage) const;

  // Summability conditions for almost-sure convergence under bandit
  // feedback: p <= 1, p + q > 1 and 2p - 2q > 1. Running with an invalid
  // schedule is allowed; callers surface a warning instead of failing.
  bool is_valid() const;
};

enum class NoiseKind { kNone, kUniform, kGaussian };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

// Zero-mean observation noise added to payoffs before quantization.
// `parameter` is the half-width b for uniform(+-b) and sigma for gaussian.
struct NoiseModel {
  NoiseKind kind = NoiseKind::kNone;
  double parameter = 0.0;

  bool is_none() const { return kind == NoiseKind::kNone; }
  double variance_bound() const;  // b^2/3 (uniform), sigma^2 (gaussian)
  double sample(Rng& rng) const;
};

enum class FeedbackMode { kExactVector, kQuantizedVector, kBanditIwe };

std::string to_string(FeedbackMode mode);
FeedbackMode feedback_mode_from_string(const std::string& name);

struct FeedbackChannel {
  FeedbackMode mode = FeedbackMode::kExactVector;
  QuantizationScheme quantizer;  // identity by default
  NoiseModel noise;

  // exact-vector means exactly that: identity quantizer, no noise.
  void validate() const;
};

// Learner state at the start of `stage`: scores y, strategies x = Q(y) and,
// under bandit feedback, the exploration-mixed sampling strategies for this
// stage.
struct LearnerState {
  int stage = 1;
  std::vector<std::vector<double>> scores;
  MixedProfile strategies;
  MixedProfile sampling;  // empty outside bandit mode
};

LearnerState make_initial_state(const Game& game, const Regularizer& reg,
                                const Schedule& schedule,
                                const FeedbackChannel& channel,
                                std::vector<std::vector<double>> scores);

// x-hat = (1 - eps) x + eps/|A| * uniform.
std::vector<double> sampling_strategy(const std::vector<double>& x,
                                      double eps);

// Realized quantized payoffs u-hat_i = Q(u_i(a) + xi_i) for the played
// profile. Noise is drawn per player in player order; this draw order is
// part of the determinism contract. Bandit mode only.
std::vector<double> realized_feedback(const Game& game, const PureProfile& a,
                                      const FeedbackChannel& channel,
                                      Rng& rng);

// Importance-weighted estimate: u-hat / x-hat_chosen at the chosen action,
// zero elsewhere.
std::vector<double> iwe_estimate(int chosen, double realized_payoff,
                                 const std::vector<double>& sampling_probs);

// Per-player payoff vectors for the vector feedback modes: v_i(x) exactly,
// or componentwise Q(v + xi) in quantized-vector mode. Noise (when enabled)
// is drawn player-major, coordinate-minor.
std::vector<std::vector<double>> vector_feedback(const Game& game,
                                                 const MixedProfile& x,
                                                 const FeedbackChannel& channel,
                                                 Rng& rng);

// Optional per-stage observables captured by ftql_step (bandit mode).
struct StepTrace {
  PureProfile actions;
  std::vector<double> realized_payoffs;
};

// One stage of follow-the-quantized-leader: build the feedback vector for
// the current stage, update scores with the current step size, recompute
// strategies (and sampling strategies for the next stage). RNG draw order
// per stage: all action draws in player order, then all noise draws in
// player order.
LearnerState ftql_step(const LearnerState& state, const Game& game,
                       const Regularizer& reg, const Schedule& schedule,
                       const FeedbackChannel& channel, Rng& rng,
                       StepTrace* trace = nullptr);

struct LogOptions {
  bool scores = false;
  bool sampling = false;
  bool actions = false;
};

struct StageLog {
  int stage = 0;
  MixedProfile x;
  std::vector<std::vector<double>> y;  // present iff LogOptions.scores
  MixedProfile x_hat;                  // present iff LogOptions.sampling
  PureProfile actions;                 // present iff LogOptions.actions
  std::vector<double> realized_payoffs;
};

// Strided log of one trajectory. Stage 1 and the horizon stage are always
// present; intermediate stages at the configured stride.
struct TrajectoryRecord {
  std::string config_hash;
  std::uint64_t seed = 0;
  int horizon = 0;
  int log_stride = 1;
  LogOptions logged;
  std::vector<StageLog> stages;

  const StageLog& at_stage(int stage) const;  // throws if not logged
  const StageLog& final_stage() const;
};

}  // namespace ftql

#endif  // FTQL_DYNAMICS_HPP_
