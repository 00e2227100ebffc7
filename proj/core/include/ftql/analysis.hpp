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

#ifndef FTQL_ANALYSIS_HPP_
#define FTQL_ANALYSIS_HPP_

#include <optional>
#include <vector>

#include "ftql/dynamics.hpp"
#include "ftql/game.hpp"
#include "ftql/regularizer.hpp"
#include "ftql/rng.hpp"

namespace ftql {

// Sum over players of the l1 distance between x_i and the vertex e_{a_i}.
double l1_distance(const MixedProfile& x, const PureProfile& a);

// Per-player argmax action (lowest index on ties): the vertex closest to x.
PureProfile nearest_pure_profile(const MixedProfile& x);

// x lies in U_eps(eq): every player puts more than 1 - eps on eq's action.
bool in_neighborhood(const MixedProfile& x, const PureProfile& eq, double eps);

// w (one vector per player) lies in the normal cone of the strategy polytope
// at the vertex eq: w_{i,alpha} - w_{i,eq_i} <= 0 for every player and
// action.
bool normal_cone_contains(const Game& game, const PureProfile& eq,
                          const std::vector<std::vector<double>>& w);

// Deterministic check that the closed sup-norm ball of `radius` around the
// payoff vectors v(eq) lies inside the normal cone at eq, i.e. that
// v_{i,alpha} - v_{i,eq_i} + 2*radius <= 0 for every deviation. When
// samples > 0, that verdict is cross-validated against `samples` random
// points of the ball (a true verdict with a sampled point outside the cone
// raises an error).
bool ball_in_cone_check(const Game& game, const PureProfile& eq,
                        double radius, int samples, Rng& rng);

struct ConvergenceVerdict {
  std::optional<PureProfile> target;
  std::optional<int> entered_at;
  double final_distance = 0.0;  // l1 to target if set, else to nearest vertex
  double neighborhood_eps = 0.0;
  PureProfile nearest_at_horizon;
};

// A trajectory converges to a strict equilibrium eq if its logged tail sits
// inside U_eps(eq) for at least the final `dwell` stages of the horizon.
// entered_at is the first logged stage of that final uninterrupted stretch.
ConvergenceVerdict classify_trajectory(const TrajectoryRecord& rec,
                                       const Game& game, double eps,
                                       int dwell);

struct RateFit {
  double exponent = 0.0;  // the step exponent p the regressor was built from
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;
  bool conforming = false;  // slope < 0
};

// OLS fit of log ||x_n - eq||_1 against n^(1-p) on post-entry stages
// (entry at neighborhood entry_eps), excluding stages whose distance has
// collapsed below 10 machine epsilons. Steep regularizers only; Euclidean
// runs hit the vertex in finite time and are measured by finite_time_check.
RateFit fit_rate(const TrajectoryRecord& rec, const PureProfile& eq,
                 const Regularizer& reg, const Schedule& schedule,
                 double entry_eps = 0.05);

// First logged stage from which x equals the vertex eq exactly (bitwise)
// through the end of the log; nullopt if that never happens.
std::optional<int> finite_time_check(const TrajectoryRecord& rec,
                                     const PureProfile& eq);

// sup over the last half of the logged stages of ||x-hat_n - eq||_1 * n^q.
// Requires a bandit record with sampling strategies logged.
double sampling_rate_check(const TrajectoryRecord& rec, const PureProfile& eq,
                           const Schedule& schedule);

// counts[i][j] histograms (x_{1,first action}, x_{2,first action}) over
// [0,1]^2 at one logged stage across a batch; counts sum to the batch size.
struct HeatmapGrid {
  int bins = 0;
  int stage = 0;
  std::vector<std::vector<long>> counts;
};

HeatmapGrid heatmap(const std::vector<TrajectoryRecord>& records, int stage,
                    int bins);

}  // namespace ftql

#endif  // FTQL_ANALYSIS_HPP_
