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

#include "ftql/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ftql {
namespace {

void check_profile_shape(const MixedProfile& x, const PureProfile& a) {
  if (x.size() != a.size()) {
    throw std::invalid_argument("profile/strategy player count mismatch");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (a[i] < 0 || a[i] >= static_cast<int>(x[i].size())) {
      throw std::invalid_argument("profile action index out of range");
    }
  }
}

MixedProfile point_mass(const Game& game, const PureProfile& a) {
  MixedProfile x(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    x[i].assign(game.num_actions(i), 0.0);
    x[i][a[i]] = 1.0;
  }
  return x;
}

// First logged stage of the final uninterrupted run of logged stages inside
// U_eps(eq); nullopt if the last logged stage is already outside.
std::optional<int> entry_stage(const TrajectoryRecord& rec,
                               const PureProfile& eq, double eps) {
  std::optional<int> entered;
  for (auto it = rec.stages.rbegin(); it != rec.stages.rend(); ++it) {
    if (!in_neighborhood(it->x, eq, eps)) break;
    entered = it->stage;
  }
  return entered;
}

}  // namespace

double l1_distance(const MixedProfile& x, const PureProfile& a) {
  check_profile_shape(x, a);
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t alpha = 0; alpha < x[i].size(); ++alpha) {
      double vertex = (static_cast<int>(alpha) == a[i]) ? 1.0 : 0.0;
      total += std::abs(x[i][alpha] - vertex);
    }
  }
  return total;
}

PureProfile nearest_pure_profile(const MixedProfile& x) {
  PureProfile a(x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].empty()) {
      throw std::invalid_argument("nearest_pure_profile: empty strategy");
    }
    a[i] = static_cast<int>(
        std::max_element(x[i].begin(), x[i].end()) - x[i].begin());
  }
  return a;
}

bool in_neighborhood(const MixedProfile& x, const PureProfile& eq,
                     double eps) {
  check_profile_shape(x, eq);
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("in_neighborhood: eps must lie in (0, 1)");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i][eq[i]] > 1.0 - eps)) return false;
  }
  return true;
}

bool normal_cone_contains(const Game& game, const PureProfile& eq,
                          const std::vector<std::vector<double>>& w) {
  game.check_profile(eq);
  if (static_cast<int>(w.size()) != game.num_players()) {
    throw std::invalid_argument("normal_cone_contains: player count mismatch");
  }
  for (int i = 0; i < game.num_players(); ++i) {
    if (static_cast<int>(w[i].size()) != game.num_actions(i)) {
      throw std::invalid_argument("normal_cone_contains: action count mismatch");
    }
    for (int alpha = 0; alpha < game.num_actions(i); ++alpha) {
      if (w[i][alpha] - w[i][eq[i]] > 0.0) return false;
    }
  }
  return true;
}

bool ball_in_cone_check(const Game& game, const PureProfile& eq,
                        double radius, int samples, Rng& rng) {
  game.check_profile(eq);
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("ball_in_cone_check: radius must be >= 0");
  }
  MixedProfile vertex = point_mass(game, eq);
  std::vector<std::vector<double>> v(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    v[i] = game.payoff_vector(vertex, i);
  }
  bool verdict = true;
  for (int i = 0; i < game.num_players() && verdict; ++i) {
    for (int alpha = 0; alpha < game.num_actions(i); ++alpha) {
      if (alpha == eq[i]) continue;
      if (v[i][alpha] - v[i][eq[i]] + 2.0 * radius > 0.0) {
        verdict = false;
        break;
      }
    }
  }
  // Sampled cross-validation: points of the ball must never contradict a
  // positive deterministic verdict.
  for (int s = 0; s < samples; ++s) {
    std::vector<std::vector<double>> w(v);
    for (auto& wi : w) {
      for (double& coord : wi) coord += rng.uniform(-radius, radius);
    }
    if (verdict && !normal_cone_contains(game, eq, w)) {
      throw std::runtime_error(
          "ball_in_cone_check: sampled point escaped the cone despite a "
          "positive deterministic verdict");
    }
  }
  return verdict;
}

ConvergenceVerdict classify_trajectory(const TrajectoryRecord& rec,
                                       const Game& game, double eps,
                                       int dwell) {
  if (rec.stages.empty()) {
    throw std::invalid_argument("classify_trajectory: empty record");
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("classify_trajectory: eps must lie in (0, 1)");
  }
  if (dwell < 1 || dwell > rec.horizon) {
    throw std::invalid_argument(
        "classify_trajectory: dwell must lie in [1, horizon]");
  }
  const StageLog& fin = rec.final_stage();
  ConvergenceVerdict verdict;
  verdict.neighborhood_eps = eps;
  verdict.nearest_at_horizon = nearest_pure_profile(fin.x);

  for (const PureProfile& eq : game.enumerate_strict_nash()) {
    if (!in_neighborhood(fin.x, eq, eps)) continue;
    std::optional<int> entered = entry_stage(rec, eq, eps);
    if (!entered) continue;
    int span = rec.horizon - *entered + 1;
    if (span < dwell) continue;
    double dist = l1_distance(fin.x, eq);
    // eps < 1/2 admits at most one candidate; for larger eps keep the
    // closest one.
    if (!verdict.target || dist < verdict.final_distance) {
      verdict.target = eq;
      verdict.entered_at = entered;
      verdict.final_distance = dist;
    }
  }
  if (!verdict.target) {
    verdict.final_distance = l1_distance(fin.x, verdict.nearest_at_horizon);
  }
  return verdict;
}

RateFit fit_rate(const TrajectoryRecord& rec, const PureProfile& eq,
                 const Regularizer& reg, const Schedule& schedule,
                 double entry_eps) {
  if (!reg.steep()) {
    throw std::invalid_argument(
        "fit_rate: non-steep regularizers reach the vertex in finite time; "
        "use finite_time_check");
  }
  std::optional<int> entered = entry_stage(rec, eq, entry_eps);
  if (!entered) {
    throw std::invalid_argument(
        "fit_rate: trajectory does not settle in the target neighborhood");
  }
  double p = schedule.step_exponent;
  double floor = 10.0 * std::numeric_limits<double>::epsilon();

  std::vector<double> t;
  std::vector<double> logd;
  for (const StageLog& log : rec.stages) {
    if (log.stage < *entered) continue;
    double d = l1_distance(log.x, eq);
    if (d <= floor) continue;
    t.push_back(std::pow(static_cast<double>(log.stage), 1.0 - p));
    logd.push_back(std::log(d));
  }
  RateFit fit;
  fit.exponent = p;
  fit.points = static_cast<int>(t.size());
  if (fit.points < 10) {
    throw std::runtime_error("fit_rate: fewer than 10 usable points");
  }
  double n = static_cast<double>(fit.points);
  double mean_t = 0.0, mean_y = 0.0;
  for (int k = 0; k < fit.points; ++k) {
    mean_t += t[k];
    mean_y += logd[k];
  }
  mean_t /= n;
  mean_y /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (int k = 0; k < fit.points; ++k) {
    double dt = t[k] - mean_t;
    double dy = logd[k] - mean_y;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  if (stt <= 0.0) {
    throw std::runtime_error("fit_rate: degenerate regressor (p = 1?)");
  }
  fit.slope = sty / stt;
  fit.intercept = mean_y - fit.slope * mean_t;
  double ss_res = syy - fit.slope * sty;
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 0.0;
  fit.conforming = fit.slope < 0.0;
  return fit;
}

std::optional<int> finite_time_check(const TrajectoryRecord& rec,
                                     const PureProfile& eq) {
  if (rec.stages.empty()) {
    throw std::invalid_argument("finite_time_check: empty record");
  }
  auto at_vertex = [&](const StageLog& log) {
    check_profile_shape(log.x, eq);
    for (std::size_t i = 0; i < log.x.size(); ++i) {
      for (std::size_t alpha = 0; alpha < log.x[i].size(); ++alpha) {
        double vertex = (static_cast<int>(alpha) == eq[i]) ? 1.0 : 0.0;
        if (log.x[i][alpha] != vertex) return false;
      }
    }
    return true;
  };
  std::optional<int> first;
  for (auto it = rec.stages.rbegin(); it != rec.stages.rend(); ++it) {
    if (!at_vertex(*it)) break;
    first = it->stage;
  }
  return first;
}

double sampling_rate_check(const TrajectoryRecord& rec, const PureProfile& eq,
                           const Schedule& schedule) {
  if (!rec.logged.sampling) {
    throw std::invalid_argument(
        "sampling_rate_check: sampling strategies were not logged");
  }
  if (rec.stages.empty()) {
    throw std::invalid_argument("sampling_rate_check: empty record");
  }
  double q = schedule.exploration_exponent;
  double sup = 0.0;
  for (std::size_t k = rec.stages.size() / 2; k < rec.stages.size(); ++k) {
    const StageLog& log = rec.stages[k];
    double scaled = l1_distance(log.x_hat, eq) *
                    std::pow(static_cast<double>(log.stage), q);
    sup = std::max(sup, scaled);
  }
  return sup;
}

HeatmapGrid heatmap(const std::vector<TrajectoryRecord>& records, int stage,
                    int bins) {
  if (records.empty()) {
    throw std::invalid_argument("heatmap: no records");
  }
  if (bins < 1) {
    throw std::invalid_argument("heatmap: bins must be >= 1");
  }
  HeatmapGrid grid;
  grid.bins = bins;
  grid.stage = stage;
  grid.counts.assign(bins, std::vector<long>(bins, 0));
  for (const TrajectoryRecord& rec : records) {
    const StageLog& log = rec.at_stage(stage);  // throws if not logged
    if (log.x.size() < 2) {
      throw std::invalid_argument("heatmap: needs at least two players");
    }
    double v1 = log.x[0][0];
    double v2 = log.x[1][0];
    int b1 = std::min(bins - 1, static_cast<int>(std::floor(v1 * bins)));
    int b2 = std::min(bins - 1, static_cast<int>(std::floor(v2 * bins)));
    b1 = std::max(0, b1);
    b2 = std::max(0, b2);
    ++grid.counts[b1][b2];
  }
  return grid;
}

}  // namespace ftql
