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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ftql/analysis.hpp"
#include "test_util.hpp"

using ftql::Game;
using ftql::MixedProfile;
using ftql::PureProfile;
using ftql::Regularizer;
using ftql::Schedule;
using ftql::StageLog;
using ftql::TrajectoryRecord;

namespace {

// Builds a record whose strategies follow the given per-stage profiles.
TrajectoryRecord make_record(const std::vector<MixedProfile>& xs,
                             int stride = 1) {
  TrajectoryRecord rec;
  rec.horizon = static_cast<int>(xs.size());
  rec.log_stride = stride;
  for (int n = 1; n <= rec.horizon; ++n) {
    if ((n - 1) % stride != 0 && n != rec.horizon) continue;
    StageLog log;
    log.stage = n;
    log.x = xs[static_cast<std::size_t>(n - 1)];
    rec.stages.push_back(log);
  }
  return rec;
}

// Two-player profile at distance d from ((1,0),(1,0)) in l1.
MixedProfile near_vertex(double d) {
  return {{1.0 - d / 4.0, d / 4.0}, {1.0 - d / 4.0, d / 4.0}};
}

}  // namespace

TEST_CASE("l1 distance and nearest vertex") {
  MixedProfile x = {{0.9, 0.1}, {0.3, 0.7}};
  PureProfile vertex = {0, 1};
  CHECK(ftql::l1_distance(x, vertex) ==
        doctest::Approx(0.1 + 0.1 + 0.3 + 0.3).epsilon(1e-15));
  CHECK(ftql::nearest_pure_profile(x) == vertex);
  // ties resolve to the first action
  MixedProfile tie = {{0.5, 0.5}, {0.5, 0.5}};
  CHECK(ftql::nearest_pure_profile(tie) == PureProfile{0, 0});
}

TEST_CASE("neighborhood membership") {
  PureProfile eq = {0, 1};
  CHECK(ftql::in_neighborhood({{0.96, 0.04}, {0.04, 0.96}}, eq, 0.05));
  CHECK_FALSE(ftql::in_neighborhood({{0.95, 0.05}, {0.04, 0.96}}, eq, 0.05));
  CHECK_FALSE(ftql::in_neighborhood({{0.99, 0.01}, {0.5, 0.5}}, eq, 0.05));
  CHECK_THROWS_AS(ftql::in_neighborhood({{1.0, 0.0}}, {0}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(ftql::in_neighborhood({{1.0, 0.0}}, {0}, 1.0),
                  std::invalid_argument);
}

TEST_CASE("normal cone containment matches the adjacent-vertex oracle") {
  ftql::Rng rng(41);
  int agreements = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    Game g = trial % 2 == 0 ? testutil::random_game({2, 2}, rng)
                            : testutil::random_game({3, 2}, rng);
    PureProfile eq;
    for (int i = 0; i < g.num_players(); ++i) {
      eq.push_back(
          static_cast<int>(rng.uniform(0.0, 1.0) * g.num_actions(i)));
    }
    std::vector<std::vector<double>> w;
    for (int i = 0; i < g.num_players(); ++i) {
      std::vector<double> row;
      for (int a = 0; a < g.num_actions(i); ++a) {
        row.push_back(rng.uniform(-1.0, 1.0));
      }
      w.push_back(row);
    }
    // oracle: <w_i, z - e_eq> <= 0 along every single-player vertex swap
    bool oracle = true;
    for (int i = 0; i < g.num_players() && oracle; ++i) {
      for (int a = 0; a < g.num_actions(i); ++a) {
        if (a == eq[i]) continue;
        std::vector<double> z(g.num_actions(i), 0.0);
        z[a] = 1.0;
        double inner = 0.0;
        for (int b = 0; b < g.num_actions(i); ++b) {
          double e = b == eq[i] ? 1.0 : 0.0;
          inner += w[i][b] * (z[b] - e);
        }
        if (inner > 0.0) {
          oracle = false;
          break;
        }
      }
    }
    CHECK(ftql::normal_cone_contains(g, eq, w) == oracle);
    if (ftql::normal_cone_contains(g, eq, w) == oracle) ++agreements;
  }
  CHECK(agreements == 2000);
}

TEST_CASE("payoff ball containment flips exactly at half the gap") {
  Game g = testutil::coordination_game();
  ftql::Rng rng(42);
  double delta = g.min_payoff_gap({0, 0});
  CHECK(ftql::ball_in_cone_check(g, {0, 0}, delta / 2, 200, rng));
  CHECK_FALSE(ftql::ball_in_cone_check(g, {0, 0}, delta / 2 + 1e-6, 200, rng));
  CHECK(ftql::ball_in_cone_check(g, {1, 1}, delta / 2, 200, rng));
  // a non-equilibrium vertex fails already at tiny radius
  CHECK_FALSE(ftql::ball_in_cone_check(g, {0, 1}, 1e-9, 200, rng));
}

TEST_CASE("classification: frozen interior trajectory never converges") {
  std::vector<MixedProfile> xs(50, MixedProfile{{0.5, 0.5}, {0.5, 0.5}});
  TrajectoryRecord rec = make_record(xs);
  Game g = testutil::coordination_game();
  ftql::ConvergenceVerdict v = ftql::classify_trajectory(rec, g, 0.05, 5);
  CHECK_FALSE(v.target.has_value());
  CHECK_FALSE(v.entered_at.has_value());
  CHECK(v.nearest_at_horizon == PureProfile{0, 0});
  CHECK(v.final_distance == doctest::Approx(2.0));
}

TEST_CASE("classification: enter and dwell") {
  std::vector<MixedProfile> xs;
  for (int n = 1; n <= 100; ++n) {
    double d = n < 20 ? 0.5 : 0.01;  // enters U_eps at stage 20
    xs.push_back(near_vertex(d));
  }
  TrajectoryRecord rec = make_record(xs);
  Game g = testutil::coordination_game();

  ftql::ConvergenceVerdict v = ftql::classify_trajectory(rec, g, 0.05, 50);
  REQUIRE(v.target.has_value());
  CHECK(*v.target == PureProfile{0, 0});
  CHECK(*v.entered_at == 20);
  CHECK(v.final_distance == doctest::Approx(0.01));

  // dwell longer than the tail suffix fails the gate
  ftql::ConvergenceVerdict strict = ftql::classify_trajectory(rec, g, 0.05, 82);
  CHECK_FALSE(strict.target.has_value());

  // a late excursion out of the neighborhood resets the entry stage
  xs[69] = near_vertex(0.5);
  TrajectoryRecord broken = make_record(xs);
  ftql::ConvergenceVerdict w = ftql::classify_trajectory(broken, g, 0.05, 5);
  REQUIRE(w.target.has_value());
  CHECK(*w.entered_at == 71);
}

TEST_CASE("classification is stable under log-stride refinement") {
  std::vector<MixedProfile> xs;
  for (int n = 1; n <= 200; ++n) {
    xs.push_back(near_vertex(n < 37 ? 0.5 : 0.004));
  }
  Game g = testutil::coordination_game();
  ftql::ConvergenceVerdict fine =
      ftql::classify_trajectory(make_record(xs, 1), g, 0.05, 40);
  ftql::ConvergenceVerdict coarse =
      ftql::classify_trajectory(make_record(xs, 10), g, 0.05, 40);
  REQUIRE(fine.target.has_value());
  REQUIRE(coarse.target.has_value());
  CHECK(*fine.target == *coarse.target);
  CHECK(std::abs(*fine.entered_at - *coarse.entered_at) < 10);
  CHECK(fine.final_distance == coarse.final_distance);
}

TEST_CASE("rate fit recovers a synthetic exponential decay") {
  Schedule sched{1.0, 0.5, 1.0, 0.3};
  const double c = 0.8;
  std::vector<MixedProfile> xs;
  for (int n = 1; n <= 400; ++n) {
    double d = std::exp(-c * std::pow(n, 0.5));
    xs.push_back(near_vertex(d));
  }
  TrajectoryRecord rec = make_record(xs);
  ftql::RateFit fit = ftql::fit_rate(rec, {0, 0}, Regularizer::entropic(),
                                     sched, 0.5);
  CHECK(fit.slope == doctest::Approx(-c).epsilon(1e-6));
  CHECK(fit.r_squared > 0.999999);
  CHECK(fit.conforming);
  CHECK(fit.points > 300);

  CHECK_THROWS_AS(
      ftql::fit_rate(rec, {0, 0}, Regularizer::euclidean(), sched, 0.5),
      std::invalid_argument);
}

TEST_CASE("rate fit needs enough usable points") {
  Schedule sched{1.0, 0.5, 1.0, 0.3};
  std::vector<MixedProfile> xs(5, near_vertex(0.01));
  TrajectoryRecord rec = make_record(xs);
  CHECK_THROWS_AS(
      ftql::fit_rate(rec, {0, 0}, Regularizer::entropic(), sched, 0.5),
      std::runtime_error);

  // p = 1 makes the regressor n^0 constant: degenerate
  Schedule flat{1.0, 1.0, 1.0, 0.3};
  std::vector<MixedProfile> many(50, near_vertex(0.01));
  TrajectoryRecord rec2 = make_record(many);
  CHECK_THROWS_AS(
      ftql::fit_rate(rec2, {0, 0}, Regularizer::entropic(), flat, 0.5),
      std::runtime_error);
}

TEST_CASE("finite time check finds the first exact hit") {
  std::vector<MixedProfile> xs;
  for (int n = 1; n <= 30; ++n) {
    xs.push_back(n < 12 ? near_vertex(0.3)
                        : MixedProfile{{1.0, 0.0}, {1.0, 0.0}});
  }
  TrajectoryRecord rec = make_record(xs);
  auto hit = ftql::finite_time_check(rec, {0, 0});
  REQUIRE(hit.has_value());
  CHECK(*hit == 12);

  // a later departure disqualifies earlier hits
  xs[20] = near_vertex(0.1);
  TrajectoryRecord broken = make_record(xs);
  auto rehit = ftql::finite_time_check(broken, {0, 0});
  REQUIRE(rehit.has_value());
  CHECK(*rehit == 22);

  std::vector<MixedProfile> never(30, near_vertex(1e-9));
  CHECK_FALSE(ftql::finite_time_check(make_record(never), {0, 0}).has_value());
}

TEST_CASE("sampling rate check recovers the exploration floor") {
  Schedule sched{1.0, 0.75, 0.8, 0.25};
  TrajectoryRecord rec;
  rec.horizon = 200;
  rec.log_stride = 1;
  rec.logged.sampling = true;
  for (int n = 1; n <= 200; ++n) {
    StageLog log;
    log.stage = n;
    double eps = sched.exploration(n);
    log.x = {{1.0, 0.0}, {1.0, 0.0}};
    log.x_hat = {{1.0 - eps / 2, eps / 2}, {1.0 - eps / 2, eps / 2}};
    rec.stages.push_back(log);
  }
  double value = ftql::sampling_rate_check(rec, {0, 0}, sched);
  // per player the l1 gap is exactly eps_n, so the scaled sup is 2 e0
  CHECK(value == doctest::Approx(2 * 0.8).epsilon(1e-12));

  TrajectoryRecord no_sampling;
  no_sampling.horizon = 10;
  for (int n = 1; n <= 10; ++n) {
    StageLog log;
    log.stage = n;
    log.x = {{1.0, 0.0}, {1.0, 0.0}};
    no_sampling.stages.push_back(log);
  }
  CHECK_THROWS_AS(ftql::sampling_rate_check(no_sampling, {0, 0}, sched),
                  std::invalid_argument);
}

TEST_CASE("heatmap conserves the batch and concentrates frozen mass") {
  std::vector<MixedProfile> xs(10, MixedProfile{{0.52, 0.48}, {0.52, 0.48}});
  std::vector<TrajectoryRecord> batch(25, make_record(xs));
  ftql::HeatmapGrid grid = ftql::heatmap(batch, 5, 10);
  CHECK(grid.bins == 10);
  CHECK(grid.stage == 5);
  int total = 0;
  int nonzero = 0;
  for (const auto& row : grid.counts) {
    for (int c : row) {
      total += c;
      if (c > 0) ++nonzero;
    }
  }
  CHECK(total == 25);
  CHECK(nonzero == 1);
  CHECK(grid.counts[5][5] == 25);  // 0.52 falls in bin floor(0.52*10) = 5

  CHECK_THROWS_AS(ftql::heatmap(batch, 99, 10), std::out_of_range);
  CHECK_THROWS_AS(ftql::heatmap({}, 1, 10), std::invalid_argument);
  CHECK_THROWS_AS(ftql::heatmap(batch, 5, 0), std::invalid_argument);
}

TEST_CASE("corner strategies land in the edge bins") {
  std::vector<MixedProfile> corner(3, MixedProfile{{1.0, 0.0}, {0.0, 1.0}});
  std::vector<TrajectoryRecord> batch(4, make_record(corner));
  ftql::HeatmapGrid grid = ftql::heatmap(batch, 2, 25);
  // x1(a1) = 1 clamps into the last bin, x2(b1) = 0 into the first
  CHECK(grid.counts[24][0] == 4);
}
