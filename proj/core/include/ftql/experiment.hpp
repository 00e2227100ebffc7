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

#ifndef FTQL_EXPERIMENT_HPP_
#define FTQL_EXPERIMENT_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftql/analysis.hpp"
#include "ftql/dynamics.hpp"
#include "json.hpp"

namespace ftql {

// Malformed or semantically invalid configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failure reading or writing run artifacts (CLI exit code 3).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InitSpec {
  enum class Kind { kScoresUniform, kStrategy };
  Kind kind = Kind::kScoresUniform;
  double lo = 0.0;  // scores-uniform bounds
  double hi = 1.0;
  MixedProfile strategy;  // strategy init
};

struct ClassifySettings {
  double eps = 0.01;
  int dwell = 0;  // resolved to ceil(horizon/10) when left at 0
};

// A fully validated experiment description. `canonical()` is the config with
// every default materialized and the game inlined; re-parsing it yields the
// same canonical form, and `hash()` (FNV-1a over the canonical dump) stamps
// every artifact the run emits.
//
// Config keys (JSON): game (inline or {"path": ...}), game_quantizer?,
// regularizer, quantizer?, feedback, noise?, schedule?, horizon,
// trajectories?, init?, seed?, log_stride?, classify?, log?, emit?,
// output_dir?. Unknown keys anywhere are rejected.
class ExperimentConfig {
 public:
  static ExperimentConfig load(const std::string& path,
                               const std::vector<std::string>& overrides = {});
  static ExperimentConfig from_json(nlohmann::json j,
                                    const std::string& base_dir = ".");

  const nlohmann::json& canonical() const { return canonical_; }
  const std::string& hash() const { return hash_; }

  // The game actually played (after game_quantizer, when present).
  const Game& game() const { return *game_; }
  const Game& configured_game() const { return *raw_game_; }
  const std::optional<QuantizationScheme>& game_quantizer() const {
    return game_quantizer_;
  }
  const Regularizer& regularizer() const { return *regularizer_; }
  const FeedbackChannel& feedback() const { return feedback_; }
  const Schedule& schedule() const { return schedule_; }
  int horizon() const { return horizon_; }
  int trajectories() const { return trajectories_; }
  const InitSpec& init() const { return init_; }
  std::uint64_t base_seed() const { return base_seed_; }
  int log_stride() const { return log_stride_; }
  const LogOptions& log_options() const { return log_options_; }
  const ClassifySettings& classify() const { return classify_; }
  bool emit_trajectories() const { return emit_trajectories_; }
  bool emit_rate_fits() const { return emit_rate_fits_; }
  const std::string& output_dir() const { return output_dir_; }

 private:
  ExperimentConfig() = default;

  nlohmann::json canonical_;
  std::string hash_;
  std::optional<Game> game_;
  std::optional<Game> raw_game_;
  std::optional<QuantizationScheme> game_quantizer_;
  std::optional<Regularizer> regularizer_;
  FeedbackChannel feedback_;
  Schedule schedule_;
  int horizon_ = 1;
  int trajectories_ = 1;
  InitSpec init_;
  std::uint64_t base_seed_ = 0;
  int log_stride_ = 1;
  LogOptions log_options_;
  ClassifySettings classify_;
  bool emit_trajectories_ = false;
  bool emit_rate_fits_ = true;
  std::string output_dir_ = "ftql-out";
};

// Applies one "dotted.path=value" assignment to a raw config object. Values
// parse as JSON when possible and fall back to plain strings.
void apply_override(nlohmann::json* config, const std::string& assignment);

struct TrajectoryResult {
  TrajectoryRecord record;
  ConvergenceVerdict verdict;
};

// Runs one trajectory with its own RNG stream seeded by `seed`. Draw order:
// initial scores player-major (scores-uniform init only), then per stage all
// action draws in player order followed by all noise draws in player order.
TrajectoryResult run_trajectory(const ExperimentConfig& cfg,
                                std::uint64_t seed);

struct BatchResult {
  std::vector<TrajectoryResult> results;
};

// Trajectory i uses seed base_seed + i, so worker count cannot change any
// result. workers <= 0 picks default_worker_count().
BatchResult run_batch(const ExperimentConfig& cfg, int workers = 0);

// FTQL_WORKERS environment variable, else hardware concurrency.
int default_worker_count();

// Deterministic serialization helpers: doubles at full precision (%.17g),
// JSON with sorted keys, so identical runs emit byte-identical artifacts.
std::string format_double(double v);
std::string verdicts_csv(const ExperimentConfig& cfg, const BatchResult& batch);
std::string rate_fits_csv(const ExperimentConfig& cfg, const BatchResult& batch);
std::string trajectories_csv(const ExperimentConfig& cfg,
                             const BatchResult& batch);
nlohmann::json batch_summary(const ExperimentConfig& cfg,
                             const BatchResult& batch);
nlohmann::json heatmap_json(const HeatmapGrid& grid,
                            const ExperimentConfig& cfg);

std::string read_text_file(const std::string& path);   // IoError on failure
void write_text_file(const std::string& path, const std::string& content);
void ensure_directory(const std::string& path);

}  // namespace ftql

#endif  // FTQL_EXPERIMENT_HPP_
