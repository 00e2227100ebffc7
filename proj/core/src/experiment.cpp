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

#include "ftql/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <utility>

#include "ftql/rng.hpp"

namespace ftql {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
  throw ConfigError("config: " + message);
}

const json& member(const json& obj, const std::string& key,
                   const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + ": missing required key \"" + key + "\"");
  return *it;
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) fail(path + ": unknown key \"" + it.key() + "\"");
  }
}

const json& expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path + ": expected an object");
  return j;
}

double expect_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path + ": expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) fail(path + ": expected a finite number");
  return v;
}

std::int64_t expect_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path + ": expected an integer");
  return j.get<std::int64_t>();
}

std::uint64_t expect_unsigned(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  fail(path + ": expected a non-negative integer");
}

std::string expect_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path + ": expected a string");
  return j.get<std::string>();
}

bool expect_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path + ": expected a boolean");
  return j.get<bool>();
}

double default_quantizer_error(RoundingRule rule) {
  switch (rule) {
    case RoundingRule::kIdentity:
      return 0.0;
    case RoundingRule::kHalfAway:
      return 1.0;
    case RoundingRule::kEvenAway:
    case RoundingRule::kFloor:
      return 2.0;
  }
  return 0.0;
}

QuantizationScheme parse_quantizer(const json& j, const std::string& path) {
  if (j.is_string()) {
    // shorthand: a bare rule name picks the conventional grid for that rule
    try {
      RoundingRule rule = rounding_rule_from_string(j.get<std::string>());
      return QuantizationScheme(rule, default_quantizer_error(rule));
    } catch (const std::invalid_argument& e) {
      fail(path + ": " + e.what());
    }
  }
  expect_object(j, path);
  reject_unknown_keys(j, path, {"rule", "error"});
  RoundingRule rule = RoundingRule::kIdentity;
  try {
    rule = rounding_rule_from_string(
        expect_string(member(j, "rule", path), path + ".rule"));
  } catch (const std::invalid_argument& e) {
    fail(path + ".rule: " + e.what());
  }
  double error = default_quantizer_error(rule);
  if (j.contains("error")) {
    error = expect_number(j.at("error"), path + ".error");
  }
  try {
    return QuantizationScheme(rule, error);
  } catch (const std::invalid_argument& e) {
    fail(path + ": " + e.what());
  }
}

json quantizer_to_json(const QuantizationScheme& q) {
  return json{{"rule", to_string(q.rule())}, {"error", q.error()}};
}

std::string dirname_of(const std::string& path) {
  std::filesystem::path p(path);
  auto parent = p.parent_path();
  return parent.empty() ? std::string(".") : parent.string();
}

std::string config_hash_of(const json& canonical) {
  const std::string dump = canonical.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace

ExperimentConfig ExperimentConfig::load(
    const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    fail("\"" + path + "\" is not valid JSON: " + e.what());
  }
  for (const std::string& assignment : overrides) {
    apply_override(&j, assignment);
  }
  return from_json(std::move(j), dirname_of(path));
}

ExperimentConfig ExperimentConfig::from_json(json j,
                                             const std::string& base_dir) {
  expect_object(j, "$");
  reject_unknown_keys(
      j, "$",
      {"game", "game_quantizer", "regularizer", "quantizer", "feedback",
       "noise", "schedule", "horizon", "trajectories", "init", "seed",
       "log_stride", "classify", "log", "emit", "output_dir"});

  ExperimentConfig cfg;

  // game: inline object or {"path": relative-to-config-file}
  json game_json = member(j, "game", "$");
  expect_object(game_json, "$.game");
  if (game_json.contains("path")) {
    reject_unknown_keys(game_json, "$.game", {"path"});
    std::string rel = expect_string(game_json.at("path"), "$.game.path");
    std::filesystem::path p(rel);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    std::ifstream in(p, std::ios::binary);
    if (!in) fail("$.game.path: cannot read \"" + p.string() + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      game_json = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      fail("$.game.path: \"" + p.string() + "\" is not valid JSON: " +
           std::string(e.what()));
    }
  }
  try {
    cfg.raw_game_ = Game::from_json(game_json);
  } catch (const std::invalid_argument& e) {
    fail(std::string("$.game: ") + e.what());
  }

  // game_quantizer: optional transform applied to the payoff tensors once,
  // before play, producing the game the learners actually face.
  if (j.contains("game_quantizer")) {
    cfg.game_quantizer_ = parse_quantizer(j.at("game_quantizer"),
                                          "$.game_quantizer");
    cfg.game_ = cfg.raw_game_->quantized(*cfg.game_quantizer_);
  } else {
    cfg.game_ = *cfg.raw_game_;
  }

  // regularizer
  {
    std::string name =
        expect_string(member(j, "regularizer", "$"), "$.regularizer");
    try {
      RegularizerKind kind = regularizer_kind_from_string(name);
      cfg.regularizer_ = kind == RegularizerKind::kEntropic
                             ? Regularizer::entropic()
                             : Regularizer::euclidean();
    } catch (const std::invalid_argument& e) {
      fail(std::string("$.regularizer: ") + e.what());
    }
  }

  // quantizer (feedback quantizer; defaults to identity)
  QuantizationScheme quantizer;
  if (j.contains("quantizer")) {
    quantizer = parse_quantizer(j.at("quantizer"), "$.quantizer");
  }

  // noise
  NoiseModel noise;
  if (j.contains("noise")) {
    const json& nj = expect_object(j.at("noise"), "$.noise");
    reject_unknown_keys(nj, "$.noise", {"kind", "halfwidth", "sigma"});
    std::string kind =
        expect_string(member(nj, "kind", "$.noise"), "$.noise.kind");
    try {
      noise.kind = noise_kind_from_string(kind);
    } catch (const std::invalid_argument& e) {
      fail(std::string("$.noise.kind: ") + e.what());
    }
    switch (noise.kind) {
      case NoiseKind::kNone:
        reject_unknown_keys(nj, "$.noise", {"kind"});
        noise.parameter = 0.0;
        break;
      case NoiseKind::kUniform:
        reject_unknown_keys(nj, "$.noise", {"kind", "halfwidth"});
        noise.parameter =
            expect_number(member(nj, "halfwidth", "$.noise"),
                          "$.noise.halfwidth");
        if (noise.parameter <= 0.0) fail("$.noise.halfwidth: must be > 0");
        break;
      case NoiseKind::kGaussian:
        reject_unknown_keys(nj, "$.noise", {"kind", "sigma"});
        noise.parameter =
            expect_number(member(nj, "sigma", "$.noise"), "$.noise.sigma");
        if (noise.parameter <= 0.0) fail("$.noise.sigma: must be > 0");
        break;
    }
  }

  // feedback
  {
    std::string mode =
        expect_string(member(j, "feedback", "$"), "$.feedback");
    try {
      cfg.feedback_.mode = feedback_mode_from_string(mode);
    } catch (const std::invalid_argument& e) {
      fail(std::string("$.feedback: ") + e.what());
    }
    cfg.feedback_.quantizer = quantizer;
    cfg.feedback_.noise = noise;
    try {
      cfg.feedback_.validate();
    } catch (const std::invalid_argument& e) {
      fail(std::string("$.feedback: ") + e.what());
    }
  }

  // schedule
  if (j.contains("schedule")) {
    const json& sj = expect_object(j.at("schedule"), "$.schedule");
    reject_unknown_keys(sj, "$.schedule", {"g0", "p", "e0", "q"});
    if (sj.contains("g0"))
      cfg.schedule_.step_coefficient = expect_number(sj.at("g0"),
                                                     "$.schedule.g0");
    if (sj.contains("p"))
      cfg.schedule_.step_exponent = expect_number(sj.at("p"), "$.schedule.p");
    if (sj.contains("e0"))
      cfg.schedule_.exploration_coefficient =
          expect_number(sj.at("e0"), "$.schedule.e0");
    if (sj.contains("q"))
      cfg.schedule_.exploration_exponent =
          expect_number(sj.at("q"), "$.schedule.q");
    if (cfg.schedule_.step_coefficient <= 0.0) fail("$.schedule.g0: must be > 0");
    if (cfg.schedule_.step_exponent < 0.0 || cfg.schedule_.step_exponent > 1.0)
      fail("$.schedule.p: must lie in [0, 1]");
    if (cfg.schedule_.exploration_coefficient <= 0.0 ||
        cfg.schedule_.exploration_coefficient > 1.0)
      fail("$.schedule.e0: must lie in (0, 1]");
    if (cfg.schedule_.exploration_exponent < 0.0)
      fail("$.schedule.q: must be >= 0");
  }

  // horizon / trajectories / seed
  {
    std::int64_t h = expect_integer(member(j, "horizon", "$"), "$.horizon");
    if (h < 1 || h > 100000000) fail("$.horizon: must lie in [1, 1e8]");
    cfg.horizon_ = static_cast<int>(h);
  }
  if (j.contains("trajectories")) {
    std::int64_t t = expect_integer(j.at("trajectories"), "$.trajectories");
    if (t < 1 || t > 1000000) fail("$.trajectories: must lie in [1, 1e6]");
    cfg.trajectories_ = static_cast<int>(t);
  }
  if (j.contains("seed")) {
    cfg.base_seed_ = expect_unsigned(j.at("seed"), "$.seed");
  }

  // init
  if (j.contains("init")) {
    const json& ij = expect_object(j.at("init"), "$.init");
    reject_unknown_keys(ij, "$.init", {"scores-uniform", "strategy"});
    if (ij.size() != 1)
      fail("$.init: expected exactly one of \"scores-uniform\", \"strategy\"");
    if (ij.contains("scores-uniform")) {
      const json& range = ij.at("scores-uniform");
      if (!range.is_array() || range.size() != 2)
        fail("$.init.scores-uniform: expected [lo, hi]");
      cfg.init_.kind = InitSpec::Kind::kScoresUniform;
      cfg.init_.lo = expect_number(range.at(0), "$.init.scores-uniform[0]");
      cfg.init_.hi = expect_number(range.at(1), "$.init.scores-uniform[1]");
      if (cfg.init_.lo > cfg.init_.hi)
        fail("$.init.scores-uniform: lo must be <= hi");
    } else {
      const json& sj = ij.at("strategy");
      if (!sj.is_array()) fail("$.init.strategy: expected an array per player");
      cfg.init_.kind = InitSpec::Kind::kStrategy;
      cfg.init_.strategy.clear();
      for (std::size_t i = 0; i < sj.size(); ++i) {
        const json& row = sj.at(i);
        std::string path =
            "$.init.strategy[" + std::to_string(i) + "]";
        if (!row.is_array()) fail(path + ": expected an array of weights");
        std::vector<double> x;
        for (std::size_t a = 0; a < row.size(); ++a) {
          x.push_back(
              expect_number(row.at(a), path + "[" + std::to_string(a) + "]"));
        }
        cfg.init_.strategy.push_back(std::move(x));
      }
    }
  }
  if (cfg.init_.kind == InitSpec::Kind::kStrategy) {
    const Game& g = *cfg.game_;
    if (static_cast<int>(cfg.init_.strategy.size()) != g.num_players())
      fail("$.init.strategy: expected one row per player");
    for (int i = 0; i < g.num_players(); ++i) {
      const std::vector<double>& x = cfg.init_.strategy[i];
      if (static_cast<int>(x.size()) != g.num_actions(i))
        fail("$.init.strategy[" + std::to_string(i) +
             "]: wrong number of weights");
      if (!in_simplex(x))
        fail("$.init.strategy[" + std::to_string(i) +
             "]: not a point of the simplex");
      if (cfg.regularizer_->steep()) {
        for (double v : x) {
          if (v <= 0.0)
            fail("$.init.strategy[" + std::to_string(i) +
                 "]: a steep regularizer needs an interior point");
        }
      }
    }
  }

  // log_stride: default keeps at most ~1e4 logged stages per trajectory.
  if (j.contains("log_stride")) {
    std::int64_t s = expect_integer(j.at("log_stride"), "$.log_stride");
    if (s < 1 || s > cfg.horizon_)
      fail("$.log_stride: must lie in [1, horizon]");
    cfg.log_stride_ = static_cast<int>(s);
  } else {
    cfg.log_stride_ =
        cfg.horizon_ <= 10000 ? 1 : (cfg.horizon_ + 9999) / 10000;
  }

  // classify
  cfg.classify_.dwell = 0;
  if (j.contains("classify")) {
    const json& cj = expect_object(j.at("classify"), "$.classify");
    reject_unknown_keys(cj, "$.classify", {"eps", "dwell"});
    if (cj.contains("eps"))
      cfg.classify_.eps = expect_number(cj.at("eps"), "$.classify.eps");
    if (cj.contains("dwell")) {
      std::int64_t d = expect_integer(cj.at("dwell"), "$.classify.dwell");
      if (d < 1 || d > cfg.horizon_)
        fail("$.classify.dwell: must lie in [1, horizon]");
      cfg.classify_.dwell = static_cast<int>(d);
    }
  }
  if (cfg.classify_.eps <= 0.0 || cfg.classify_.eps >= 1.0)
    fail("$.classify.eps: must lie in (0, 1)");
  if (cfg.classify_.dwell == 0) {
    cfg.classify_.dwell = (cfg.horizon_ + 9) / 10;
    if (cfg.classify_.dwell < 1) cfg.classify_.dwell = 1;
  }

  // log / emit / output_dir
  if (j.contains("log")) {
    const json& lj = expect_object(j.at("log"), "$.log");
    reject_unknown_keys(lj, "$.log", {"scores", "sampling", "actions"});
    if (lj.contains("scores"))
      cfg.log_options_.scores = expect_bool(lj.at("scores"), "$.log.scores");
    if (lj.contains("sampling"))
      cfg.log_options_.sampling =
          expect_bool(lj.at("sampling"), "$.log.sampling");
    if (lj.contains("actions"))
      cfg.log_options_.actions =
          expect_bool(lj.at("actions"), "$.log.actions");
  }
  if (cfg.log_options_.sampling &&
      cfg.feedback_.mode != FeedbackMode::kBanditIwe)
    fail("$.log.sampling: only bandit-iwe feedback has a sampling strategy");
  if (j.contains("emit")) {
    const json& ej = expect_object(j.at("emit"), "$.emit");
    reject_unknown_keys(ej, "$.emit", {"trajectories", "rate_fits"});
    if (ej.contains("trajectories"))
      cfg.emit_trajectories_ =
          expect_bool(ej.at("trajectories"), "$.emit.trajectories");
    if (ej.contains("rate_fits"))
      cfg.emit_rate_fits_ =
          expect_bool(ej.at("rate_fits"), "$.emit.rate_fits");
  }
  if (j.contains("output_dir")) {
    cfg.output_dir_ = expect_string(j.at("output_dir"), "$.output_dir");
    if (cfg.output_dir_.empty()) fail("$.output_dir: must be non-empty");
  }

  // Canonical form: every default materialized, game inlined.
  json canon;
  canon["game"] = cfg.raw_game_->to_json();
  if (cfg.game_quantizer_)
    canon["game_quantizer"] = quantizer_to_json(*cfg.game_quantizer_);
  canon["regularizer"] = to_string(cfg.regularizer_->kind());
  canon["quantizer"] = quantizer_to_json(cfg.feedback_.quantizer);
  canon["feedback"] = to_string(cfg.feedback_.mode);
  canon["noise"] = json{{"kind", to_string(cfg.feedback_.noise.kind)}};
  if (cfg.feedback_.noise.kind == NoiseKind::kUniform)
    canon["noise"]["halfwidth"] = cfg.feedback_.noise.parameter;
  if (cfg.feedback_.noise.kind == NoiseKind::kGaussian)
    canon["noise"]["sigma"] = cfg.feedback_.noise.parameter;
  canon["schedule"] = json{{"g0", cfg.schedule_.step_coefficient},
                           {"p", cfg.schedule_.step_exponent},
                           {"e0", cfg.schedule_.exploration_coefficient},
                           {"q", cfg.schedule_.exploration_exponent}};
  canon["horizon"] = cfg.horizon_;
  canon["trajectories"] = cfg.trajectories_;
  if (cfg.init_.kind == InitSpec::Kind::kScoresUniform) {
    canon["init"] = json{{"scores-uniform", {cfg.init_.lo, cfg.init_.hi}}};
  } else {
    canon["init"] = json{{"strategy", cfg.init_.strategy}};
  }
  canon["seed"] = cfg.base_seed_;
  canon["log_stride"] = cfg.log_stride_;
  canon["classify"] =
      json{{"eps", cfg.classify_.eps}, {"dwell", cfg.classify_.dwell}};
  canon["log"] = json{{"scores", cfg.log_options_.scores},
                      {"sampling", cfg.log_options_.sampling},
                      {"actions", cfg.log_options_.actions}};
  canon["emit"] = json{{"trajectories", cfg.emit_trajectories_},
                       {"rate_fits", cfg.emit_rate_fits_}};
  canon["output_dir"] = cfg.output_dir_;
  cfg.canonical_ = std::move(canon);
  cfg.hash_ = config_hash_of(cfg.canonical_);
  return cfg;
}

void apply_override(json* config, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    fail("--set expects key.path=value, got \"" + assignment + "\"");
  std::string keypath = assignment.substr(0, eq);
  std::string value_text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(value_text);
  } catch (const json::parse_error&) {
    value = value_text;  // bare strings need no quotes
  }
  if (!config->is_object()) fail("--set target is not an object");
  json* node = config;
  std::size_t start = 0;
  while (true) {
    std::size_t dot = keypath.find('.', start);
    std::string key = keypath.substr(
        start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty())
      fail("--set key path has an empty segment: \"" + keypath + "\"");
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    json& next = (*node)[key];
    if (next.is_null()) next = json::object();
    if (!next.is_object())
      fail("--set cannot descend into non-object at \"" + key + "\"");
    node = &next;
    start = dot + 1;
  }
}

TrajectoryResult run_trajectory(const ExperimentConfig& cfg,
                                std::uint64_t seed) {
  const Game& game = cfg.game();
  const Regularizer& reg = cfg.regularizer();
  const Schedule& schedule = cfg.schedule();
  const FeedbackChannel& channel = cfg.feedback();
  Rng rng(seed);

  std::vector<std::vector<double>> scores(game.num_players());
  if (cfg.init().kind == InitSpec::Kind::kScoresUniform) {
    for (int i = 0; i < game.num_players(); ++i) {
      scores[i].resize(game.num_actions(i));
      for (double& y : scores[i]) y = rng.uniform(cfg.init().lo, cfg.init().hi);
    }
  } else {
    for (int i = 0; i < game.num_players(); ++i) {
      scores[i] = reg.initial_scores(cfg.init().strategy[i]);
    }
  }

  LearnerState state =
      make_initial_state(game, reg, schedule, channel, std::move(scores));

  TrajectoryResult out;
  out.record.config_hash = cfg.hash();
  out.record.seed = seed;
  out.record.horizon = cfg.horizon();
  out.record.log_stride = cfg.log_stride();
  out.record.logged = cfg.log_options();
  const int horizon = cfg.horizon();
  const int stride = cfg.log_stride();
  const LogOptions& opts = cfg.log_options();
  out.record.stages.reserve(
      static_cast<std::size_t>((horizon + stride - 1) / stride) + 1);

  for (int n = 1; n <= horizon; ++n) {
    const bool log_this = ((n - 1) % stride == 0) || n == horizon;
    StageLog log;
    if (log_this) {
      log.stage = n;
      log.x = state.strategies;
      if (opts.scores) log.y = state.scores;
      if (opts.sampling) log.x_hat = state.sampling;
    }
    if (n < horizon) {
      StepTrace trace;
      state = ftql_step(state, game, reg, schedule, channel, rng,
                        opts.actions ? &trace : nullptr);
      if (log_this && opts.actions) {
        log.actions = std::move(trace.actions);
        log.realized_payoffs = std::move(trace.realized_payoffs);
      }
    }
    if (log_this) out.record.stages.push_back(std::move(log));
  }

  out.verdict = classify_trajectory(out.record, game, cfg.classify().eps,
                                    cfg.classify().dwell);
  return out;
}

int default_worker_count() {
  if (const char* env = std::getenv("FTQL_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 256)
      return static_cast<int>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  if (hc == 0) hc = 1;
  if (hc > 16) hc = 16;
  return static_cast<int>(hc);
}

BatchResult run_batch(const ExperimentConfig& cfg, int workers) {
  if (workers <= 0) workers = default_worker_count();
  const int count = cfg.trajectories();
  if (workers > count) workers = count;

  BatchResult batch;
  batch.results.resize(count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) {
      batch.results[i] = run_trajectory(cfg, cfg.base_seed() + i);
    }
    return batch;
  }

  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        batch.results[i] = run_trajectory(cfg, cfg.base_seed() + i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return batch;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

std::string verdicts_csv(const ExperimentConfig& cfg,
                         const BatchResult& batch) {
  std::string out = "seed,target,entered_at,final_distance\n";
  for (const TrajectoryResult& r : batch.results) {
    out += std::to_string(r.record.seed);
    out += ',';
    if (r.verdict.target) out += cfg.game().profile_label(*r.verdict.target);
    out += ',';
    if (r.verdict.entered_at) out += std::to_string(*r.verdict.entered_at);
    out += ',';
    out += format_double(r.verdict.final_distance);
    out += '\n';
  }
  return out;
}

std::string rate_fits_csv(const ExperimentConfig& cfg,
                          const BatchResult& batch) {
  std::string out =
      "seed,target,exponent,slope,intercept,r_squared,points,conforming\n";
  if (!cfg.regularizer().steep()) return out;
  for (const TrajectoryResult& r : batch.results) {
    if (!r.verdict.target) continue;
    RateFit fit;
    try {
      fit = fit_rate(r.record, *r.verdict.target, cfg.regularizer(),
                     cfg.schedule());
    } catch (const std::exception&) {
      continue;  // too few usable points for this trajectory
    }
    out += std::to_string(r.record.seed);
    out += ',';
    out += cfg.game().profile_label(*r.verdict.target);
    out += ',';
    out += format_double(fit.exponent);
    out += ',';
    out += format_double(fit.slope);
    out += ',';
    out += format_double(fit.intercept);
    out += ',';
    out += format_double(fit.r_squared);
    out += ',';
    out += std::to_string(fit.points);
    out += ',';
    out += fit.conforming ? "true" : "false";
    out += '\n';
  }
  return out;
}

std::string trajectories_csv(const ExperimentConfig& cfg,
                             const BatchResult& batch) {
  const Game& game = cfg.game();
  const LogOptions& opts = cfg.log_options();
  std::string out = "trajectory,seed,stage";
  for (int i = 0; i < game.num_players(); ++i) {
    for (int a = 0; a < game.num_actions(i); ++a) {
      out += ",x" + std::to_string(i + 1) + "_" + std::to_string(a);
    }
  }
  if (opts.scores) {
    for (int i = 0; i < game.num_players(); ++i) {
      for (int a = 0; a < game.num_actions(i); ++a) {
        out += ",y" + std::to_string(i + 1) + "_" + std::to_string(a);
      }
    }
  }
  if (opts.sampling) {
    for (int i = 0; i < game.num_players(); ++i) {
      for (int a = 0; a < game.num_actions(i); ++a) {
        out += ",xhat" + std::to_string(i + 1) + "_" + std::to_string(a);
      }
    }
  }
  if (opts.actions) {
    for (int i = 0; i < game.num_players(); ++i)
      out += ",action" + std::to_string(i + 1);
    for (int i = 0; i < game.num_players(); ++i)
      out += ",payoff" + std::to_string(i + 1);
  }
  out += '\n';

  for (std::size_t t = 0; t < batch.results.size(); ++t) {
    const TrajectoryRecord& rec = batch.results[t].record;
    for (const StageLog& s : rec.stages) {
      out += std::to_string(t);
      out += ',';
      out += std::to_string(rec.seed);
      out += ',';
      out += std::to_string(s.stage);
      for (const auto& row : s.x) {
        for (double v : row) {
          out += ',';
          out += format_double(v);
        }
      }
      if (opts.scores) {
        for (const auto& row : s.y) {
          for (double v : row) {
            out += ',';
            out += format_double(v);
          }
        }
      }
      if (opts.sampling) {
        for (const auto& row : s.x_hat) {
          for (double v : row) {
            out += ',';
            out += format_double(v);
          }
        }
      }
      if (opts.actions) {
        // the horizon stage takes no step, so it logs no draws
        const bool have = !s.actions.empty();
        for (int i = 0; i < game.num_players(); ++i) {
          out += ',';
          if (have) out += std::to_string(s.actions[i]);
        }
        for (int i = 0; i < game.num_players(); ++i) {
          out += ',';
          if (have) out += format_double(s.realized_payoffs[i]);
        }
      }
      out += '\n';
    }
  }
  return out;
}

nlohmann::json batch_summary(const ExperimentConfig& cfg,
                             const BatchResult& batch) {
  const Game& game = cfg.game();
  std::map<std::string, int> targets;
  std::map<std::string, int> nearest;
  int converged = 0;
  double distance_sum = 0.0;
  for (const TrajectoryResult& r : batch.results) {
    if (r.verdict.target) {
      ++converged;
      ++targets[game.profile_label(*r.verdict.target)];
    }
    ++nearest[game.profile_label(r.verdict.nearest_at_horizon)];
    distance_sum += r.verdict.final_distance;
  }
  const std::size_t count = batch.results.size();
  json out;
  out["config_hash"] = cfg.hash();
  out["base_seed"] = cfg.base_seed();
  out["trajectories"] = static_cast<int>(count);
  out["horizon"] = cfg.horizon();
  out["regularizer"] = to_string(cfg.regularizer().kind());
  out["feedback"] = to_string(cfg.feedback().mode);
  out["ell"] = cfg.feedback().quantizer.error();
  out["schedule"] = json{{"g0", cfg.schedule().step_coefficient},
                         {"p", cfg.schedule().step_exponent},
                         {"e0", cfg.schedule().exploration_coefficient},
                         {"q", cfg.schedule().exploration_exponent},
                         {"valid", cfg.schedule().is_valid()}};
  out["classify"] = json{{"eps", cfg.classify().eps},
                         {"dwell", cfg.classify().dwell}};
  out["converged"] = converged;
  out["converged_fraction"] =
      count == 0 ? 0.0 : static_cast<double>(converged) / count;
  out["mean_final_distance"] =
      count == 0 ? 0.0 : distance_sum / static_cast<double>(count);
  out["targets"] = json::object();
  for (const auto& [label, n] : targets) out["targets"][label] = n;
  out["nearest_at_horizon"] = json::object();
  for (const auto& [label, n] : nearest) out["nearest_at_horizon"][label] = n;
  return out;
}

nlohmann::json heatmap_json(const HeatmapGrid& grid,
                            const ExperimentConfig& cfg) {
  json out;
  out["bins"] = grid.bins;
  out["stage"] = grid.stage;
  out["ell"] = cfg.feedback().quantizer.error();
  out["counts"] = grid.counts;
  out["config_hash"] = cfg.hash();
  out["base_seed"] = cfg.base_seed();
  out["trajectories"] = cfg.trajectories();
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open \"" + path + "\" for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing \"" + path + "\"");
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec)
    throw IoError("cannot create directory \"" + path + "\": " + ec.message());
}

}  // namespace ftql
