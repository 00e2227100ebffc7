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

// ftql command-line front end.
//
//   ftql run <config.json> [--set k.ey=value ...] [--out DIR] [--workers N]
//   ftql validate-config <config.json> [--set ...]
//   ftql replay-example <ex1-i|ex1-ii|ex2-i|ex2-ii> [--config-dir DIR]
//   ftql reproduce-figure <out-dir> [--scale S] [--bins B] [--config-dir DIR]
//
// Exit codes: 0 success, 1 failed predicate or internal error, 2 bad
// config, 3 I/O failure. Canned example configs live in configs/ (override
// with --config-dir or the FTQL_CONFIG_DIR environment variable); the
// default worker count comes from FTQL_WORKERS.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ftql/analysis.hpp"
#include "ftql/experiment.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

void print_error(const std::string& type, const std::string& message) {
  json err{{"error", {{"type", type}, {"message", message}}}};
  std::fprintf(stderr, "%s\n", err.dump().c_str());
}

std::string resolve_config_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("FTQL_CONFIG_DIR")) return env;
  return "configs";
}

void warn_if_invalid_schedule(const ftql::ExperimentConfig& cfg) {
  const ftql::Schedule& s = cfg.schedule();
  if (s.is_valid()) return;
  std::fprintf(stderr,
               "warning: schedule g0=%g p=%g e0=%g q=%g violates the "
               "step/exploration conditions (p <= 1, p + q > 1, 2p - 2q > 1); "
               "running anyway\n",
               s.step_coefficient, s.step_exponent, s.exploration_coefficient,
               s.exploration_exponent);
}

int cmd_run(const std::string& config_path,
            const std::vector<std::string>& overrides, std::string out_dir,
            int workers) {
  ftql::ExperimentConfig cfg = ftql::ExperimentConfig::load(config_path,
                                                            overrides);
  if (out_dir.empty()) out_dir = cfg.output_dir();
  warn_if_invalid_schedule(cfg);

  ftql::BatchResult batch = ftql::run_batch(cfg, workers);

  ftql::ensure_directory(out_dir);
  ftql::write_text_file(out_dir + "/config_echo.json",
                        cfg.canonical().dump(2) + "\n");
  ftql::write_text_file(out_dir + "/verdicts.csv",
                        ftql::verdicts_csv(cfg, batch));
  if (cfg.regularizer().steep() && cfg.emit_rate_fits()) {
    ftql::write_text_file(out_dir + "/rate_fits.csv",
                          ftql::rate_fits_csv(cfg, batch));
  }
  if (cfg.emit_trajectories()) {
    ftql::write_text_file(out_dir + "/trajectories.csv",
                          ftql::trajectories_csv(cfg, batch));
  }
  json summary = ftql::batch_summary(cfg, batch);
  ftql::write_text_file(out_dir + "/summary.json", summary.dump(2) + "\n");

  std::printf("run %s: %d trajectories, horizon %d, converged %d/%d, "
              "artifacts in %s\n",
              cfg.hash().c_str(), cfg.trajectories(), cfg.horizon(),
              summary["converged"].get<int>(), cfg.trajectories(),
              out_dir.c_str());
  return 0;
}

int cmd_validate(const std::string& config_path,
                 const std::vector<std::string>& overrides) {
  ftql::ExperimentConfig cfg = ftql::ExperimentConfig::load(config_path,
                                                            overrides);
  std::printf("valid: config hash %s\n", cfg.hash().c_str());
  return 0;
}

int cmd_replay(const std::string& name, const std::string& dir_flag) {
  const std::vector<std::string> known = {"ex1-i", "ex1-ii", "ex2-i",
                                          "ex2-ii"};
  if (std::find(known.begin(), known.end(), name) == known.end()) {
    throw ftql::ConfigError(
        "replay-example: unknown name \"" + name +
        "\" (expected ex1-i, ex1-ii, ex2-i, or ex2-ii)");
  }
  const std::string dir = resolve_config_dir(dir_flag);
  ftql::ExperimentConfig cfg =
      ftql::ExperimentConfig::load(dir + "/" + name + ".json");
  ftql::TrajectoryResult res = ftql::run_trajectory(cfg, cfg.base_seed());

  bool pass = false;
  std::string predicate;
  if (name == "ex1-i" || name == "ex2-i") {
    predicate = "x_n equals x_1 bitwise at every logged stage through " +
                std::to_string(cfg.horizon()) + " and no target is reached";
    bool frozen = true;
    const auto& first = res.record.stages.front().x;
    for (const ftql::StageLog& s : res.record.stages) {
      if (s.x != first) {
        frozen = false;
        break;
      }
    }
    pass = frozen && !res.verdict.target;
  } else {
    const int deadline = name == "ex1-ii" ? 50 : 200;
    const ftql::PureProfile want = {0, 1};  // (a1, b2)
    predicate = "target (" + cfg.game().action_labels(0)[0] + "," +
                cfg.game().action_labels(1)[1] + ") with eps " +
                ftql::format_double(cfg.classify().eps) +
                ", entered by stage " + std::to_string(deadline);
    pass = res.verdict.target.has_value() && *res.verdict.target == want &&
           res.verdict.entered_at.has_value() &&
           *res.verdict.entered_at <= deadline;
  }
  std::printf("replay-example %s: checked: %s\n", name.c_str(),
              predicate.c_str());
  std::printf("replay-example %s: %s\n", name.c_str(),
              pass ? "PASS" : "FAIL");
  return pass ? 0 : 1;
}

std::string ell_label(double ell) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", ell);
  return buf;
}

int cmd_reproduce(const std::string& out_dir, double scale, int bins,
                  const std::string& dir_flag, int workers) {
  if (!(scale > 0.0 && scale <= 1.0))
    throw ftql::ConfigError("reproduce-figure: --scale must lie in (0, 1]");
  if (bins < 1)
    throw ftql::ConfigError("reproduce-figure: --bins must be >= 1");
  const std::string dir = resolve_config_dir(dir_flag);
  const int horizon = std::max(1, static_cast<int>(std::lround(2000 * scale)));
  const int trajectories =
      std::max(1, static_cast<int>(std::lround(500 * scale)));
  // the dwell window shrinks with the horizon or the config would reject it
  const int dwell = std::max(1, (horizon + 9) / 10);

  std::vector<int> stages = {1, std::min(50, horizon), horizon};
  stages.erase(std::unique(stages.begin(), stages.end()), stages.end());

  ftql::ensure_directory(out_dir);
  json manifest;
  manifest["scale"] = scale;
  manifest["bins"] = bins;
  manifest["horizon"] = horizon;
  manifest["trajectories"] = trajectories;
  manifest["stages"] = stages;
  manifest["files"] = json::array();

  int written = 0;
  for (double ell : {0.0, 1.5, 4.0}) {
    std::vector<std::string> overrides = {
        "quantizer.error=" + ftql::format_double(ell),
        "horizon=" + std::to_string(horizon),
        "trajectories=" + std::to_string(trajectories),
        "classify.dwell=" + std::to_string(dwell),
    };
    ftql::ExperimentConfig cfg =
        ftql::ExperimentConfig::load(dir + "/fig1.json", overrides);
    warn_if_invalid_schedule(cfg);
    ftql::BatchResult batch = ftql::run_batch(cfg, workers);
    std::vector<ftql::TrajectoryRecord> records;
    records.reserve(batch.results.size());
    for (ftql::TrajectoryResult& r : batch.results)
      records.push_back(std::move(r.record));
    for (int stage : stages) {
      ftql::HeatmapGrid grid = ftql::heatmap(records, stage, bins);
      json out = ftql::heatmap_json(grid, cfg);
      std::string fname = "heatmap_ell" + ell_label(ell) + "_stage" +
                          std::to_string(stage) + ".json";
      ftql::write_text_file(out_dir + "/" + fname, out.dump(2) + "\n");
      manifest["files"].push_back(fname);
      ++written;
    }
  }
  ftql::write_text_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
  std::printf("reproduce-figure: wrote %d heat-map grids and manifest.json "
              "to %s\n",
              written, out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ftql: regularized learning in finite games under quantized, "
               "noisy payoff feedback"};
  app.require_subcommand(1);

  std::string run_config, run_out;
  std::vector<std::string> run_sets;
  int run_workers = 0;
  CLI::App* run = app.add_subcommand("run",
                                     "Run a batch experiment from a config");
  run->add_option("config", run_config, "Path to config JSON")->required();
  run->add_option("--set", run_sets,
                  "Override a config entry (dotted.path=value)");
  run->add_option("--out", run_out,
                  "Output directory (default: config output_dir)");
  run->add_option("--workers", run_workers,
                  "Worker threads (default: FTQL_WORKERS or hardware)");

  std::string val_config;
  std::vector<std::string> val_sets;
  CLI::App* val = app.add_subcommand(
      "validate-config", "Validate a config and print its hash");
  val->add_option("config", val_config, "Path to config JSON")->required();
  val->add_option("--set", val_sets,
                  "Override a config entry (dotted.path=value)");

  std::string replay_name, replay_dir;
  CLI::App* replay = app.add_subcommand(
      "replay-example", "Re-run a canned example and check its outcome");
  replay->add_option("name", replay_name,
                     "One of: ex1-i, ex1-ii, ex2-i, ex2-ii")
      ->required();
  replay->add_option("--config-dir", replay_dir,
                     "Directory with the canned configs");

  std::string fig_out, fig_dir;
  double fig_scale = 1.0;
  int fig_bins = 25;
  int fig_workers = 0;
  CLI::App* fig = app.add_subcommand(
      "reproduce-figure",
      "Run the three-quantizer sweep and emit heat-map grids");
  fig->add_option("out-dir", fig_out, "Directory for the emitted grids")
      ->required();
  fig->add_option("--scale", fig_scale,
                  "Scale factor in (0, 1] for trajectories and horizon");
  fig->add_option("--bins", fig_bins, "Heat-map bins per axis");
  fig->add_option("--config-dir", fig_dir,
                  "Directory with the canned configs");
  fig->add_option("--workers", fig_workers,
                  "Worker threads (default: FTQL_WORKERS or hardware)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_config, run_sets, run_out, run_workers);
    if (*val) return cmd_validate(val_config, val_sets);
    if (*replay) return cmd_replay(replay_name, replay_dir);
    if (*fig)
      return cmd_reproduce(fig_out, fig_scale, fig_bins, fig_dir, fig_workers);
  } catch (const ftql::ConfigError& e) {
    print_error("config", e.what());
    return 2;
  } catch (const ftql::IoError& e) {
    print_error("io", e.what());
    return 3;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
