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

#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include "doctest.h"
#include "ftql/experiment.hpp"
#include "ftql/schema.hpp"
#include "json.hpp"
#include "test_util.hpp"

using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args) {
  static testutil::TempDir capture("cli_capture");
  std::string out_path = capture.file("out.txt");
  std::string err_path = capture.file("err.txt");
  std::string cmd = testutil::require_env("FTQL_CLI") + " " + args + " > " +
                    out_path + " 2> " + err_path;
  int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = ftql::read_text_file(out_path);
  r.err = ftql::read_text_file(err_path);
  return r;
}

std::string config_path(const std::string& name) {
  return testutil::require_env("FTQL_CONFIG_DIR") + "/" + name + ".json";
}

json load_schema(const std::string& name) {
  return json::parse(ftql::read_text_file(
      testutil::require_env("FTQL_SCHEMA_DIR") + "/" + name + ".schema.json"));
}

}  // namespace

TEST_CASE("replay-example passes on every canned example") {
  for (const char* name : {"ex1-i", "ex1-ii", "ex2-i", "ex2-ii"}) {
    CliResult r = run_cli("replay-example " + std::string(name));
    CHECK_MESSAGE(r.exit_code == 0, name, ": ", r.err);
    CHECK(r.out.find("PASS") != std::string::npos);
    CHECK(r.out.find(name) != std::string::npos);
  }
  CliResult bad = run_cli("replay-example no-such-example");
  CHECK(bad.exit_code == 2);
  CHECK(bad.err.find("error") != std::string::npos);
}

TEST_CASE("validate-config reports the hash or a structured error") {
  CliResult ok = run_cli("validate-config " + config_path("fig1"));
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("valid: config hash ") != std::string::npos);

  CliResult bad_override =
      run_cli("validate-config " + config_path("fig1") + " --set horizon=0");
  CHECK(bad_override.exit_code == 2);
  json err = json::parse(bad_override.err);
  CHECK(err["error"]["type"] == "config");
  CHECK(err["error"]["message"].get<std::string>().find("horizon") !=
        std::string::npos);

  CliResult missing = run_cli("validate-config /nonexistent.json");
  CHECK(missing.exit_code == 2);
}

TEST_CASE("run emits schema-valid artifacts deterministically") {
  testutil::TempDir dir("cli_run");
  std::string out_a = dir.str() + "/a";
  std::string base = "run " + config_path("ex1-ii") +
                     " --set trajectories=3 --set \"log={\\\"scores\\\":true}\"" +
                     " --set \"emit={\\\"trajectories\\\":true,\\\"rate_fits\\\":true}\"";
  CliResult r = run_cli(base + " --out " + out_a);
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);
  CHECK(r.out.find("3 trajectories") != std::string::npos);
  CHECK(r.out.find("artifacts in " + out_a) != std::string::npos);

  std::string err;
  json echo = json::parse(ftql::read_text_file(out_a + "/config_echo.json"));
  CHECK(ftql::matches_schema(echo, load_schema("config"), &err));
  ftql::ExperimentConfig echoed = ftql::ExperimentConfig::from_json(echo);
  CHECK(r.out.find(echoed.hash()) != std::string::npos);

  json summary = json::parse(ftql::read_text_file(out_a + "/summary.json"));
  CHECK(ftql::matches_schema(summary, load_schema("summary"), &err));
  CHECK(summary["trajectories"] == 3);

  CHECK(ftql::matches_csv_schema(ftql::read_text_file(out_a + "/verdicts.csv"),
                                 load_schema("verdicts"), &err));
  CHECK(ftql::matches_csv_schema(
      ftql::read_text_file(out_a + "/rate_fits.csv"), load_schema("rate_fits"),
      &err));
  std::string traj = ftql::read_text_file(out_a + "/trajectories.csv");
  CHECK(traj.find("trajectory,seed,stage,") == 0);
  CHECK(traj.find(",y1_0,") != std::string::npos);

  // byte-identical artifacts on a second run
  std::string out_b = dir.str() + "/b";
  CliResult r2 = run_cli(base + " --out " + out_b);
  REQUIRE(r2.exit_code == 0);
  CHECK(ftql::read_text_file(out_a + "/verdicts.csv") ==
        ftql::read_text_file(out_b + "/verdicts.csv"));
  CHECK(ftql::read_text_file(out_a + "/summary.json") ==
        ftql::read_text_file(out_b + "/summary.json"));
  CHECK(ftql::read_text_file(out_a + "/trajectories.csv") ==
        ftql::read_text_file(out_b + "/trajectories.csv"));

  // a reseeded run still reproduces itself
  std::string out_c = dir.str() + "/c";
  std::string out_d = dir.str() + "/d";
  CliResult r3 = run_cli(base + " --set seed=7 --out " + out_c);
  CliResult r4 = run_cli(base + " --set seed=7 --out " + out_d);
  REQUIRE(r3.exit_code == 0);
  REQUIRE(r4.exit_code == 0);
  CHECK(ftql::read_text_file(out_c + "/verdicts.csv") ==
        ftql::read_text_file(out_d + "/verdicts.csv"));
  CHECK(ftql::read_text_file(out_c + "/verdicts.csv") !=
        ftql::read_text_file(out_a + "/verdicts.csv"));
}

TEST_CASE("invalid schedules run with a warning") {
  testutil::TempDir dir("cli_warn");
  CliResult r = run_cli("run " + config_path("fig1") +
                        " --set trajectories=2 --set horizon=50"
                        " --set classify.dwell=5 --out " +
                        dir.str() + "/w");
  CHECK(r.exit_code == 0);
  CHECK(r.err.find("warning: schedule") != std::string::npos);
}

TEST_CASE("reproduce-figure writes a full grid set at reduced scale") {
  testutil::TempDir dir("cli_fig");
  std::string out = dir.str() + "/fig";
  CliResult r =
      run_cli("reproduce-figure " + out + " --scale 0.05 --bins 10");
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);

  json manifest = json::parse(ftql::read_text_file(out + "/manifest.json"));
  CHECK(manifest["trajectories"] == 25);
  CHECK(manifest["horizon"] == 100);
  CHECK(manifest["stages"] == json{1, 50, 100});
  REQUIRE(manifest["files"].size() == 9);

  json heatmap_schema = load_schema("heatmap");
  std::string err;
  for (const auto& fname : manifest["files"]) {
    json grid = json::parse(
        ftql::read_text_file(out + "/" + fname.get<std::string>()));
    CHECK_MESSAGE(ftql::matches_schema(grid, heatmap_schema, &err),
                  fname.get<std::string>(), ": ", err);
    long total = 0;
    for (const auto& row : grid["counts"])
      for (const auto& c : row) total += c.get<long>();
    CHECK(total == 25);
    CHECK(grid["bins"] == 10);
  }
  CHECK(ftql::read_text_file(out + "/manifest.json").find("heatmap_ell1.5_stage50.json") !=
        std::string::npos);
}
