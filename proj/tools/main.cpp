// Copyright 2026 The proxycal Authors
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

// proxycal command line front end.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "proxycal/error.hpp"

namespace {

int fail(std::string_view code, const std::string& message) {
  std::string m = message;
  for (auto& c : m) {
    if (c == '"') c = '\'';
    if (c == '\n') c = ' ';
  }
  std::cerr << "error: code=" << code << " message=\"" << m << "\"\n";
  return 2;
}

void add_analysis_flags(CLI::App* cmd, proxycal::cli::AnalysisFlags& f, bool needs_assignments) {
  cmd->add_option("--sites", f.sites, "Sites CSV (site_id,name,lat,lon,dist_motorway_m,elevation_m,road_length_1km_m)");
  cmd->add_option("--obs", f.obs, "Observations CSV (timestamp_utc,site_id,no2_ppb,wind_speed_ms,wind_dir_deg)");
  if (needs_assignments) cmd->add_option("--assignments", f.assignments, "Assignments CSV (site_id,proxy_id,method,score)");
  cmd->add_option("--config", f.config, "key = value config file; flags below override it");
  cmd->add_option("--out-dir", f.out_dir, "Directory for output CSV files (created if missing)");
  cmd->add_option("--stride", f.stride, "Evaluate the framework every N hours (config key stride, default 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--bin-width", f.bin_width, "Histogram bin width in ppb (config key bin_width, default 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--clamp-negative", f.clamp_negative, "Clamp negative concentrations to 0 instead of rejecting them");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proxycal: proxy-based calibration and drift detection for air-quality networks"};
  app.require_subcommand(1);

  proxycal::cli::AnalysisFlags select_flags;
  std::string method = "knn";
  auto* select = app.add_subcommand("select-proxy", "Choose a proxy site for every site");
  add_analysis_flags(select, select_flags, false);
  select->add_option("--method", method, "knn, nearest, min_kl, or all (min_kl and all need --obs)")
      ->check(CLI::IsMember({"knn", "nearest", "min_kl", "all"}));

  proxycal::cli::AnalysisFlags detect_flags;
  auto* detect = app.add_subcommand("detect", "Run the rolling three-test framework for every site/proxy pair");
  add_analysis_flags(detect, detect_flags, true);

  proxycal::cli::AnalysisFlags correct_flags;
  auto* correct = app.add_subcommand("correct", "Moment-match site data to the proxy while correction is active");
  add_analysis_flags(correct, correct_flags, true);

  proxycal::cli::AnalysisFlags wind_flags;
  auto* wind = app.add_subcommand("wind-bins", "Mean alarm sum by wind direction and speed");
  add_analysis_flags(wind, wind_flags, true);

  proxycal::cli::SimulateFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic network from a scenario file");
  simulate->add_option("--scenario", sim_flags.scenario, "Scenario key = value file")->required();
  simulate->add_option("--out-dir", sim_flags.out_dir, "Directory for the generated CSV files")->required();
  simulate->add_option("--seed", sim_flags.seed, "Overrides the scenario seed");
  simulate->add_flag("--score", sim_flags.score, "Also run detect on knn pairs and score against the drift schedule");
  simulate->add_option("--config", sim_flags.config, "Framework config used by --score");
  simulate->add_option("--stride", sim_flags.stride, "Framework stride used by --score")->check(CLI::PositiveNumber);

  proxycal::cli::AnalysisFlags report_flags;
  auto* report = app.add_subcommand("report", "Ingest report and validation findings for an observations file");
  add_analysis_flags(report, report_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (*select) proxycal::cli::cmd_select_proxy(select_flags, method, std::cout);
    if (*detect) proxycal::cli::cmd_detect(detect_flags, std::cout);
    if (*correct) proxycal::cli::cmd_correct(correct_flags, std::cout);
    if (*wind) proxycal::cli::cmd_wind_bins(wind_flags, std::cout);
    if (*simulate) proxycal::cli::cmd_simulate(sim_flags, std::cout);
    if (*report) proxycal::cli::cmd_report(report_flags, std::cout);
  } catch (const proxycal::Error& e) {
    return fail(proxycal::to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
