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

#ifndef PROXYCAL_TOOLS_COMMANDS_HPP_
#define PROXYCAL_TOOLS_COMMANDS_HPP_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "proxycal/drift.hpp"
#include "proxycal/io.hpp"

namespace proxycal::cli {

// Flags shared by the analysis commands. Unset optionals fall back to the
// config file, then to the built-in defaults.
struct AnalysisFlags {
  std::filesystem::path sites;
  std::filesystem::path obs;
  std::filesystem::path assignments;
  std::filesystem::path config;
  std::filesystem::path out_dir;
  std::optional<int> stride;
  std::optional<double> bin_width;
  bool clamp_negative = false;
};

io::AnalysisConfig resolve_config(const AnalysisFlags& flags);

// Writes assignments (or the nearest/knn/min_kl comparison for "all") to
// `out` and, when out_dir is set, to files there.
void cmd_select_proxy(const AnalysisFlags& flags, const std::string& method, std::ostream& out);

// One framework run per assignment, evaluated in parallel and reported in
// site order.
struct PairRun {
  std::string site_id;
  std::string proxy_id;
  drift::FrameworkState state;
};
std::vector<PairRun> run_pairs(const NetworkDataset& data, const std::vector<ProxyAssignment>& assignments,
                               const drift::FrameworkConfig& cfg);

void cmd_detect(const AnalysisFlags& flags, std::ostream& out);
void cmd_correct(const AnalysisFlags& flags, std::ostream& out);
void cmd_wind_bins(const AnalysisFlags& flags, std::ostream& out);

struct SimulateFlags {
  std::filesystem::path scenario;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
  bool score = false;
  // Used by --score.
  std::filesystem::path config;
  std::optional<int> stride;
};
void cmd_simulate(const SimulateFlags& flags, std::ostream& out);

// Ingest report and validation findings for an observations file.
void cmd_report(const AnalysisFlags& flags, std::ostream& out);

}  // namespace proxycal::cli

#endif  // PROXYCAL_TOOLS_COMMANDS_HPP_
