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

#ifndef PROXYCAL_IO_HPP_
#define PROXYCAL_IO_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "proxycal/correct.hpp"
#include "proxycal/drift.hpp"
#include "proxycal/met.hpp"
#include "proxycal/model.hpp"
#include "proxycal/proxy.hpp"
#include "proxycal/sim.hpp"

namespace proxycal::io {

// Column headers of every file format.
inline constexpr std::string_view kObservationsHeader = "timestamp_utc,site_id,no2_ppb,wind_speed_ms,wind_dir_deg";
inline constexpr std::string_view kSitesHeader = "site_id,name,lat,lon,dist_motorway_m,elevation_m,road_length_1km_m";
inline constexpr std::string_view kAssignmentsHeader = "site_id,proxy_id,method,score";
inline constexpr std::string_view kTrailHeader =
    "timestamp,ks_p,slope,intercept,ks_alarm,slope_alarm,int_alarm,n_failing,correction_active";
inline constexpr std::string_view kCorrectedHeader = "timestamp,raw_ppb,corrected_ppb,a0,a1,active_flag";
inline constexpr std::string_view kPolarGridHeader = "dir_center_deg,speed_bin_low,n_hours,mean_alarm_sum";
inline constexpr std::string_view kIngestReportHeader = "kind,key,value";
inline constexpr std::string_view kTruthHeader = "timestamp_utc,site_id,true_ppb";
inline constexpr std::string_view kDriftScheduleHeader = "site_id,kind,onset_utc,magnitude,ramp_hours";

// 17 significant digits; parses back to the identical double.
std::string format_double(double v);
std::string format_optional(const std::optional<double>& v);

// Accepts "YYYY-MM-DDTHH:MM:SSZ" (the trailing Z and the T may be replaced
// by nothing and a space). Returns the reason on failure, including
// "sub-hourly timestamp" for non-zero minutes or seconds.
struct TimestampParse {
  std::optional<Hour> hour;
  std::string error;
};
TimestampParse parse_timestamp(std::string_view text);

// Splits one CSV record; double-quoted fields may contain commas and "".
std::vector<std::string> split_csv_line(std::string_view line);

void write_text(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

// --- observations -----------------------------------------------------------

struct RejectedRow {
  std::size_t line = 0;
  std::string reason;

  friend bool operator==(const RejectedRow&, const RejectedRow&) = default;
};

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_accepted = 0;
  std::vector<RejectedRow> rejected;
  std::map<std::string, double> completeness;
  std::optional<Hour> epoch_start;
  std::optional<Hour> epoch_end;

  friend bool operator==(const IngestReport&, const IngestReport&) = default;
};

struct ObservationsIngest {
  // Series only; all series span the file's common epoch with explicit
  // missing hours.
  NetworkDataset dataset;
  IngestReport report;
};

ObservationsIngest parse_observations(std::string_view text);
ObservationsIngest read_observations(const std::filesystem::path& path);
std::string observations_csv(const NetworkDataset& data);
void write_observations(const NetworkDataset& data, const std::filesystem::path& path);

std::string ingest_report_csv(const IngestReport& report);
IngestReport parse_ingest_report(std::string_view text);

// --- sites ------------------------------------------------------------------

std::vector<SiteRecord> parse_sites(std::string_view text);
std::vector<SiteRecord> read_sites(const std::filesystem::path& path);
std::string sites_csv(std::span<const SiteRecord> sites);

// Loads sites and observations together and validates the result.
NetworkDataset load_dataset(const std::filesystem::path& sites, const std::filesystem::path& observations,
                            const ValidationOptions& options = {}, IngestReport* report = nullptr);

// --- assignments ------------------------------------------------------------

std::string assignments_csv(std::span<const ProxyAssignment> assignments);
std::vector<ProxyAssignment> parse_assignments(std::string_view text);
std::vector<ProxyAssignment> read_assignments(const std::filesystem::path& path);

// --- framework trail --------------------------------------------------------

struct TrailRow {
  Hour at;
  std::optional<double> ks_p;
  std::optional<double> slope;
  std::optional<double> intercept;
  std::array<bool, drift::kTestCount> alarms{};
  int n_failing = 0;
  bool correction_active = false;

  friend bool operator==(const TrailRow&, const TrailRow&) = default;
};

std::vector<TrailRow> trail_rows(const drift::FrameworkState& state);
std::string trail_csv(std::span<const TrailRow> rows);
std::vector<TrailRow> parse_trail(std::string_view text);

// --- corrected series -------------------------------------------------------

std::string corrected_csv(std::span<const correct::CorrectionRow> rows);
std::vector<correct::CorrectionRow> parse_corrected(std::string_view text);

// --- wind grid --------------------------------------------------------------

struct PolarGridRow {
  double dir_center_deg = 0.0;
  double speed_bin_low = 0.0;
  std::size_t n_hours = 0;
  double mean_alarm_sum = 0.0;

  friend bool operator==(const PolarGridRow&, const PolarGridRow&) = default;
};

std::vector<PolarGridRow> polar_grid_rows(const met::PolarBinGrid& grid);
std::string polar_grid_csv(std::span<const PolarGridRow> rows);
std::vector<PolarGridRow> parse_polar_grid(std::string_view text);

// --- simulator ground truth -------------------------------------------------

std::string truth_csv(const sim::GroundTruth& truth);
std::string drift_schedule_csv(const sim::DriftSchedule& schedule);
sim::DriftSchedule parse_drift_schedule(std::string_view text, Hour epoch_start);

// --- key = value configuration ----------------------------------------------

struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

// '#' starts a comment; blank lines are ignored; keys may repeat.
std::vector<KeyValue> parse_key_values(std::string_view text);

struct AnalysisConfig {
  drift::FrameworkConfig framework;
  proxy::MinKlOptions kl;
  met::GridConfig wind;
  bool clamp_negative = false;
};

// Keys not present keep the values already in `base`. Unknown keys are an
// error.
AnalysisConfig parse_analysis_config(std::string_view text, AnalysisConfig base = {});
AnalysisConfig load_analysis_config(const std::filesystem::path& path, AnalysisConfig base = {});
// Every key with its current value, in the accepted file syntax.
std::string analysis_config_text(const AnalysisConfig& config);

sim::ScenarioSpec parse_scenario(std::string_view text);
sim::ScenarioSpec load_scenario(const std::filesystem::path& path);

}  // namespace proxycal::io

#endif  // PROXYCAL_IO_HPP_
