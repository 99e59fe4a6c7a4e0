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

#include "proxycal/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "proxycal/error.hpp"

namespace proxycal::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    pos = nl + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  const std::string tmp(s);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size() || errno == ERANGE) return std::nullopt;
  return v;
}

template <typename Int>
std::optional<Int> to_int(std::string_view s) {
  s = trim(s);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool is_missing_token(std::string_view s) {
  s = trim(s);
  return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "null";
}

// Missing tokens map to nullopt; anything else must be a finite number.
struct OptionalField {
  std::optional<double> value;
  bool ok = true;
};

OptionalField optional_field(std::string_view s) {
  if (is_missing_token(s)) return {};
  const auto v = to_double(s);
  if (!v || !std::isfinite(*v)) return {std::nullopt, false};
  return {v, true};
}

[[noreturn]] void parse_fail(std::string_view what, std::size_t line, const std::string& detail) {
  throw Error(ErrorCode::kParse, std::string(what) + " line " + std::to_string(line) + ": " + detail);
}

double require_double(std::string_view what, std::size_t line, std::string_view field, std::string_view name) {
  const auto v = to_double(field);
  if (!v || !std::isfinite(*v)) parse_fail(what, line, "bad " + std::string(name) + " '" + std::string(field) + "'");
  return *v;
}

std::optional<double> maybe_double(std::string_view what, std::size_t line, std::string_view field,
                                   std::string_view name) {
  if (trim(field).empty()) return std::nullopt;
  return require_double(what, line, field, name);
}

bool require_flag(std::string_view what, std::size_t line, std::string_view field, std::string_view name) {
  field = trim(field);
  if (field == "1") return true;
  if (field == "0") return false;
  parse_fail(what, line, "bad " + std::string(name) + " '" + std::string(field) + "'");
}

Hour require_hour(std::string_view what, std::size_t line, std::string_view field) {
  const auto ts = parse_timestamp(field);
  if (!ts.hour) parse_fail(what, line, ts.error);
  return *ts.hour;
}

std::string quote_if_needed(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Returns the non-empty data lines after checking the header.
std::vector<std::pair<std::size_t, std::string_view>> data_lines(std::string_view text, std::string_view header,
                                                                 std::string_view what) {
  const auto lines = split_lines(text);
  std::size_t first = 0;
  while (first < lines.size() && trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw Error(ErrorCode::kParse, std::string(what) + ": empty file");
  if (trim(lines[first]) != header)
    throw Error(ErrorCode::kParse, std::string(what) + ": malformed header '" + std::string(lines[first]) +
                                       "', expected '" + std::string(header) + "'");
  std::vector<std::pair<std::size_t, std::string_view>> out;
  for (std::size_t i = first + 1; i < lines.size(); ++i) {
    if (!trim(lines[i]).empty()) out.emplace_back(i + 1, lines[i]);
  }
  return out;
}

std::vector<std::string> fields_exact(std::string_view what, std::size_t line, std::string_view text,
                                      std::size_t count) {
  auto f = split_csv_line(text);
  if (f.size() != count)
    parse_fail(what, line, "expected " + std::to_string(count) + " fields, got " + std::to_string(f.size()));
  return f;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

TimestampParse parse_timestamp(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
  // YYYY-MM-DD[T ]HH:MM[:SS]
  if (text.size() != 19 && text.size() != 16) return {std::nullopt, "malformed timestamp '" + std::string(text) + "'"};
  const bool shape_ok = text[4] == '-' && text[7] == '-' && (text[10] == 'T' || text[10] == ' ') &&
                        text[13] == ':' && (text.size() == 16 || text[16] == ':');
  if (!shape_ok) return {std::nullopt, "malformed timestamp '" + std::string(text) + "'"};
  const auto year = to_int<int>(text.substr(0, 4));
  const auto month = to_int<unsigned>(text.substr(5, 2));
  const auto day = to_int<unsigned>(text.substr(8, 2));
  const auto hour = to_int<unsigned>(text.substr(11, 2));
  const auto minute = to_int<unsigned>(text.substr(14, 2));
  const auto second = text.size() == 19 ? to_int<unsigned>(text.substr(17, 2)) : std::optional<unsigned>(0u);
  if (!year || !month || !day || !hour || !minute || !second)
    return {std::nullopt, "malformed timestamp '" + std::string(text) + "'"};
  const std::chrono::year_month_day ymd{std::chrono::year{*year}, std::chrono::month{*month},
                                        std::chrono::day{*day}};
  if (!ymd.ok() || *hour > 23 || *minute > 59 || *second > 59)
    return {std::nullopt, "invalid date or time '" + std::string(text) + "'"};
  if (*minute != 0 || *second != 0) return {std::nullopt, "sub-hourly timestamp"};
  return {hour_from_civil(*year, *month, *day, *hour), {}};
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::kIo, "failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- observations -----------------------------------------------------------

ObservationsIngest parse_observations(std::string_view text) {
  const auto lines = data_lines(text, kObservationsHeader, "observations");
  ObservationsIngest out;
  auto& report = out.report;
  std::map<std::string, std::map<Hour, HourlySample>> rows;
  for (const auto& [line_no, line] : lines) {
    ++report.rows_read;
    auto reject = [&](std::string reason) { report.rejected.push_back({line_no, std::move(reason)}); };
    const auto f = split_csv_line(line);
    if (f.size() != 5) {
      reject("expected 5 fields, got " + std::to_string(f.size()));
      continue;
    }
    const auto ts = parse_timestamp(f[0]);
    if (!ts.hour) {
      reject(ts.error);
      continue;
    }
    const std::string site(trim(f[1]));
    if (site.empty()) {
      reject("empty site_id");
      continue;
    }
    const auto no2 = optional_field(f[2]);
    const auto speed = optional_field(f[3]);
    const auto dir = optional_field(f[4]);
    if (!no2.ok) {
      reject("unparseable no2_ppb '" + f[2] + "'");
      continue;
    }
    if (!speed.ok) {
      reject("unparseable wind_speed_ms '" + f[3] + "'");
      continue;
    }
    if (!dir.ok) {
      reject("unparseable wind_dir_deg '" + f[4] + "'");
      continue;
    }
    auto& by_hour = rows[site];
    if (by_hour.contains(*ts.hour)) {
      reject("duplicate observation for " + site + " at " + to_iso8601(*ts.hour));
      continue;
    }
    by_hour.emplace(*ts.hour, HourlySample{*ts.hour, no2.value, speed.value, dir.value});
    ++report.rows_accepted;
  }

  for (const auto& [site, by_hour] : rows) {
    const Hour lo = by_hour.begin()->first;
    const Hour hi = by_hour.rbegin()->first;
    if (!report.epoch_start || lo < *report.epoch_start) report.epoch_start = lo;
    if (!report.epoch_end || hi > *report.epoch_end) report.epoch_end = hi;
  }
  for (const auto& [site, by_hour] : rows) {
    HourlySeries series;
    series.site_id = site;
    for (Hour h = *report.epoch_start; h <= *report.epoch_end; h = h + 1) {
      auto it = by_hour.find(h);
      series.samples.push_back(it == by_hour.end() ? HourlySample{h, {}, {}, {}} : it->second);
    }
    report.completeness[site] =
        static_cast<double>(series.present_count()) / static_cast<double>(series.samples.size());
    out.dataset.series.emplace(site, std::move(series));
  }
  return out;
}

ObservationsIngest read_observations(const std::filesystem::path& path) {
  return parse_observations(read_text(path));
}

std::string observations_csv(const NetworkDataset& data) {
  std::string out(kObservationsHeader);
  out += '\n';
  std::size_t longest = 0;
  for (const auto& [id, s] : data.series) longest = std::max(longest, s.size());
  // Hour-major, site order within each hour.
  for (std::size_t i = 0; i < longest; ++i) {
    for (const auto& [id, s] : data.series) {
      if (i >= s.size()) continue;
      const auto& r = s.samples[i];
      out += to_iso8601(r.at);
      out += ',';
      out += quote_if_needed(id);
      out += ',';
      out += format_optional(r.no2_ppb);
      out += ',';
      out += format_optional(r.wind_speed_ms);
      out += ',';
      out += format_optional(r.wind_dir_deg);
      out += '\n';
    }
  }
  return out;
}

void write_observations(const NetworkDataset& data, const std::filesystem::path& path) {
  write_text(path, observations_csv(data));
}

std::string ingest_report_csv(const IngestReport& report) {
  std::string out(kIngestReportHeader);
  out += '\n';
  out += "summary,rows_read," + std::to_string(report.rows_read) + '\n';
  out += "summary,rows_accepted," + std::to_string(report.rows_accepted) + '\n';
  out += "summary,rows_rejected," + std::to_string(report.rejected.size()) + '\n';
  if (report.epoch_start) out += "summary,epoch_start," + to_iso8601(*report.epoch_start) + '\n';
  if (report.epoch_end) out += "summary,epoch_end," + to_iso8601(*report.epoch_end) + '\n';
  for (const auto& [site, c] : report.completeness)
    out += "completeness," + quote_if_needed(site) + ',' + format_double(c) + '\n';
  for (const auto& r : report.rejected)
    out += "rejected," + std::to_string(r.line) + ',' + quote_if_needed(r.reason) + '\n';
  return out;
}

IngestReport parse_ingest_report(std::string_view text) {
  constexpr std::string_view what = "ingest report";
  IngestReport report;
  std::optional<std::size_t> rejected_count;
  for (const auto& [line_no, line] : data_lines(text, kIngestReportHeader, what)) {
    const auto f = fields_exact(what, line_no, line, 3);
    if (f[0] == "summary") {
      if (f[1] == "rows_read") {
        report.rows_read = to_int<std::size_t>(f[2]).value_or(0);
      } else if (f[1] == "rows_accepted") {
        report.rows_accepted = to_int<std::size_t>(f[2]).value_or(0);
      } else if (f[1] == "rows_rejected") {
        rejected_count = to_int<std::size_t>(f[2]);
      } else if (f[1] == "epoch_start") {
        report.epoch_start = require_hour(what, line_no, f[2]);
      } else if (f[1] == "epoch_end") {
        report.epoch_end = require_hour(what, line_no, f[2]);
      } else {
        parse_fail(what, line_no, "unknown summary key '" + f[1] + "'");
      }
    } else if (f[0] == "completeness") {
      report.completeness[f[1]] = require_double(what, line_no, f[2], "completeness");
    } else if (f[0] == "rejected") {
      const auto ln = to_int<std::size_t>(f[1]);
      if (!ln) parse_fail(what, line_no, "bad line number '" + f[1] + "'");
      report.rejected.push_back({*ln, f[2]});
    } else {
      parse_fail(what, line_no, "unknown kind '" + f[0] + "'");
    }
  }
  if (rejected_count && *rejected_count != report.rejected.size())
    throw Error(ErrorCode::kParse, "ingest report: rows_rejected does not match rejected rows");
  return report;
}

// --- sites ------------------------------------------------------------------

std::vector<SiteRecord> parse_sites(std::string_view text) {
  constexpr std::string_view what = "sites";
  std::vector<SiteRecord> out;
  std::set<std::string> seen;
  for (const auto& [line_no, line] : data_lines(text, kSitesHeader, what)) {
    const auto f = fields_exact(what, line_no, line, 7);
    const char* names[] = {"site_id", "name", "lat", "lon", "dist_motorway_m", "elevation_m", "road_length_1km_m"};
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (i != 1 && trim(f[i]).empty()) parse_fail(what, line_no, std::string("missing required field ") + names[i]);
    }
    SiteRecord s;
    s.site_id = std::string(trim(f[0]));
    s.name = std::string(trim(f[1]));
    s.latitude = require_double(what, line_no, f[2], "lat");
    s.longitude = require_double(what, line_no, f[3], "lon");
    s.features.dist_to_motorway_m = require_double(what, line_no, f[4], "dist_motorway_m");
    s.features.elevation_m = require_double(what, line_no, f[5], "elevation_m");
    s.features.road_length_1km_m = require_double(what, line_no, f[6], "road_length_1km_m");
    if (!seen.insert(s.site_id).second) parse_fail(what, line_no, "duplicate site_id '" + s.site_id + "'");
    const auto violations = validate_site(s);
    if (!violations.empty()) parse_fail(what, line_no, violations.front().describe());
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SiteRecord> read_sites(const std::filesystem::path& path) { return parse_sites(read_text(path)); }

std::string sites_csv(std::span<const SiteRecord> sites) {
  std::string out(kSitesHeader);
  out += '\n';
  for (const auto& s : sites) {
    out += quote_if_needed(s.site_id) + ',' + quote_if_needed(s.name) + ',' + format_double(s.latitude) + ',' +
           format_double(s.longitude) + ',' + format_double(s.features.dist_to_motorway_m) + ',' +
           format_double(s.features.elevation_m) + ',' + format_double(s.features.road_length_1km_m) + '\n';
  }
  return out;
}

NetworkDataset load_dataset(const std::filesystem::path& sites, const std::filesystem::path& observations,
                            const ValidationOptions& options, IngestReport* report) {
  auto ingest = read_observations(observations);
  ingest.dataset.sites = read_sites(sites);
  if (report) *report = ingest.report;
  return validated_or_throw(std::move(ingest.dataset), options);
}

// --- assignments ------------------------------------------------------------

std::string assignments_csv(std::span<const ProxyAssignment> assignments) {
  std::string out(kAssignmentsHeader);
  out += '\n';
  for (const auto& a : assignments) {
    out += quote_if_needed(a.site_id) + ',' + quote_if_needed(a.proxy_id) + ',' + std::string(to_string(a.method)) +
           ',' + format_double(a.score) + '\n';
  }
  return out;
}

std::vector<ProxyAssignment> parse_assignments(std::string_view text) {
  constexpr std::string_view what = "assignments";
  std::vector<ProxyAssignment> out;
  for (const auto& [line_no, line] : data_lines(text, kAssignmentsHeader, what)) {
    const auto f = fields_exact(what, line_no, line, 4);
    ProxyAssignment a;
    a.site_id = std::string(trim(f[0]));
    a.proxy_id = std::string(trim(f[1]));
    try {
      a.method = parse_proxy_method(trim(f[2]));
    } catch (const Error& e) {
      parse_fail(what, line_no, e.what());
    }
    // Fixture tables may leave the score blank.
    a.score = trim(f[3]).empty() ? 0.0 : require_double(what, line_no, f[3], "score");
    if (a.site_id.empty() || a.proxy_id.empty()) parse_fail(what, line_no, "empty site or proxy id");
    if (a.site_id == a.proxy_id) parse_fail(what, line_no, "site '" + a.site_id + "' is its own proxy");
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<ProxyAssignment> read_assignments(const std::filesystem::path& path) {
  return parse_assignments(read_text(path));
}

// --- framework trail --------------------------------------------------------

std::vector<TrailRow> trail_rows(const drift::FrameworkState& state) {
  std::vector<TrailRow> out;
  out.reserve(state.trail.size());
  std::size_t span = 0;
  const auto& active = state.correction_active_spans;
  for (std::size_t i = 0; i < state.trail.size(); ++i) {
    const auto& tv = state.trail[i];
    while (span < active.size() && active[span].end < tv.at) ++span;
    out.push_back({tv.at, tv.ks_p, tv.slope, tv.intercept, tv.alarms, state.failing_count(i),
                   span < active.size() && active[span].start <= tv.at});
  }
  return out;
}

std::string trail_csv(std::span<const TrailRow> rows) {
  std::string out(kTrailHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += to_iso8601(r.at) + ',' + format_optional(r.ks_p) + ',' + format_optional(r.slope) + ',' +
           format_optional(r.intercept) + ',' + (r.alarms[0] ? '1' : '0') + ',' + (r.alarms[1] ? '1' : '0') + ',' +
           (r.alarms[2] ? '1' : '0') + ',' + std::to_string(r.n_failing) + ',' + (r.correction_active ? '1' : '0') +
           '\n';
  }
  return out;
}

std::vector<TrailRow> parse_trail(std::string_view text) {
  constexpr std::string_view what = "trail";
  std::vector<TrailRow> out;
  for (const auto& [line_no, line] : data_lines(text, kTrailHeader, what)) {
    const auto f = fields_exact(what, line_no, line, 9);
    TrailRow r;
    r.at = require_hour(what, line_no, f[0]);
    r.ks_p = maybe_double(what, line_no, f[1], "ks_p");
    r.slope = maybe_double(what, line_no, f[2], "slope");
    r.intercept = maybe_double(what, line_no, f[3], "intercept");
    r.alarms[0] = require_flag(what, line_no, f[4], "ks_alarm");
    r.alarms[1] = require_flag(what, line_no, f[5], "slope_alarm");
    r.alarms[2] = require_flag(what, line_no, f[6], "int_alarm");
    const auto nf = to_int<int>(f[7]);
    if (!nf || *nf < 0 || *nf > 3) parse_fail(what, line_no, "bad n_failing '" + f[7] + "'");
    r.n_failing = *nf;
    r.correction_active = require_flag(what, line_no, f[8], "correction_active");
    out.push_back(r);
  }
  return out;
}

// --- corrected series -------------------------------------------------------

std::string corrected_csv(std::span<const correct::CorrectionRow> rows) {
  std::string out(kCorrectedHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += to_iso8601(r.at) + ',' + format_optional(r.raw_ppb) + ',' + format_optional(r.corrected_ppb) + ',';
    if (r.params) {
      out += format_double(r.params->intercept) + ',' + format_double(r.params->slope);
    } else {
      out += ',';
    }
    out += ',' + std::to_string(static_cast<int>(r.flag)) + '\n';
  }
  return out;
}

std::vector<correct::CorrectionRow> parse_corrected(std::string_view text) {
  constexpr std::string_view what = "corrected series";
  std::vector<correct::CorrectionRow> out;
  for (const auto& [line_no, line] : data_lines(text, kCorrectedHeader, what)) {
    const auto f = fields_exact(what, line_no, line, 6);
    correct::CorrectionRow r;
    r.at = require_hour(what, line_no, f[0]);
    r.raw_ppb = maybe_double(what, line_no, f[1], "raw_ppb");
    r.corrected_ppb = maybe_double(what, line_no, f[2], "corrected_ppb");
    const auto a0 = maybe_double(what, line_no, f[3], "a0");
    const auto a1 = maybe_double(what, line_no, f[4], "a1");
    if (a0.has_value() != a1.has_value()) parse_fail(what, line_no, "a0 and a1 must both be present or absent");
    if (a0) r.params = correct::FitParameters{*a0, *a1};
    const auto flag = to_int<int>(f[5]);
    if (!flag || *flag < 0 || *flag > 2) parse_fail(what, line_no, "bad active_flag '" + f[5] + "'");
    r.flag = static_cast<correct::CorrectionFlag>(*flag);
    out.push_back(r);
  }
  return out;
}

// --- wind grid --------------------------------------------------------------

std::vector<PolarGridRow> polar_grid_rows(const met::PolarBinGrid& grid) {
  std::vector<PolarGridRow> out;
  for (const auto& [key, cell] : grid.cells)
    out.push_back({grid.dir_center_deg(key.first), grid.speed_low(key.second), cell.n_hours, cell.mean_alarm_sum()});
  return out;
}

std::string polar_grid_csv(std::span<const PolarGridRow> rows) {
  std::string out(kPolarGridHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += format_double(r.dir_center_deg) + ',' + format_double(r.speed_bin_low) + ',' + std::to_string(r.n_hours) +
           ',' + format_double(r.mean_alarm_sum) + '\n';
  }
  return out;
}

std::vector<PolarGridRow> parse_polar_grid(std::string_view text) {
  constexpr std::string_view what = "polar grid";
  std::vector<PolarGridRow> out;
  for (const auto& [line_no, line] : data_lines(text, kPolarGridHeader, what)) {
    const auto f = fields_exact(what, line_no, line, 4);
    PolarGridRow r;
    r.dir_center_deg = require_double(what, line_no, f[0], "dir_center_deg");
    r.speed_bin_low = require_double(what, line_no, f[1], "speed_bin_low");
    const auto n = to_int<std::size_t>(f[2]);
    if (!n) parse_fail(what, line_no, "bad n_hours '" + f[2] + "'");
    r.n_hours = *n;
    r.mean_alarm_sum = require_double(what, line_no, f[3], "mean_alarm_sum");
    out.push_back(r);
  }
  return out;
}

// --- simulator ground truth -------------------------------------------------

std::string truth_csv(const sim::GroundTruth& truth) {
  std::string out(kTruthHeader);
  out += '\n';
  std::size_t longest = 0;
  for (const auto& [id, v] : truth.true_ppb) longest = std::max(longest, v.size());
  for (std::size_t i = 0; i < longest; ++i) {
    const std::string ts = to_iso8601(truth.schedule.epoch_start + static_cast<std::int64_t>(i));
    for (const auto& [id, v] : truth.true_ppb) {
      if (i < v.size()) out += ts + ',' + quote_if_needed(id) + ',' + format_double(v[i]) + '\n';
    }
  }
  return out;
}

std::string drift_schedule_csv(const sim::DriftSchedule& schedule) {
  std::string out(kDriftScheduleHeader);
  out += '\n';
  for (const auto& e : schedule.events) {
    out += quote_if_needed(e.site_id) + ',' + std::string(sim::to_string(e.kind)) + ',' +
           to_iso8601(schedule.epoch_start + e.onset_hour) + ',' + format_double(e.magnitude) + ',' +
           std::to_string(e.ramp_hours) + '\n';
  }
  return out;
}

sim::DriftSchedule parse_drift_schedule(std::string_view text, Hour epoch_start) {
  constexpr std::string_view what = "drift schedule";
  sim::DriftSchedule out{epoch_start, {}};
  for (const auto& [line_no, line] : data_lines(text, kDriftScheduleHeader, what)) {
    const auto f = fields_exact(what, line_no, line, 5);
    sim::DriftEvent e;
    e.site_id = std::string(trim(f[0]));
    try {
      e.kind = sim::parse_drift_kind(trim(f[1]));
    } catch (const Error& err) {
      parse_fail(what, line_no, err.what());
    }
    e.onset_hour = require_hour(what, line_no, f[2]) - epoch_start;
    e.magnitude = require_double(what, line_no, f[3], "magnitude");
    const auto ramp = to_int<std::int64_t>(f[4]);
    if (!ramp) parse_fail(what, line_no, "bad ramp_hours '" + f[4] + "'");
    e.ramp_hours = *ramp;
    out.events.push_back(std::move(e));
  }
  return out;
}

// --- key = value configuration ----------------------------------------------

std::vector<KeyValue> parse_key_values(std::string_view text) {
  std::vector<KeyValue> out;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::kParse, "config line " + std::to_string(i + 1) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error(ErrorCode::kParse, "config line " + std::to_string(i + 1) + ": empty key");
    out.push_back({std::string(key), std::string(value), i + 1});
  }
  return out;
}

namespace {

double kv_double(const KeyValue& kv) {
  const auto v = to_double(kv.value);
  if (!v || !std::isfinite(*v))
    throw Error(ErrorCode::kParse, "config line " + std::to_string(kv.line) + ": '" + kv.key + "' needs a number");
  return *v;
}

template <typename Int>
Int kv_int(const KeyValue& kv) {
  const auto v = to_int<Int>(kv.value);
  if (!v) throw Error(ErrorCode::kParse, "config line " + std::to_string(kv.line) + ": '" + kv.key + "' needs an integer");
  return *v;
}

bool kv_bool(const KeyValue& kv) {
  if (kv.value == "true" || kv.value == "1" || kv.value == "yes") return true;
  if (kv.value == "false" || kv.value == "0" || kv.value == "no") return false;
  throw Error(ErrorCode::kParse, "config line " + std::to_string(kv.line) + ": '" + kv.key + "' needs true/false");
}

[[noreturn]] void unknown_key(const KeyValue& kv) {
  throw Error(ErrorCode::kParse, "config line " + std::to_string(kv.line) + ": unknown key '" + kv.key + "'");
}

}  // namespace

AnalysisConfig parse_analysis_config(std::string_view text, AnalysisConfig base) {
  AnalysisConfig c = std::move(base);
  for (const auto& kv : parse_key_values(text)) {
    const auto& k = kv.key;
    if (k == "window_hours") {
      c.framework.window_hours = kv_int<int>(kv);
    } else if (k == "failure_hours") {
      c.framework.failure_hours = kv_int<int>(kv);
    } else if (k == "p_ks_threshold") {
      c.framework.p_ks_threshold = kv_double(kv);
    } else if (k == "slope_low") {
      c.framework.slope_band.low = kv_double(kv);
    } else if (k == "slope_high") {
      c.framework.slope_band.high = kv_double(kv);
    } else if (k == "intercept_low_ppb") {
      c.framework.intercept_band_ppb.low = kv_double(kv);
    } else if (k == "intercept_high_ppb") {
      c.framework.intercept_band_ppb.high = kv_double(kv);
    } else if (k == "min_completeness") {
      c.framework.min_completeness = kv_double(kv);
    } else if (k == "correction_trigger") {
      c.framework.correction_trigger = kv_int<int>(kv);
    } else if (k == "stride") {
      c.framework.stride = kv_int<int>(kv);
    } else if (k == "bin_width") {
      c.kl.bin_width = kv_double(kv);
    } else if (k == "hist_origin") {
      c.kl.origin = kv_double(kv);
    } else if (k == "kl_min_values") {
      c.kl.min_values = kv_int<std::size_t>(kv);
    } else if (k == "kl_smoothing") {
      c.kl.kl.smoothing = kv_bool(kv);
    } else if (k == "kl_direction") {
      if (kv.value == "site_to_proxy") {
        c.kl.direction = proxy::KlDirection::kSiteToProxy;
      } else if (kv.value == "proxy_to_site") {
        c.kl.direction = proxy::KlDirection::kProxyToSite;
      } else {
        throw Error(ErrorCode::kParse, "config line " + std::to_string(kv.line) +
                                           ": kl_direction must be site_to_proxy or proxy_to_site");
      }
    } else if (k == "dir_bin_deg") {
      c.wind.dir_bin_deg = kv_double(kv);
    } else if (k == "speed_bin_ms") {
      c.wind.speed_bin_ms = kv_double(kv);
    } else if (k == "clamp_negative") {
      c.clamp_negative = kv_bool(kv);
    } else {
      unknown_key(kv);
    }
  }
  c.framework.validate();
  if (!(c.kl.bin_width > 0.0)) throw Error(ErrorCode::kInvalidInput, "config: bin_width must be > 0");
  return c;
}

AnalysisConfig load_analysis_config(const std::filesystem::path& path, AnalysisConfig base) {
  return parse_analysis_config(read_text(path), std::move(base));
}

std::string analysis_config_text(const AnalysisConfig& c) {
  const auto& f = c.framework;
  std::string out;
  auto line = [&](std::string_view k, const std::string& v) {
    out += std::string(k) + " = " + v + '\n';
  };
  line("window_hours", std::to_string(f.window_hours));
  line("failure_hours", std::to_string(f.failure_hours));
  line("p_ks_threshold", format_double(f.p_ks_threshold));
  line("slope_low", format_double(f.slope_band.low));
  line("slope_high", format_double(f.slope_band.high));
  line("intercept_low_ppb", format_double(f.intercept_band_ppb.low));
  line("intercept_high_ppb", format_double(f.intercept_band_ppb.high));
  line("min_completeness", format_double(f.min_completeness));
  line("correction_trigger", std::to_string(f.correction_trigger));
  line("stride", std::to_string(f.stride));
  line("bin_width", format_double(c.kl.bin_width));
  line("hist_origin", format_double(c.kl.origin));
  line("kl_min_values", std::to_string(c.kl.min_values));
  line("kl_smoothing", c.kl.kl.smoothing ? "true" : "false");
  line("kl_direction", c.kl.direction == proxy::KlDirection::kSiteToProxy ? "site_to_proxy" : "proxy_to_site");
  line("dir_bin_deg", format_double(c.wind.dir_bin_deg));
  line("speed_bin_ms", format_double(c.wind.speed_bin_ms));
  line("clamp_negative", c.clamp_negative ? "true" : "false");
  return out;
}

namespace {

void set_site_param(sim::SiteSpec& s, std::string_view param, const KeyValue& kv) {
  if (param == "group") {
    s.group = kv.value;
  } else if (param == "baseline_ppb") {
    s.baseline_ppb = kv_double(kv);
  } else if (param == "diurnal_amp_ppb") {
    s.diurnal_amp_ppb = kv_double(kv);
  } else if (param == "morning_peak_hour") {
    s.morning_peak_hour = kv_double(kv);
  } else if (param == "evening_peak_hour") {
    s.evening_peak_hour = kv_double(kv);
  } else if (param == "seasonal_amp") {
    s.seasonal_amp = kv_double(kv);
  } else if (param == "spike_rate_per_hour") {
    s.spike_rate_per_hour = kv_double(kv);
  } else if (param == "spike_mag_ppb") {
    s.spike_mag_ppb = kv_double(kv);
  } else if (param == "noise_sd_ppb") {
    s.noise_sd_ppb = kv_double(kv);
  } else if (param == "low_wind_source_ppb") {
    s.low_wind_source_ppb = kv_double(kv);
  } else if (param == "lat") {
    s.latitude = kv_double(kv);
  } else if (param == "lon") {
    s.longitude = kv_double(kv);
  } else if (param == "dist_motorway_m") {
    s.features.dist_to_motorway_m = kv_double(kv);
  } else if (param == "elevation_m") {
    s.features.elevation_m = kv_double(kv);
  } else if (param == "road_length_1km_m") {
    s.features.road_length_1km_m = kv_double(kv);
  } else {
    unknown_key(kv);
  }
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

}  // namespace

sim::ScenarioSpec parse_scenario(std::string_view text) {
  const auto kvs = parse_key_values(text);
  sim::ScenarioSpec spec;

  // Presets first so that every other key overrides them.
  for (const auto& kv : kvs) {
    if (kv.key != "preset") continue;
    if (kv.value == "default_network") {
      spec = sim::default_network(spec.seed);
    } else if (kv.value == "same_group_pair") {
      spec = sim::same_group_pair(spec.seed, spec.hours);
    } else if (kv.value == "shifted_triad") {
      spec = sim::shifted_triad(spec.seed, 15.0);
    } else {
      throw Error(ErrorCode::kParse, "config line " + std::to_string(kv.line) + ": unknown preset '" + kv.value + "'");
    }
  }

  std::vector<const KeyValue*> defaults;
  std::vector<const KeyValue*> overrides;
  for (const auto& kv : kvs) {
    const auto& k = kv.key;
    if (k == "preset") continue;
    if (k == "seed") {
      spec.seed = kv_int<std::uint64_t>(kv);
    } else if (k == "hours") {
      spec.hours = kv_int<std::int64_t>(kv);
    } else if (k == "start") {
      const auto ts = parse_timestamp(kv.value);
      if (!ts.hour) throw Error(ErrorCode::kParse, "config line " + std::to_string(kv.line) + ": " + ts.error);
      spec.start = *ts.hour;
    } else if (k == "regional_sd") {
      spec.regional_sd = kv_double(kv);
    } else if (k == "regional_phi") {
      spec.regional_phi = kv_double(kv);
    } else if (k == "low_wind_threshold_ms") {
      spec.low_wind_threshold_ms = kv_double(kv);
    } else if (k == "wind.calm_speed_ms") {
      spec.wind.calm_speed_ms = kv_double(kv);
    } else if (k == "wind.windy_speed_ms") {
      spec.wind.windy_speed_ms = kv_double(kv);
    } else if (k == "wind.mean_episode_hours") {
      spec.wind.mean_episode_hours = kv_double(kv);
    } else if (k == "wind.calm_fraction") {
      spec.wind.calm_fraction = kv_double(kv);
    } else if (k == "wind.prevailing_dir_deg") {
      spec.wind.prevailing_dir_deg = kv_double(kv);
    } else if (k == "wind.dir_spread_deg") {
      spec.wind.dir_spread_deg = kv_double(kv);
    } else if (k == "site") {
      const auto w = words(kv.value);
      if (w.empty() || w.size() > 2)
        throw Error(ErrorCode::kParse, "config line " + std::to_string(kv.line) + ": expected 'site = ID [GROUP]'");
      sim::SiteSpec s;
      s.site_id = w[0];
      s.latitude = 34.0 + 0.02 * static_cast<double>(spec.sites.size());
      if (w.size() == 2) s.group = w[1];
      spec.sites.push_back(std::move(s));
    } else if (k == "drift") {
      const auto w = words(kv.value);
      if (w.size() != 4 && w.size() != 5)
        throw Error(ErrorCode::kParse, "config line " + std::to_string(kv.line) +
                                           ": expected 'drift = SITE KIND ONSET_HOUR MAGNITUDE [RAMP_HOURS]'");
      sim::DriftEvent e;
      e.site_id = w[0];
      e.kind = sim::parse_drift_kind(w[1]);
      const auto onset = to_int<std::int64_t>(w[2]);
      const auto mag = to_double(w[3]);
      const auto ramp = w.size() == 5 ? to_int<std::int64_t>(w[4]) : std::optional<std::int64_t>(0);
      if (!onset || !mag || !ramp)
        throw Error(ErrorCode::kParse, "config line " + std::to_string(kv.line) + ": bad drift numbers");
      e.onset_hour = *onset;
      e.magnitude = *mag;
      e.ramp_hours = *ramp;
      spec.drifts.push_back(std::move(e));
    } else if (k.starts_with("default.")) {
      defaults.push_back(&kv);
    } else if (k.find('.') != std::string::npos) {
      overrides.push_back(&kv);
    } else {
      unknown_key(kv);
    }
  }

  for (const KeyValue* kv : defaults) {
    const auto param = std::string_view(kv->key).substr(8);
    for (auto& s : spec.sites) set_site_param(s, param, *kv);
  }
  for (const KeyValue* kv : overrides) {
    const auto dot = kv->key.find('.');
    const auto id = kv->key.substr(0, dot);
    auto it = std::find_if(spec.sites.begin(), spec.sites.end(), [&](const sim::SiteSpec& s) { return s.site_id == id; });
    if (it == spec.sites.end())
      throw Error(ErrorCode::kParse, "config line " + std::to_string(kv->line) + ": unknown site '" + id + "'");
    set_site_param(*it, std::string_view(kv->key).substr(dot + 1), *kv);
  }
  spec.validate();
  return spec;
}

sim::ScenarioSpec load_scenario(const std::filesystem::path& path) { return parse_scenario(read_text(path)); }

}  // namespace proxycal::io
