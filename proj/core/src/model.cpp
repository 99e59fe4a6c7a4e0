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

#include "proxycal/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>

#include "proxycal/error.hpp"

namespace proxycal {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid_input";
    case ErrorCode::kInsufficientData: return "insufficient_data";
    case ErrorCode::kMismatch: return "mismatch";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

Hour hour_from_civil(int year, unsigned month, unsigned day, unsigned hour) {
  using namespace std::chrono;
  const sys_days days{year_month_day{std::chrono::year{year}, std::chrono::month{month},
                                     std::chrono::day{day}}};
  return Hour{days.time_since_epoch().count() * 24 + static_cast<std::int64_t>(hour)};
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

int hour_of_day(Hour h) { return static_cast<int>(h.value - floor_div(h.value, 24) * 24); }

std::string to_iso8601(Hour h) {
  using namespace std::chrono;
  const std::int64_t day_count = floor_div(h.value, 24);
  const year_month_day ymd{sys_days{days{day_count}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:00:00Z", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                hour_of_day(h));
  return buf;
}

std::vector<std::optional<double>> HourlySeries::concentrations() const {
  std::vector<std::optional<double>> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.no2_ppb);
  return out;
}

bool HourlySeries::has_wind() const {
  return std::any_of(samples.begin(), samples.end(), [](const HourlySample& s) {
    return s.wind_speed_ms.has_value() && s.wind_dir_deg.has_value();
  });
}

std::size_t HourlySeries::present_count() const {
  return static_cast<std::size_t>(std::count_if(
      samples.begin(), samples.end(), [](const HourlySample& s) { return s.no2_ppb.has_value(); }));
}

const SiteRecord* NetworkDataset::find_site(std::string_view id) const {
  auto it = std::find_if(sites.begin(), sites.end(),
                         [&](const SiteRecord& s) { return s.site_id == id; });
  return it == sites.end() ? nullptr : &*it;
}

const HourlySeries& NetworkDataset::series_for(const std::string& id) const {
  auto it = series.find(id);
  if (it == series.end()) throw Error(ErrorCode::kMismatch, "no series for site '" + id + "'");
  return it->second;
}

std::string_view to_string(ProxyMethod method) {
  switch (method) {
    case ProxyMethod::kKnnLandUse: return "knn_landuse";
    case ProxyMethod::kNearestGeo: return "nearest_geo";
    case ProxyMethod::kMinKl: return "min_kl";
  }
  return "unknown";
}

ProxyMethod parse_proxy_method(std::string_view text) {
  if (text == "knn_landuse" || text == "knn") return ProxyMethod::kKnnLandUse;
  if (text == "nearest_geo" || text == "nearest") return ProxyMethod::kNearestGeo;
  if (text == "min_kl") return ProxyMethod::kMinKl;
  throw Error(ErrorCode::kParse, "unknown proxy method '" + std::string(text) + "'");
}

std::string Violation::describe() const {
  std::string out = site_id.empty() ? std::string("<dataset>") : site_id;
  out += ": " + field;
  if (at) out += " at " + to_iso8601(*at);
  out += ": " + reason;
  return out;
}

std::vector<double> present_values(std::span<const std::optional<double>> values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    if (v) out.push_back(*v);
  }
  return out;
}

std::vector<Violation> validate_site(const SiteRecord& site) {
  std::vector<Violation> out;
  auto bad = [&](std::string field, std::string reason) {
    out.push_back({site.site_id, std::move(field), std::move(reason), std::nullopt});
  };
  if (site.site_id.empty()) bad("site_id", "empty site_id");
  if (!std::isfinite(site.latitude) || site.latitude < -90.0 || site.latitude > 90.0)
    bad("latitude", "outside [-90, 90]");
  if (!std::isfinite(site.longitude) || site.longitude < -180.0 || site.longitude > 180.0)
    bad("longitude", "outside [-180, 180]");
  const auto& f = site.features;
  if (!std::isfinite(f.dist_to_motorway_m) || f.dist_to_motorway_m < 0.0)
    bad("dist_to_motorway", "must be finite and >= 0");
  if (!std::isfinite(f.elevation_m)) bad("elevation", "must be finite");
  if (!std::isfinite(f.road_length_1km_m) || f.road_length_1km_m < 0.0)
    bad("road_length_1km", "must be finite and >= 0");
  return out;
}

namespace {

void validate_series(const std::string& key, HourlySeries& series, const ValidationOptions& options,
                     std::vector<Violation>& out) {
  auto bad = [&](std::string field, std::string reason, std::optional<Hour> at) {
    out.push_back({key, std::move(field), std::move(reason), at});
  };
  if (series.site_id != key) bad("site_id", "series keyed as '" + key + "' names '" + series.site_id + "'", std::nullopt);
  if (series.samples.empty()) {
    bad("samples", "empty series", std::nullopt);
    return;
  }
  for (std::size_t i = 0; i < series.samples.size(); ++i) {
    auto& s = series.samples[i];
    if (i > 0) {
      const Hour prev = series.samples[i - 1].at;
      if (s.at <= prev) {
        bad("timestamp", "non-monotone timestamp", s.at);
      } else if (s.at - prev != 1) {
        bad("timestamp", "gap of " + std::to_string(s.at - prev - 1) + " hours not stored as missing", s.at);
      }
    }
    if (s.no2_ppb) {
      if (!std::isfinite(*s.no2_ppb)) {
        bad("no2_ppb", "non-finite concentration", s.at);
      } else if (*s.no2_ppb < 0.0) {
        if (options.clamp_negative) {
          s.no2_ppb = 0.0;
        } else {
          bad("no2_ppb", "negative concentration " + std::to_string(*s.no2_ppb), s.at);
        }
      }
    }
    if (s.wind_speed_ms && (!std::isfinite(*s.wind_speed_ms) || *s.wind_speed_ms < 0.0))
      bad("wind_speed_ms", "must be finite and >= 0", s.at);
    if (s.wind_dir_deg &&
        (!std::isfinite(*s.wind_dir_deg) || *s.wind_dir_deg < 0.0 || *s.wind_dir_deg >= 360.0))
      bad("wind_dir_deg", "must lie in [0, 360)", s.at);
  }
}

}  // namespace

ValidationOutcome validate_dataset(NetworkDataset raw, const ValidationOptions& options) {
  std::vector<Violation> violations;

  std::sort(raw.sites.begin(), raw.sites.end(),
            [](const SiteRecord& a, const SiteRecord& b) { return a.site_id < b.site_id; });
  std::set<std::string> ids;
  for (const auto& site : raw.sites) {
    auto v = validate_site(site);
    violations.insert(violations.end(), v.begin(), v.end());
    if (!site.site_id.empty() && !ids.insert(site.site_id).second)
      violations.push_back({site.site_id, "site_id", "duplicate site_id", std::nullopt});
  }

  std::optional<std::pair<Hour, Hour>> bounds;
  for (auto& [key, series] : raw.series) {
    if (!ids.contains(key))
      violations.push_back({key, "site_id", "orphan series: no matching site record", std::nullopt});
    validate_series(key, series, options, violations);
    if (series.samples.empty()) continue;
    const std::pair<Hour, Hour> b{series.first_hour(), series.last_hour()};
    if (!bounds) {
      bounds = b;
    } else if (*bounds != b) {
      violations.push_back({key, "epoch",
                            "epoch [" + to_iso8601(b.first) + ", " + to_iso8601(b.second) +
                                "] differs from [" + to_iso8601(bounds->first) + ", " +
                                to_iso8601(bounds->second) + "]",
                            std::nullopt});
    }
  }

  ValidationOutcome outcome;
  outcome.violations = std::move(violations);
  if (outcome.violations.empty()) outcome.dataset = std::move(raw);
  return outcome;
}

NetworkDataset validated_or_throw(NetworkDataset raw, const ValidationOptions& options) {
  auto outcome = validate_dataset(std::move(raw), options);
  if (outcome.ok()) return std::move(*outcome.dataset);
  std::string message = std::to_string(outcome.violations.size()) + " validation error(s)";
  for (const auto& v : outcome.violations) message += "\n  " + v.describe();
  throw Error(ErrorCode::kInvalidInput, message);
}

}  // namespace proxycal
