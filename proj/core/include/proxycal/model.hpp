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

#ifndef PROXYCAL_MODEL_HPP_
#define PROXYCAL_MODEL_HPP_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace proxycal {

// UTC time expressed as whole hours since 1970-01-01T00:00:00Z.
struct Hour {
  std::int64_t value = 0;

  friend constexpr auto operator<=>(Hour, Hour) = default;
  friend constexpr Hour operator+(Hour h, std::int64_t n) { return Hour{h.value + n}; }
  friend constexpr Hour operator-(Hour h, std::int64_t n) { return Hour{h.value - n}; }
  friend constexpr std::int64_t operator-(Hour a, Hour b) { return a.value - b.value; }
};

Hour hour_from_civil(int year, unsigned month, unsigned day, unsigned hour);

// "YYYY-MM-DDTHH:00:00Z".
std::string to_iso8601(Hour h);

// Hour of day in [0, 24).
int hour_of_day(Hour h);

struct LandUseFeatures {
  double dist_to_motorway_m = 0.0;
  double elevation_m = 0.0;
  double road_length_1km_m = 0.0;

  friend bool operator==(const LandUseFeatures&, const LandUseFeatures&) = default;
};

struct SiteRecord {
  std::string site_id;
  std::string name;
  double latitude = 0.0;
  double longitude = 0.0;
  LandUseFeatures features;

  friend bool operator==(const SiteRecord&, const SiteRecord&) = default;
};

// One hour of observations. Absent optionals are explicit missing values.
struct HourlySample {
  Hour at;
  std::optional<double> no2_ppb;
  std::optional<double> wind_speed_ms;
  std::optional<double> wind_dir_deg;

  friend bool operator==(const HourlySample&, const HourlySample&) = default;
};

struct HourlySeries {
  std::string site_id;
  std::vector<HourlySample> samples;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
  Hour first_hour() const { return samples.front().at; }
  Hour last_hour() const { return samples.back().at; }

  std::vector<std::optional<double>> concentrations() const;
  bool has_wind() const;
  std::size_t present_count() const;

  friend bool operator==(const HourlySeries&, const HourlySeries&) = default;
};

// Sites are kept ordered by site_id; series are keyed by site_id.
struct NetworkDataset {
  std::vector<SiteRecord> sites;
  std::map<std::string, HourlySeries> series;

  const SiteRecord* find_site(std::string_view id) const;
  const HourlySeries& series_for(const std::string& id) const;

  friend bool operator==(const NetworkDataset&, const NetworkDataset&) = default;
};

enum class ProxyMethod { kKnnLandUse, kNearestGeo, kMinKl };

std::string_view to_string(ProxyMethod method);
ProxyMethod parse_proxy_method(std::string_view text);

struct ProxyAssignment {
  std::string site_id;
  std::string proxy_id;
  ProxyMethod method = ProxyMethod::kKnnLandUse;
  // Feature-space distance, km, or nats depending on method.
  double score = 0.0;

  friend bool operator==(const ProxyAssignment&, const ProxyAssignment&) = default;
};

struct Violation {
  std::string site_id;
  std::string field;
  std::string reason;
  std::optional<Hour> at;

  std::string describe() const;
};

struct ValidationOptions {
  // Replace negative concentrations by zero instead of reporting them.
  bool clamp_negative = false;
};

struct ValidationOutcome {
  std::optional<NetworkDataset> dataset;
  std::vector<Violation> violations;

  bool ok() const { return dataset.has_value(); }
};

// Checks every invariant of the model types and returns either the
// (canonicalized) dataset or the complete list of violations.
ValidationOutcome validate_dataset(NetworkDataset raw, const ValidationOptions& options = {});

// Throws Error(kInvalidInput) listing all violations.
NetworkDataset validated_or_throw(NetworkDataset raw, const ValidationOptions& options = {});

std::vector<Violation> validate_site(const SiteRecord& site);

// Present values of an optional sequence, in order.
std::vector<double> present_values(std::span<const std::optional<double>> values);

}  // namespace proxycal

#endif  // PROXYCAL_MODEL_HPP_
