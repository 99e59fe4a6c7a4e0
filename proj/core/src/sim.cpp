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

#include "proxycal/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "proxycal/error.hpp"

namespace proxycal::sim {

std::string_view to_string(DriftKind kind) {
  switch (kind) {
    case DriftKind::kGainRamp: return "gain_ramp";
    case DriftKind::kOffsetStep: return "offset_step";
  }
  return "unknown";
}

DriftKind parse_drift_kind(std::string_view text) {
  if (text == "gain_ramp") return DriftKind::kGainRamp;
  if (text == "offset_step") return DriftKind::kOffsetStep;
  throw Error(ErrorCode::kParse, "unknown drift kind '" + std::string(text) + "'");
}

void ScenarioSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidInput, "scenario: " + what); };
  auto finite = [](double v) { return std::isfinite(v); };
  if (hours <= 0) fail("hours must be > 0");
  if (sites.empty()) fail("at least one site is required");
  if (!finite(regional_sd) || regional_sd < 0.0) fail("regional_sd must be finite and >= 0");
  if (!finite(regional_phi) || regional_phi < 0.0 || regional_phi >= 1.0) fail("regional_phi must lie in [0, 1)");
  if (!finite(low_wind_threshold_ms) || low_wind_threshold_ms < 0.0) fail("low_wind_threshold_ms must be >= 0");
  if (!finite(wind.calm_speed_ms) || wind.calm_speed_ms <= 0.0) fail("wind.calm_speed_ms must be > 0");
  if (!finite(wind.windy_speed_ms) || wind.windy_speed_ms <= 0.0) fail("wind.windy_speed_ms must be > 0");
  if (!finite(wind.mean_episode_hours) || wind.mean_episode_hours < 1.0) fail("wind.mean_episode_hours must be >= 1");
  if (!finite(wind.calm_fraction) || wind.calm_fraction < 0.0 || wind.calm_fraction > 1.0)
    fail("wind.calm_fraction must lie in [0, 1]");
  if (!finite(wind.prevailing_dir_deg) || !finite(wind.dir_spread_deg) || wind.dir_spread_deg < 0.0)
    fail("wind direction parameters must be finite, spread >= 0");

  std::set<std::string> ids;
  for (const auto& s : sites) {
    const std::string where = "site '" + s.site_id + "': ";
    if (s.site_id.empty()) fail("empty site_id");
    if (!ids.insert(s.site_id).second) fail("duplicate site_id '" + s.site_id + "'");
    if (s.group.empty()) fail(where + "empty group");
    for (double v : {s.baseline_ppb, s.diurnal_amp_ppb, s.morning_peak_hour, s.evening_peak_hour, s.seasonal_amp,
                     s.spike_rate_per_hour, s.spike_mag_ppb, s.noise_sd_ppb, s.low_wind_source_ppb}) {
      if (!finite(v)) fail(where + "non-finite parameter");
    }
    if (s.baseline_ppb < 0.0 || s.diurnal_amp_ppb < 0.0 || s.spike_mag_ppb < 0.0 || s.noise_sd_ppb < 0.0 ||
        s.low_wind_source_ppb < 0.0)
      fail(where + "magnitudes must be >= 0");
    if (s.seasonal_amp < 0.0 || s.seasonal_amp >= 1.0) fail(where + "seasonal_amp must lie in [0, 1)");
    if (s.spike_rate_per_hour < 0.0 || s.spike_rate_per_hour > 1.0) fail(where + "spike_rate_per_hour must lie in [0, 1]");
    for (const auto& v : validate_site({s.site_id, s.site_id, s.latitude, s.longitude, s.features}))
      fail(v.describe());
  }
  for (const auto& d : drifts) {
    if (!ids.contains(d.site_id)) fail("drift names unknown site '" + d.site_id + "'");
    if (d.onset_hour < 0 || d.onset_hour >= hours) fail("drift onset outside the epoch");
    if (!finite(d.magnitude)) fail("non-finite drift magnitude");
    if (d.kind == DriftKind::kGainRamp && d.magnitude <= 0.0) fail("gain_ramp magnitude must be > 0");
    if (d.ramp_hours < 0) fail("ramp_hours must be >= 0");
  }
}

namespace {

SiteSpec make_site(std::string id, std::string group, double baseline, double lat, double lon,
                   LandUseFeatures features) {
  SiteSpec s;
  s.site_id = std::move(id);
  s.group = std::move(group);
  s.baseline_ppb = baseline;
  s.latitude = lat;
  s.longitude = lon;
  s.features = features;
  return s;
}

}  // namespace

ScenarioSpec default_network(std::uint64_t seed) {
  ScenarioSpec spec;
  spec.seed = seed;
  struct GroupDef {
    const char* name;
    double baseline;
    double diurnal;
    double lat;
    double lon;
    LandUseFeatures features;
  };
  const GroupDef groups[] = {
      {"urban", 26.0, 12.0, 34.00, -118.20, {900.0, 40.0, 6500.0}},
      {"inland", 18.0, 8.0, 34.05, -117.40, {2600.0, 300.0, 2000.0}},
      {"coastal", 12.0, 6.0, 33.85, -118.40, {4000.0, 20.0, 4000.0}},
  };
  int g = 0;
  for (const auto& def : groups) {
    for (int k = 0; k < 3; ++k) {
      const std::string id = std::string(1, static_cast<char>('A' + g)) + std::to_string(k + 1);
      LandUseFeatures f = def.features;
      f.dist_to_motorway_m += 90.0 * k;
      f.elevation_m += 6.0 * k;
      f.road_length_1km_m += 150.0 * k;
      auto s = make_site(id, def.name, def.baseline, def.lat + 0.04 * k, def.lon + 0.05 * k, f);
      s.diurnal_amp_ppb = def.diurnal;
      spec.sites.push_back(s);
    }
    ++g;
  }
  return spec;
}

ScenarioSpec same_group_pair(std::uint64_t seed, std::int64_t hours) {
  ScenarioSpec spec;
  spec.seed = seed;
  spec.hours = hours;
  spec.sites.push_back(make_site("A", "regional", 20.0, 34.00, -118.20, {1000.0, 50.0, 6000.0}));
  spec.sites.push_back(make_site("B", "regional", 20.0, 34.05, -118.15, {1100.0, 60.0, 5800.0}));
  return spec;
}

ScenarioSpec shifted_triad(std::uint64_t seed, double shift_ppb) {
  ScenarioSpec spec;
  spec.seed = seed;
  spec.hours = 24 * 60;
  spec.sites.push_back(make_site("A", "regional", 20.0, 34.00, -118.20, {1000.0, 50.0, 6000.0}));
  spec.sites.push_back(make_site("B", "regional", 20.0, 34.05, -118.15, {1100.0, 60.0, 5800.0}));
  spec.sites.push_back(make_site("C", "regional", 20.0 + shift_ppb, 34.10, -118.10, {1200.0, 70.0, 5600.0}));
  return spec;
}

AffineDrift drift_at(const std::vector<DriftEvent>& events, const std::string& site_id, std::int64_t hour_offset) {
  AffineDrift d;
  for (const auto& e : events) {
    if (e.site_id != site_id || hour_offset < e.onset_hour) continue;
    if (e.kind == DriftKind::kOffsetStep) {
      d.offset += e.magnitude;
    } else {
      const double frac =
          e.ramp_hours == 0
              ? 1.0
              : std::min(1.0, static_cast<double>(hour_offset - e.onset_hour) / static_cast<double>(e.ramp_hours));
      d.gain *= 1.0 + (e.magnitude - 1.0) * frac;
    }
  }
  return d;
}

namespace {

double wrap_deg(double d) {
  double w = std::fmod(d, 360.0);
  if (w < 0.0) w += 360.0;
  if (w >= 360.0) w = 0.0;
  return w;
}

// Signed distance between hours of day on the 24 h circle.
double hour_gap(double h, double peak) { return std::fmod(h - peak + 36.0, 24.0) - 12.0; }

struct WindHour {
  double speed;
  double dir;
};

std::vector<WindHour> generate_wind(const ScenarioSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::exponential_distribution<double> episode(1.0 / spec.wind.mean_episode_hours);
  std::vector<WindHour> out;
  out.reserve(static_cast<std::size_t>(spec.hours));
  bool calm = false;
  std::int64_t left = 0;
  for (std::int64_t t = 0; t < spec.hours; ++t) {
    if (left <= 0) {
      calm = unif(rng) < spec.wind.calm_fraction;
      left = std::max<std::int64_t>(24, static_cast<std::int64_t>(std::llround(episode(rng))));
    }
    --left;
    const double speed = calm ? spec.wind.calm_speed_ms * std::exp(0.25 * norm(rng))
                              : spec.wind.windy_speed_ms * std::exp(0.2 * norm(rng));
    const double dir = spec.wind.prevailing_dir_deg + spec.wind.dir_spread_deg * norm(rng);
    out.push_back({speed, wrap_deg(dir)});
  }
  return out;
}

}  // namespace

Scenario generate(const ScenarioSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const auto n = static_cast<std::size_t>(spec.hours);
  const auto wind = generate_wind(spec, rng);

  std::map<std::string, std::vector<double>> regional;
  for (const auto& s : spec.sites) regional.emplace(s.group, std::vector<double>{});
  const double innov = std::sqrt(1.0 - spec.regional_phi * spec.regional_phi);
  for (auto& [group, level] : regional) {
    level.resize(n);
    double a = norm(rng);
    for (std::size_t t = 0; t < n; ++t) {
      if (t > 0) a = spec.regional_phi * a + innov * norm(rng);
      level[t] = std::exp(spec.regional_sd * a - 0.5 * spec.regional_sd * spec.regional_sd);
    }
  }

  Scenario out;
  out.truth.schedule = {spec.start, spec.drifts};
  for (const auto& s : spec.sites) {
    const auto& level = regional.at(s.group);
    std::vector<double> truth(n);
    HourlySeries series;
    series.site_id = s.site_id;
    series.samples.resize(n);
    std::exponential_distribution<double> spike(s.spike_mag_ppb > 0.0 ? 1.0 / s.spike_mag_ppb : 1.0);
    double local = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const Hour at = spec.start + static_cast<std::int64_t>(t);
      const double day = static_cast<double>(at.value) / 24.0;
      const double season = 1.0 + s.seasonal_amp * std::cos(2.0 * std::numbers::pi * day / 365.25 -
                                                             2.0 * std::numbers::pi * 10.0 / 365.25);
      const double h = static_cast<double>(hour_of_day(at));
      const double gm = hour_gap(h, s.morning_peak_hour);
      const double ge = hour_gap(h, s.evening_peak_hour);
      const double diurnal = std::exp(-0.5 * gm * gm / 2.25) + 0.8 * std::exp(-0.5 * ge * ge / 6.25);

      const bool fire = unif(rng) < s.spike_rate_per_hour;
      const double jump = spike(rng);
      local = 0.6 * local + (fire && s.spike_mag_ppb > 0.0 ? jump : 0.0);

      double x = season * level[t] * (s.baseline_ppb + s.diurnal_amp_ppb * diurnal) + local;
      const double calm_draw = unif(rng);
      if (s.low_wind_source_ppb > 0.0 && wind[t].speed < spec.low_wind_threshold_ms)
        x += s.low_wind_source_ppb * (0.5 + calm_draw);
      x = std::max(0.0, x);
      truth[t] = x;

      const auto d = drift_at(spec.drifts, s.site_id, static_cast<std::int64_t>(t));
      const double noise = s.noise_sd_ppb * norm(rng);
      auto& sample = series.samples[t];
      sample.at = at;
      sample.no2_ppb = std::max(0.0, d.gain * x + d.offset + noise);
      sample.wind_speed_ms = wind[t].speed;
      sample.wind_dir_deg = wind[t].dir;
    }
    out.truth.true_ppb.emplace(s.site_id, std::move(truth));
    out.dataset.series.emplace(s.site_id, std::move(series));
    out.dataset.sites.push_back({s.site_id, s.site_id, s.latitude, s.longitude, s.features});
  }
  std::sort(out.dataset.sites.begin(), out.dataset.sites.end(),
            [](const SiteRecord& a, const SiteRecord& b) { return a.site_id < b.site_id; });
  return out;
}

DetectionScore score_detection(const drift::FrameworkState& state, const DriftSchedule& truth) {
  DetectionScore score;
  std::vector<const DriftEvent*> relevant;
  for (const auto& e : truth.events) {
    if (e.site_id == state.site_id || e.site_id == state.proxy_id) relevant.push_back(&e);
  }
  if (!state.trail.empty() && state.trail.front().at < truth.epoch_start)
    throw Error(ErrorCode::kMismatch, "score_detection: trail starts before the scenario epoch");

  std::optional<Hour> first_dirty;
  for (const auto* e : relevant) {
    const Hour onset = truth.epoch_start + e->onset_hour;
    if (!first_dirty || onset < *first_dirty) first_dirty = onset;
  }
  for (const auto& tv : state.trail) {
    if (!tv.evaluable()) continue;
    if (first_dirty && tv.at >= *first_dirty) continue;
    ++score.clean_evaluable_hours;
    if (tv.alarm_sum() > 0) ++score.clean_alarm_hours;
  }
  score.false_alarm_rate = score.clean_evaluable_hours == 0
                               ? 0.0
                               : static_cast<double>(score.clean_alarm_hours) /
                                     static_cast<double>(score.clean_evaluable_hours);

  for (const auto* e : relevant) {
    EventScore es{*e, std::nullopt, {}};
    const Hour onset = truth.epoch_start + e->onset_hour;
    for (drift::Test t : drift::kAllTests) {
      const auto k = static_cast<std::size_t>(t);
      for (const auto& sp : state.failure_spans[k]) {
        if (sp.end < onset) continue;
        es.latency_by_test[k] = std::max<std::int64_t>(0, sp.start - onset);
        break;
      }
      if (es.latency_by_test[k] && (!es.latency_hours || *es.latency_by_test[k] < *es.latency_hours))
        es.latency_hours = es.latency_by_test[k];
    }
    if (!es.detected()) ++score.missed;
    score.events.push_back(std::move(es));
  }
  return score;
}

BinomialInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {p, std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace proxycal::sim
