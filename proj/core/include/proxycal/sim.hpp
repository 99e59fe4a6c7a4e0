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

#ifndef PROXYCAL_SIM_HPP_
#define PROXYCAL_SIM_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "proxycal/drift.hpp"
#include "proxycal/model.hpp"

namespace proxycal::sim {

enum class DriftKind { kGainRamp, kOffsetStep };

std::string_view to_string(DriftKind kind);
DriftKind parse_drift_kind(std::string_view text);

struct DriftEvent {
  std::string site_id;
  // Hours after the scenario start.
  std::int64_t onset_hour = 0;
  DriftKind kind = DriftKind::kOffsetStep;
  // Final gain for kGainRamp, ppb for kOffsetStep.
  double magnitude = 0.0;
  // Gain ramps linearly from 1 to magnitude over ramp_hours; 0 means a step.
  std::int64_t ramp_hours = 0;

  friend bool operator==(const DriftEvent&, const DriftEvent&) = default;
};

struct SiteSpec {
  std::string site_id;
  std::string group = "regional";
  double baseline_ppb = 20.0;
  double diurnal_amp_ppb = 10.0;
  double morning_peak_hour = 7.0;
  double evening_peak_hour = 19.0;
  // Relative winter-to-summer swing of the regional level and spread.
  double seasonal_amp = 0.35;
  double spike_rate_per_hour = 0.02;
  double spike_mag_ppb = 3.0;
  double noise_sd_ppb = 1.5;
  // Extra local source added while wind speed is below the scenario's
  // low_wind_threshold_ms.
  double low_wind_source_ppb = 0.0;
  double latitude = 34.0;
  double longitude = -118.0;
  LandUseFeatures features;
};

// Wind alternates between calm and windy episodes of random length.
struct WindSpec {
  double calm_speed_ms = 2.0;
  double windy_speed_ms = 8.0;
  double mean_episode_hours = 240.0;
  double calm_fraction = 0.5;
  double prevailing_dir_deg = 250.0;
  double dir_spread_deg = 45.0;
};

struct ScenarioSpec {
  std::uint64_t seed = 1;
  std::int64_t hours = 24 * 212;
  Hour start = hour_from_civil(2018, 1, 1, 0);
  // Regional log-level AR(1) process shared by sites of one group.
  double regional_sd = 0.5;
  double regional_phi = 0.97;
  double low_wind_threshold_ms = 5.0;
  std::vector<SiteSpec> sites;
  std::vector<DriftEvent> drifts;
  WindSpec wind;

  // Throws Error(kInvalidInput) for the first invalid field.
  void validate() const;
};

// Nine sites in three similarity groups.
ScenarioSpec default_network(std::uint64_t seed);
// Two sites sharing one regional group.
ScenarioSpec same_group_pair(std::uint64_t seed, std::int64_t hours);
// Three sites over 60 days from one generator; C's baseline is raised by
// shift_ppb.
ScenarioSpec shifted_triad(std::uint64_t seed, double shift_ppb);

struct DriftSchedule {
  Hour epoch_start;
  std::vector<DriftEvent> events;
};

struct GroundTruth {
  // True concentration X per site, aligned with the dataset epoch.
  std::map<std::string, std::vector<double>> true_ppb;
  DriftSchedule schedule;
};

struct Scenario {
  NetworkDataset dataset;
  GroundTruth truth;
};

// Observed Y = drift(X) + noise, clamped at zero.
Scenario generate(const ScenarioSpec& spec);

// Gain (and offset) applied by the drift schedule to one site at an hour
// offset: observed = gain * true + offset before noise.
struct AffineDrift {
  double gain = 1.0;
  double offset = 0.0;
};
AffineDrift drift_at(const std::vector<DriftEvent>& events, const std::string& site_id,
                     std::int64_t hour_offset);

struct EventScore {
  DriftEvent event;
  // Failure-span start minus onset for the first span reaching the onset;
  // any test, and per test.
  std::optional<std::int64_t> latency_hours;
  std::array<std::optional<std::int64_t>, drift::kTestCount> latency_by_test{};

  bool detected() const { return latency_hours.has_value(); }
};

struct DetectionScore {
  std::size_t clean_evaluable_hours = 0;
  std::size_t clean_alarm_hours = 0;
  double false_alarm_rate = 0.0;
  std::vector<EventScore> events;
  std::size_t missed = 0;
};

// Events at either the site or its proxy make the hours from their onset
// onward "dirty"; every other evaluable hour is clean.
DetectionScore score_detection(const drift::FrameworkState& state, const DriftSchedule& truth);

struct BinomialInterval {
  double estimate = 0.0;
  double low = 0.0;
  double high = 0.0;
};

BinomialInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

}  // namespace proxycal::sim

#endif  // PROXYCAL_SIM_HPP_
