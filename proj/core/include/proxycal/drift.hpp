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

#ifndef PROXYCAL_DRIFT_HPP_
#define PROXYCAL_DRIFT_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proxycal/model.hpp"

namespace proxycal::drift {

enum class Test : std::size_t { kKs = 0, kSlope = 1, kIntercept = 2 };
inline constexpr std::size_t kTestCount = 3;
inline constexpr std::array<Test, kTestCount> kAllTests{Test::kKs, Test::kSlope, Test::kIntercept};

std::string_view to_string(Test t);

struct Band {
  double low = 0.0;
  double high = 0.0;

  bool contains(double v) const { return v >= low && v <= high; }
};

struct FrameworkConfig {
  int window_hours = 72;
  int failure_hours = 120;
  double p_ks_threshold = 0.05;
  Band slope_band{0.75, 1.25};
  Band intercept_band_ppb{-5.0, 5.0};
  double min_completeness = 0.75;
  // Minimum number of simultaneously failing tests that activates correction.
  int correction_trigger = 2;
  // Evaluate every `stride` hours.
  int stride = 1;

  // Throws Error(kInvalidInput) naming the first violated constraint.
  void validate() const;
};

struct TestVector {
  Hour at;
  std::optional<double> ks_p;
  std::optional<double> slope;
  std::optional<double> intercept;
  std::array<bool, kTestCount> alarms{};
  // Smaller of the two window completeness fractions.
  double completeness = 0.0;
  // A window variance was zero.
  bool degenerate = false;

  bool evaluable() const { return ks_p.has_value(); }
  int alarm_sum() const { return int{alarms[0]} + int{alarms[1]} + int{alarms[2]}; }
  bool alarm(Test t) const { return alarms[static_cast<std::size_t>(t)]; }
};

// Inclusive hour interval.
struct Span {
  Hour start;
  Hour end;

  friend bool operator==(const Span&, const Span&) = default;
};

struct FrameworkState {
  std::string site_id;
  std::string proxy_id;
  int stride = 1;
  std::vector<TestVector> trail;
  std::array<std::vector<Span>, kTestCount> failure_spans;
  std::vector<Span> correction_active_spans;

  const std::vector<Span>& spans(Test t) const { return failure_spans[static_cast<std::size_t>(t)]; }
  // Number of tests in failure at trail entry i.
  int failing_count(std::size_t i) const;
  bool correction_active(std::size_t i) const;

  // Per-entry failure bitmask (bit = Test index); filled by run_framework.
  std::vector<std::uint8_t> failing_mask;
};

// Window arguments are the trailing window_hours values (missing allowed).
TestVector evaluate_window(std::span<const std::optional<double>> site_window,
                           std::span<const std::optional<double>> proxy_window,
                           const FrameworkConfig& cfg, Hour at = Hour{});

FrameworkState run_framework(const HourlySeries& site, const HourlySeries& proxy,
                             const FrameworkConfig& cfg);

// Failure spans for one test: a span opens at the entry where the alarm has
// held continuously for failure_hours (counting each entry as `stride` hours)
// and closes at the last alarmed entry before the first non-alarm entry.
std::vector<Span> failure_spans(std::span<const Hour> at, const std::vector<bool>& alarm,
                                int failure_hours, int stride);

// Maximal runs of entries where `active` is true.
std::vector<Span> active_spans(std::span<const Hour> at, const std::vector<bool>& active);

struct AlarmSummary {
  std::size_t entries = 0;
  std::size_t evaluable = 0;
  std::array<std::size_t, kTestCount> alarm_hours{};
  std::array<double, kTestCount> alarm_fraction{};
  std::size_t any_alarm_hours = 0;
  double any_alarm_fraction = 0.0;
  std::array<std::size_t, kTestCount> failure_span_count{};
  std::array<std::int64_t, kTestCount> failure_hours_total{};
  std::size_t correction_span_count = 0;
  std::int64_t correction_hours_total = 0;
};

AlarmSummary alarm_summary(const FrameworkState& state);

}  // namespace proxycal::drift

#endif  // PROXYCAL_DRIFT_HPP_
