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

#include "proxycal/drift.hpp"

#include <algorithm>
#include <cmath>

#include "proxycal/error.hpp"
#include "proxycal/stats.hpp"

namespace proxycal::drift {

std::string_view to_string(Test t) {
  switch (t) {
    case Test::kKs: return "ks";
    case Test::kSlope: return "slope";
    case Test::kIntercept: return "intercept";
  }
  return "unknown";
}

void FrameworkConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidInput, "framework config: " + what); };
  if (window_hours < 24) fail("window_hours must be >= 24");
  if (failure_hours < window_hours) fail("failure_hours must be >= window_hours");
  if (!(p_ks_threshold > 0.0 && p_ks_threshold < 1.0)) fail("p_ks_threshold must lie in (0, 1)");
  if (!slope_band.contains(1.0)) fail("slope band must contain 1");
  if (!intercept_band_ppb.contains(0.0)) fail("intercept band must contain 0");
  if (!(min_completeness > 0.0 && min_completeness <= 1.0)) fail("min_completeness must lie in (0, 1]");
  if (correction_trigger < 1 || correction_trigger > 3) fail("correction_trigger must be 1, 2 or 3");
  if (stride < 1) fail("stride must be >= 1");
}

int FrameworkState::failing_count(std::size_t i) const {
  const std::uint8_t m = failing_mask.at(i);
  return (m & 1) + ((m >> 1) & 1) + ((m >> 2) & 1);
}

bool FrameworkState::correction_active(std::size_t i) const {
  // Trigger is not stored on the state; it is encoded in the active spans.
  const Hour at = trail.at(i).at;
  return std::any_of(correction_active_spans.begin(), correction_active_spans.end(),
                     [&](const Span& s) { return s.start <= at && at <= s.end; });
}

TestVector evaluate_window(std::span<const std::optional<double>> site_window,
                           std::span<const std::optional<double>> proxy_window,
                           const FrameworkConfig& cfg, Hour at) {
  if (site_window.size() != proxy_window.size())
    throw Error(ErrorCode::kMismatch, "evaluate_window: site and proxy windows differ in length");
  if (site_window.empty()) throw Error(ErrorCode::kInsufficientData, "evaluate_window: empty window");

  TestVector tv;
  tv.at = at;
  const auto y = present_values(site_window);
  const auto z = present_values(proxy_window);
  const double len = static_cast<double>(site_window.size());
  tv.completeness = std::min(static_cast<double>(y.size()) / len, static_cast<double>(z.size()) / len);

  constexpr std::size_t kMinPresent = 10;
  if (tv.completeness < cfg.min_completeness || y.size() < kMinPresent || z.size() < kMinPresent) return tv;

  const auto ks = stats::ks_two_sample(y, z, stats::KsOptions{.min_size = kMinPresent});
  tv.ks_p = ks.p_value;
  const auto fit = stats::match_moments(stats::mean_var(y), stats::mean_var(z));
  tv.slope = fit.slope;
  tv.intercept = fit.intercept;
  tv.degenerate = fit.degenerate;

  tv.alarms[0] = *tv.ks_p < cfg.p_ks_threshold;
  tv.alarms[1] = tv.slope && !cfg.slope_band.contains(*tv.slope);
  tv.alarms[2] = tv.intercept && !cfg.intercept_band_ppb.contains(*tv.intercept);
  return tv;
}

std::vector<Span> failure_spans(std::span<const Hour> at, const std::vector<bool>& alarm,
                                int failure_hours, int stride) {
  if (at.size() != alarm.size()) throw Error(ErrorCode::kMismatch, "failure_spans: length mismatch");
  std::vector<Span> out;
  std::optional<Hour> run_start;
  std::optional<Hour> open;
  for (std::size_t i = 0; i < at.size(); ++i) {
    if (!alarm[i]) {
      if (open) out.push_back({*open, at[i - 1]});
      run_start.reset();
      open.reset();
      continue;
    }
    if (!run_start) run_start = at[i];
    if (!open && (at[i] - *run_start) + stride >= failure_hours) open = at[i];
  }
  if (open) out.push_back({*open, at.back()});
  return out;
}

std::vector<Span> active_spans(std::span<const Hour> at, const std::vector<bool>& active) {
  if (at.size() != active.size()) throw Error(ErrorCode::kMismatch, "active_spans: length mismatch");
  std::vector<Span> out;
  std::optional<Hour> start;
  for (std::size_t i = 0; i < at.size(); ++i) {
    if (active[i] && !start) start = at[i];
    if (!active[i] && start) {
      out.push_back({*start, at[i - 1]});
      start.reset();
    }
  }
  if (start) out.push_back({*start, at.back()});
  return out;
}

namespace {

// Marks entries covered by sorted, disjoint spans.
std::vector<bool> covered(std::span<const Hour> at, const std::vector<Span>& spans) {
  std::vector<bool> out(at.size(), false);
  std::size_t s = 0;
  for (std::size_t i = 0; i < at.size(); ++i) {
    while (s < spans.size() && spans[s].end < at[i]) ++s;
    out[i] = s < spans.size() && spans[s].start <= at[i];
  }
  return out;
}

}  // namespace

FrameworkState run_framework(const HourlySeries& site, const HourlySeries& proxy,
                             const FrameworkConfig& cfg) {
  cfg.validate();
  if (site.size() != proxy.size() || site.empty() || site.first_hour() != proxy.first_hour())
    throw Error(ErrorCode::kMismatch, "run_framework: site '" + site.site_id + "' and proxy '" +
                                          proxy.site_id + "' do not share an epoch");
  const auto w = static_cast<std::size_t>(cfg.window_hours);
  if (site.size() < w)
    throw Error(ErrorCode::kInsufficientData, "run_framework: series shorter than window_hours");

  const auto y = site.concentrations();
  const auto z = proxy.concentrations();

  FrameworkState state;
  state.site_id = site.site_id;
  state.proxy_id = proxy.site_id;
  state.stride = cfg.stride;
  for (std::size_t end = w; end <= site.size(); end += static_cast<std::size_t>(cfg.stride)) {
    const std::span<const std::optional<double>> sw(y.data() + (end - w), w);
    const std::span<const std::optional<double>> pw(z.data() + (end - w), w);
    state.trail.push_back(evaluate_window(sw, pw, cfg, site.samples[end - 1].at));
  }

  std::vector<Hour> at;
  at.reserve(state.trail.size());
  for (const auto& tv : state.trail) at.push_back(tv.at);

  state.failing_mask.assign(state.trail.size(), 0);
  for (Test t : kAllTests) {
    const auto k = static_cast<std::size_t>(t);
    std::vector<bool> alarm(state.trail.size());
    for (std::size_t i = 0; i < state.trail.size(); ++i) alarm[i] = state.trail[i].alarms[k];
    state.failure_spans[k] = failure_spans(at, alarm, cfg.failure_hours, cfg.stride);
    const auto cov = covered(at, state.failure_spans[k]);
    for (std::size_t i = 0; i < cov.size(); ++i) {
      if (cov[i]) state.failing_mask[i] |= static_cast<std::uint8_t>(1u << k);
    }
  }

  std::vector<bool> active(at.size());
  for (std::size_t i = 0; i < at.size(); ++i) active[i] = state.failing_count(i) >= cfg.correction_trigger;
  state.correction_active_spans = active_spans(at, active);
  return state;
}

AlarmSummary alarm_summary(const FrameworkState& state) {
  AlarmSummary s;
  s.entries = state.trail.size();
  for (const auto& tv : state.trail) {
    if (!tv.evaluable()) continue;
    ++s.evaluable;
    for (std::size_t k = 0; k < kTestCount; ++k) s.alarm_hours[k] += tv.alarms[k] ? 1 : 0;
    if (tv.alarm_sum() > 0) ++s.any_alarm_hours;
  }
  const double denom = s.evaluable > 0 ? static_cast<double>(s.evaluable) : 1.0;
  for (std::size_t k = 0; k < kTestCount; ++k) {
    s.alarm_fraction[k] = static_cast<double>(s.alarm_hours[k]) / denom;
    s.failure_span_count[k] = state.failure_spans[k].size();
    for (const auto& sp : state.failure_spans[k]) s.failure_hours_total[k] += (sp.end - sp.start) + state.stride;
  }
  s.any_alarm_fraction = static_cast<double>(s.any_alarm_hours) / denom;
  s.correction_span_count = state.correction_active_spans.size();
  for (const auto& sp : state.correction_active_spans) s.correction_hours_total += (sp.end - sp.start) + state.stride;
  return s;
}

}  // namespace proxycal::drift
