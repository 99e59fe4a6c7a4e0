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

#include "proxycal/correct.hpp"

#include <algorithm>

#include "proxycal/error.hpp"
#include "proxycal/stats.hpp"

namespace proxycal::correct {

std::optional<FitParameters> fit_parameters(std::span<const double> site_window,
                                            std::span<const double> proxy_window) {
  if (site_window.size() < 2 || proxy_window.size() < 2) return std::nullopt;
  const auto site = stats::mean_var(site_window);
  const auto proxy = stats::mean_var(proxy_window);
  if (site.variance <= 0.0 || proxy.variance <= 0.0) return std::nullopt;
  const auto m = stats::match_moments(site, proxy);
  return FitParameters{*m.intercept, *m.slope};
}

std::vector<ParameterSample> CorrectionResult::parameter_trail() const {
  std::vector<ParameterSample> out;
  for (const auto& r : rows) {
    if (r.params && r.flag != CorrectionFlag::kPassThrough) out.push_back({r.at, *r.params});
  }
  return out;
}

std::size_t CorrectionResult::corrected_hours() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const CorrectionRow& r) {
    return r.flag != CorrectionFlag::kPassThrough;
  }));
}

std::size_t CorrectionResult::clamped_hours() const {
  return static_cast<std::size_t>(std::count_if(
      rows.begin(), rows.end(), [](const CorrectionRow& r) { return r.flag == CorrectionFlag::kClamped; }));
}

CorrectionResult apply_correction(const HourlySeries& site, const drift::FrameworkState& state,
                                  const HourlySeries& proxy, const drift::FrameworkConfig& cfg) {
  cfg.validate();
  if (state.site_id != site.site_id || state.proxy_id != proxy.site_id)
    throw Error(ErrorCode::kMismatch, "apply_correction: state was produced for (" + state.site_id + ", " +
                                          state.proxy_id + "), not (" + site.site_id + ", " + proxy.site_id + ")");
  if (site.size() != proxy.size() || site.empty() || site.first_hour() != proxy.first_hour())
    throw Error(ErrorCode::kMismatch, "apply_correction: site and proxy do not share an epoch");
  for (const auto& sp : state.correction_active_spans) {
    if (sp.start < site.first_hour() || sp.end > site.last_hour())
      throw Error(ErrorCode::kMismatch, "apply_correction: state spans fall outside the series epoch");
  }

  CorrectionResult out;
  out.site_id = site.site_id;
  out.corrected = site;
  out.rows.reserve(site.size());

  const auto w = static_cast<std::size_t>(cfg.window_hours);
  const auto& spans = state.correction_active_spans;
  std::size_t span_idx = 0;
  for (std::size_t i = 0; i < site.size(); ++i) {
    const auto& sample = site.samples[i];
    CorrectionRow row{sample.at, sample.no2_ppb, sample.no2_ppb, std::nullopt, CorrectionFlag::kPassThrough};

    while (span_idx < spans.size() && spans[span_idx].end < sample.at) ++span_idx;
    const bool active = span_idx < spans.size() && spans[span_idx].start <= sample.at;
    if (active && sample.no2_ppb && i + 1 >= w) {
      std::vector<double> yw;
      std::vector<double> zw;
      for (std::size_t k = i + 1 - w; k <= i; ++k) {
        if (site.samples[k].no2_ppb) yw.push_back(*site.samples[k].no2_ppb);
        if (proxy.samples[k].no2_ppb) zw.push_back(*proxy.samples[k].no2_ppb);
      }
      const double len = static_cast<double>(w);
      const bool complete = static_cast<double>(yw.size()) / len >= cfg.min_completeness &&
                            static_cast<double>(zw.size()) / len >= cfg.min_completeness;
      if (complete) row.params = fit_parameters(yw, zw);
      if (row.params) {
        double v = row.params->intercept + row.params->slope * *sample.no2_ppb;
        row.flag = CorrectionFlag::kCorrected;
        if (v < 0.0) {
          v = 0.0;
          row.flag = CorrectionFlag::kClamped;
        }
        row.corrected_ppb = v;
        out.corrected.samples[i].no2_ppb = v;
      }
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace proxycal::correct
