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

#include "proxycal/met.hpp"

#include <cmath>

#include "proxycal/error.hpp"

namespace proxycal::met {

int PolarBinGrid::sector_count() const {
  return static_cast<int>(std::lround(360.0 / config.dir_bin_deg));
}

int PolarBinGrid::sector_of(double dir_deg) const {
  double shifted = std::fmod(dir_deg + config.dir_bin_deg / 2.0, 360.0);
  if (shifted < 0.0) shifted += 360.0;
  const int s = static_cast<int>(std::floor(shifted / config.dir_bin_deg));
  return s % sector_count();
}

int PolarBinGrid::speed_bin_of(double speed_ms) const {
  return static_cast<int>(std::floor(speed_ms / config.speed_bin_ms));
}

PolarBinGrid bin_alarms_by_wind(const drift::FrameworkState& state, const HourlySeries& series,
                                const GridConfig& config) {
  if (!(config.dir_bin_deg > 0.0) || config.dir_bin_deg > 360.0 || !(config.speed_bin_ms > 0.0))
    throw Error(ErrorCode::kInvalidInput, "wind grid: bin sizes must be positive");
  const double sectors = 360.0 / config.dir_bin_deg;
  if (std::abs(sectors - std::round(sectors)) > 1e-9)
    throw Error(ErrorCode::kInvalidInput, "wind grid: dir_bin_deg must divide 360");
  if (!series.has_wind())
    throw Error(ErrorCode::kInvalidInput,
                "site '" + series.site_id +
                    "' has no wind data; wind_speed_ms and wind_dir_deg are required for wind binning");

  PolarBinGrid grid;
  grid.config = config;
  for (const auto& tv : state.trail) {
    if (!tv.evaluable()) continue;
    const std::int64_t idx = tv.at - series.first_hour();
    if (idx < 0 || idx >= static_cast<std::int64_t>(series.size()))
      throw Error(ErrorCode::kMismatch, "wind binning: trail hour outside the series epoch");
    const auto& s = series.samples[static_cast<std::size_t>(idx)];
    ++grid.evaluable_hours;
    if (!s.wind_speed_ms || !s.wind_dir_deg) {
      ++grid.missing_wind_hours;
      continue;
    }
    auto& cell = grid.cells[{grid.sector_of(*s.wind_dir_deg), grid.speed_bin_of(*s.wind_speed_ms)}];
    ++cell.n_hours;
    cell.alarm_total += static_cast<std::size_t>(tv.alarm_sum());
  }
  return grid;
}

std::vector<RingMean> speed_ring_means(const PolarBinGrid& grid) {
  std::map<int, PolarCell> rings;
  for (const auto& [key, cell] : grid.cells) {
    auto& r = rings[key.second];
    r.n_hours += cell.n_hours;
    r.alarm_total += cell.alarm_total;
  }
  std::vector<RingMean> out;
  for (const auto& [bin, cell] : rings) out.push_back({grid.speed_low(bin), cell.n_hours, cell.mean_alarm_sum()});
  return out;
}

}  // namespace proxycal::met
