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

#ifndef PROXYCAL_MET_HPP_
#define PROXYCAL_MET_HPP_

#include <map>
#include <utility>
#include <vector>

#include "proxycal/drift.hpp"
#include "proxycal/model.hpp"

namespace proxycal::met {

struct GridConfig {
  double dir_bin_deg = 22.5;
  double speed_bin_ms = 1.0;
};

struct PolarCell {
  std::size_t n_hours = 0;
  // Sum of alarm sums (0..3 per hour) over the cell's hours.
  std::size_t alarm_total = 0;

  double mean_alarm_sum() const {
    return n_hours == 0 ? 0.0 : static_cast<double>(alarm_total) / static_cast<double>(n_hours);
  }
};

struct PolarBinGrid {
  GridConfig config;
  // Keyed by (direction sector, speed bin).
  std::map<std::pair<int, int>, PolarCell> cells;
  std::size_t evaluable_hours = 0;
  std::size_t missing_wind_hours = 0;

  int sector_count() const;
  // Sector centres sit on multiples of dir_bin_deg; sector 0 spans
  // [-dir_bin_deg/2, dir_bin_deg/2).
  double dir_center_deg(int sector) const { return sector * config.dir_bin_deg; }
  double speed_low(int speed_bin) const { return speed_bin * config.speed_bin_ms; }
  int sector_of(double dir_deg) const;
  int speed_bin_of(double speed_ms) const;
};

// Every evaluable trail hour with wind present adds its alarm sum to its
// (direction, speed) cell. Wind is taken from `series`, which must cover the
// trail's hours. Throws Error(kInvalidInput) when the series carries no wind.
PolarBinGrid bin_alarms_by_wind(const drift::FrameworkState& state, const HourlySeries& series,
                                const GridConfig& config = {});

struct RingMean {
  double speed_low = 0.0;
  std::size_t n_hours = 0;
  double mean_alarm_sum = 0.0;
};

// Cells merged across directions, ordered by speed.
std::vector<RingMean> speed_ring_means(const PolarBinGrid& grid);

}  // namespace proxycal::met

#endif  // PROXYCAL_MET_HPP_
