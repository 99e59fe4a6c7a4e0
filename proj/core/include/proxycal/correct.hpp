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

#ifndef PROXYCAL_CORRECT_HPP_
#define PROXYCAL_CORRECT_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proxycal/drift.hpp"
#include "proxycal/model.hpp"

namespace proxycal::correct {

// Measurement model parameters: corrected = intercept + slope * observed.
struct FitParameters {
  double intercept = 0.0;  // a0, ppb
  double slope = 1.0;      // a1, dimensionless, > 0
};

// Moment-matched fit of a site window onto a proxy window. Returns nullopt
// when either window has fewer than two values or zero variance.
std::optional<FitParameters> fit_parameters(std::span<const double> site_window,
                                            std::span<const double> proxy_window);

enum class CorrectionFlag : int {
  kPassThrough = 0,
  kCorrected = 1,
  // Corrected value was negative and clamped to zero.
  kClamped = 2,
};

struct CorrectionRow {
  Hour at;
  std::optional<double> raw_ppb;
  std::optional<double> corrected_ppb;
  std::optional<FitParameters> params;
  CorrectionFlag flag = CorrectionFlag::kPassThrough;
};

struct ParameterSample {
  Hour at;
  FitParameters params;
};

struct CorrectionResult {
  std::string site_id;
  HourlySeries corrected;
  std::vector<CorrectionRow> rows;

  std::vector<ParameterSample> parameter_trail() const;
  std::size_t corrected_hours() const;
  std::size_t clamped_hours() const;
};

// Within correction-active spans each hour is transformed with parameters
// refitted on the trailing window ending at that hour; elsewhere values pass
// through unchanged. Hours whose window cannot be fitted pass through.
CorrectionResult apply_correction(const HourlySeries& site, const drift::FrameworkState& state,
                                  const HourlySeries& proxy, const drift::FrameworkConfig& cfg);

}  // namespace proxycal::correct

#endif  // PROXYCAL_CORRECT_HPP_
