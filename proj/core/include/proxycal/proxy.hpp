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

#ifndef PROXYCAL_PROXY_HPP_
#define PROXYCAL_PROXY_HPP_

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "proxycal/model.hpp"
#include "proxycal/stats.hpp"

namespace proxycal::proxy {

using FeatureVector = std::array<double, 3>;

// Raw feature order: distance to motorway, elevation, road length within 1 km.
FeatureVector raw_features(const LandUseFeatures& f);

// Per-feature min-max scaling over a site set. A constant feature maps to 0.
struct FeatureScaler {
  FeatureVector min{};
  FeatureVector max{};

  FeatureVector apply(const LandUseFeatures& f) const;
};

struct ScaledNetwork {
  FeatureScaler scaler;
  std::map<std::string, FeatureVector> scaled;
};

ScaledNetwork scale_features(std::span<const SiteRecord> sites);

// Nearest other site in min-max scaled Euclidean feature space. Counting the
// site itself as the first neighbour, this is the k = 2 neighbour.
std::vector<ProxyAssignment> select_knn(std::span<const SiteRecord> sites);

inline constexpr double kEarthRadiusKm = 6371.0;

double haversine_km(double lat1_deg, double lon1_deg, double lat2_deg, double lon2_deg);

std::vector<ProxyAssignment> select_nearest_geo(std::span<const SiteRecord> sites);

enum class KlDirection { kSiteToProxy, kProxyToSite };

struct MinKlOptions {
  double bin_width = 1.0;
  double origin = 0.0;
  std::size_t min_values = 100;
  KlDirection direction = KlDirection::kSiteToProxy;
  stats::KlOptions kl;
};

struct SiteError {
  std::string site_id;
  std::string reason;
};

struct MinKlResult {
  std::vector<ProxyAssignment> assignments;
  std::vector<SiteError> errors;
};

// Ranks every other site by the divergence between full-period concentration
// histograms. Sites with too little data are reported in `errors` and are
// not offered as candidates to the others.
MinKlResult select_min_kl(const NetworkDataset& data, const MinKlOptions& options = {});

// The divergence matrix used by select_min_kl, keyed [site][candidate].
std::map<std::string, std::map<std::string, double>> kl_matrix(const NetworkDataset& data,
                                                               const MinKlOptions& options = {});

struct AgreementRow {
  std::string site_id;
  std::string proxy_a;
  std::string proxy_b;
  bool match = false;
};

struct AgreementReport {
  std::vector<AgreementRow> rows;
  std::size_t matches = 0;

  std::size_t total() const { return rows.size(); }
  double fraction() const {
    return rows.empty() ? 1.0 : static_cast<double>(matches) / static_cast<double>(rows.size());
  }
};

// Throws Error(kMismatch) unless both lists cover exactly the same sites.
AgreementReport compare_assignments(std::span<const ProxyAssignment> a,
                                    std::span<const ProxyAssignment> b);

}  // namespace proxycal::proxy

#endif  // PROXYCAL_PROXY_HPP_
