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

#include "proxycal/proxy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <set>

#include "proxycal/error.hpp"

namespace proxycal::proxy {

FeatureVector raw_features(const LandUseFeatures& f) {
  return {f.dist_to_motorway_m, f.elevation_m, f.road_length_1km_m};
}

FeatureVector FeatureScaler::apply(const LandUseFeatures& f) const {
  const FeatureVector raw = raw_features(f);
  FeatureVector out{};
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double range = max[i] - min[i];
    out[i] = range > 0.0 ? (raw[i] - min[i]) / range : 0.0;
  }
  return out;
}

namespace {

void require_two_sites(std::span<const SiteRecord> sites, const char* op) {
  if (sites.size() < 2)
    throw Error(ErrorCode::kInsufficientData, std::string(op) + " needs at least 2 sites");
  std::set<std::string> ids;
  for (const auto& s : sites) {
    if (!ids.insert(s.site_id).second)
      throw Error(ErrorCode::kInvalidInput, std::string(op) + ": duplicate site_id '" + s.site_id + "'");
  }
}

std::vector<const SiteRecord*> sorted_by_id(std::span<const SiteRecord> sites) {
  std::vector<const SiteRecord*> out;
  for (const auto& s : sites) out.push_back(&s);
  std::sort(out.begin(), out.end(),
            [](const SiteRecord* a, const SiteRecord* b) { return a->site_id < b->site_id; });
  return out;
}

// Picks the minimum-distance candidate for each site; candidates are visited
// in id order and only a strictly smaller distance replaces the incumbent.
template <typename Distance>
std::vector<ProxyAssignment> nearest_other(std::span<const SiteRecord> sites, ProxyMethod method,
                                           Distance&& distance) {
  const auto ordered = sorted_by_id(sites);
  std::vector<ProxyAssignment> out;
  out.reserve(ordered.size());
  for (const SiteRecord* site : ordered) {
    const SiteRecord* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const SiteRecord* cand : ordered) {
      if (cand == site) continue;
      const double d = distance(*site, *cand);
      if (best == nullptr || d < best_d) {
        best = cand;
        best_d = d;
      }
    }
    out.push_back({site->site_id, best->site_id, method, best_d});
  }
  return out;
}

}  // namespace

ScaledNetwork scale_features(std::span<const SiteRecord> sites) {
  require_two_sites(sites, "scale_features");
  ScaledNetwork out;
  out.scaler.min.fill(std::numeric_limits<double>::infinity());
  out.scaler.max.fill(-std::numeric_limits<double>::infinity());
  for (const auto& s : sites) {
    const auto raw = raw_features(s.features);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      out.scaler.min[i] = std::min(out.scaler.min[i], raw[i]);
      out.scaler.max[i] = std::max(out.scaler.max[i], raw[i]);
    }
  }
  for (const auto& s : sites) out.scaled[s.site_id] = out.scaler.apply(s.features);
  return out;
}

std::vector<ProxyAssignment> select_knn(std::span<const SiteRecord> sites) {
  const ScaledNetwork net = scale_features(sites);
  return nearest_other(sites, ProxyMethod::kKnnLandUse,
                       [&](const SiteRecord& a, const SiteRecord& b) {
                         const auto& fa = net.scaled.at(a.site_id);
                         const auto& fb = net.scaled.at(b.site_id);
                         double ss = 0.0;
                         for (std::size_t i = 0; i < fa.size(); ++i) ss += (fa[i] - fb[i]) * (fa[i] - fb[i]);
                         return std::sqrt(ss);
                       });
}

double haversine_km(double lat1_deg, double lon1_deg, double lat2_deg, double lon2_deg) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double phi1 = lat1_deg * kDeg;
  const double phi2 = lat2_deg * kDeg;
  const double dphi = (lat2_deg - lat1_deg) * kDeg;
  const double dlambda = (lon2_deg - lon1_deg) * kDeg;
  const double h = std::sin(dphi / 2) * std::sin(dphi / 2) +
                   std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) * std::sin(dlambda / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

std::vector<ProxyAssignment> select_nearest_geo(std::span<const SiteRecord> sites) {
  require_two_sites(sites, "select_nearest_geo");
  for (const auto& s : sites) {
    for (const auto& v : validate_site(s)) {
      if (v.field == "latitude" || v.field == "longitude")
        throw Error(ErrorCode::kInvalidInput, "select_nearest_geo: " + v.describe());
    }
  }
  return nearest_other(sites, ProxyMethod::kNearestGeo, [](const SiteRecord& a, const SiteRecord& b) {
    return haversine_km(a.latitude, a.longitude, b.latitude, b.longitude);
  });
}

namespace {

struct SiteHistograms {
  std::map<std::string, stats::Histogram> histograms;
  std::vector<SiteError> errors;
};

SiteHistograms histograms_for(const NetworkDataset& data, const MinKlOptions& options) {
  SiteHistograms out;
  for (const auto& [id, series] : data.series) {
    const auto conc = series.concentrations();
    const auto values = present_values(conc);
    if (values.size() < options.min_values) {
      out.errors.push_back({id, "only " + std::to_string(values.size()) + " present values, need " +
                                    std::to_string(options.min_values)});
      continue;
    }
    out.histograms.emplace(id, stats::build_histogram(values, options.bin_width, options.origin));
  }
  return out;
}

double directed_kl(const stats::Histogram& site, const stats::Histogram& cand, const MinKlOptions& options) {
  return options.direction == KlDirection::kSiteToProxy ? stats::kl_divergence(site, cand, options.kl)
                                                        : stats::kl_divergence(cand, site, options.kl);
}

}  // namespace

std::map<std::string, std::map<std::string, double>> kl_matrix(const NetworkDataset& data,
                                                               const MinKlOptions& options) {
  const auto hs = histograms_for(data, options);
  std::map<std::string, std::map<std::string, double>> out;
  for (const auto& [id, h] : hs.histograms) {
    for (const auto& [cand, hc] : hs.histograms) {
      if (cand != id) out[id][cand] = directed_kl(h, hc, options);
    }
  }
  return out;
}

MinKlResult select_min_kl(const NetworkDataset& data, const MinKlOptions& options) {
  auto hs = histograms_for(data, options);
  MinKlResult out;
  out.errors = std::move(hs.errors);
  for (const auto& [id, h] : hs.histograms) {
    std::optional<ProxyAssignment> best;
    for (const auto& [cand, hc] : hs.histograms) {
      if (cand == id) continue;
      const double d = directed_kl(h, hc, options);
      if (!best || d < best->score) best = ProxyAssignment{id, cand, ProxyMethod::kMinKl, d};
    }
    if (best) {
      out.assignments.push_back(*best);
    } else {
      out.errors.push_back({id, "no candidate proxy with sufficient data"});
    }
  }
  std::sort(out.errors.begin(), out.errors.end(),
            [](const SiteError& a, const SiteError& b) { return a.site_id < b.site_id; });
  return out;
}

AgreementReport compare_assignments(std::span<const ProxyAssignment> a,
                                    std::span<const ProxyAssignment> b) {
  auto index = [](std::span<const ProxyAssignment> list, const char* which) {
    std::map<std::string, std::string> out;
    for (const auto& p : list) {
      if (!out.emplace(p.site_id, p.proxy_id).second)
        throw Error(ErrorCode::kInvalidInput,
                    std::string("compare_assignments: site '") + p.site_id + "' listed twice in " + which);
    }
    return out;
  };
  const auto ia = index(a, "first list");
  const auto ib = index(b, "second list");
  for (const auto& [site, _] : ia) {
    if (!ib.contains(site))
      throw Error(ErrorCode::kMismatch, "compare_assignments: site '" + site + "' missing from second list");
  }
  for (const auto& [site, _] : ib) {
    if (!ia.contains(site))
      throw Error(ErrorCode::kMismatch, "compare_assignments: site '" + site + "' missing from first list");
  }
  AgreementReport report;
  for (const auto& [site, pa] : ia) {
    const auto& pb = ib.at(site);
    const bool match = pa == pb;
    report.rows.push_back({site, pa, pb, match});
    if (match) ++report.matches;
  }
  return report;
}

}  // namespace proxycal::proxy
