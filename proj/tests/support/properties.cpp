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

#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "proxycal/correct.hpp"
#include "proxycal/drift.hpp"
#include "proxycal/io.hpp"
#include "proxycal/met.hpp"
#include "proxycal/proxy.hpp"
#include "proxycal/sim.hpp"
#include "proxycal/stats.hpp"

namespace proxycal::props {

namespace {

Outcome fail(const std::string& what) { return {false, what}; }

bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string str(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

const Hour kStart = hour_from_civil(2018, 1, 1, 0);

std::vector<SiteRecord> random_sites(std::mt19937_64& rng, int n, bool integer_features) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<SiteRecord> sites;
  for (int i = 0; i < n; ++i) {
    SiteRecord s;
    s.site_id = "S" + std::to_string(10 + i);
    s.name = s.site_id;
    s.latitude = 33.5 + u(rng);
    s.longitude = -118.5 + 1.5 * u(rng);
    auto f = [&](double scale) { return integer_features ? std::floor(4.0 * u(rng)) * scale : u(rng) * scale; };
    s.features = {f(5000.0), f(400.0), f(8000.0)};
    sites.push_back(s);
  }
  return sites;
}

std::vector<double> window_values(std::mt19937_64& rng, std::size_t n) {
  std::lognormal_distribution<double> d(3.0, 0.5);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

std::vector<std::optional<double>> optional_of(std::span<const double> v) {
  return {v.begin(), v.end()};
}

// Two sites over `hours` from the simulator, with an optional low-wind source
// on A so that alarms are present.
sim::Scenario small_pair(std::uint64_t seed, std::int64_t hours, double low_wind_ppb) {
  auto spec = sim::same_group_pair(seed, hours);
  spec.sites[0].low_wind_source_ppb = low_wind_ppb;
  spec.wind.mean_episode_hours = 120.0;
  return sim::generate(spec);
}

}  // namespace

// --- stats ------------------------------------------------------------------

Outcome ks_symmetry(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(10, 120);
  for (int t = 0; t < trials; ++t) {
    const auto a = oracle::normal_sample(rng, size(rng), 20.0, 5.0);
    const auto b = oracle::normal_sample(rng, size(rng), 21.0, 6.0);
    const auto ab = stats::ks_two_sample(a, b);
    const auto ba = stats::ks_two_sample(b, a);
    if (ab.d_stat != ba.d_stat || ab.p_value != ba.p_value)
      return fail("trial " + std::to_string(t) + ": D " + str(ab.d_stat) + " vs " + str(ba.d_stat));
  }
  return {};
}

Outcome ks_monotone_transform_invariance(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(10, 200);
  for (int t = 0; t < trials; ++t) {
    auto a = oracle::normal_sample(rng, size(rng), 0.0, 1.0);
    auto b = oracle::normal_sample(rng, size(rng), 0.3, 1.2);
    const auto base = stats::ks_scaled_statistic(a, b);
    auto f = [](double x) { return std::exp(x / 3.0) + x * x * x; };
    std::transform(a.begin(), a.end(), a.begin(), f);
    std::transform(b.begin(), b.end(), b.begin(), f);
    if (stats::ks_scaled_statistic(a, b) != base) return fail("trial " + std::to_string(t) + ": D changed");
  }
  return {};
}

Outcome ks_exact_matches_permutation(std::uint64_t seed, std::size_t max_total, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coarse(0, 5);
  for (std::size_t n1 = 1; n1 < max_total; ++n1) {
    for (std::size_t n2 = 1; n1 + n2 <= max_total; ++n2) {
      // One continuous draw and one heavily tied draw per size pair.
      for (int variant = 0; variant < 2; ++variant) {
        std::vector<double> a(n1);
        std::vector<double> b(n2);
        if (variant == 0) {
          a = oracle::normal_sample(rng, n1, 0.0, 1.0);
          b = oracle::normal_sample(rng, n2, 0.5, 1.0);
        } else {
          for (auto& v : a) v = coarse(rng);
          for (auto& v : b) v = coarse(rng) + 1;
        }
        const auto r = stats::ks_two_sample(a, b, stats::KsOptions{.min_size = 1});
        const double want = oracle::permutation_p_value(a, b);
        const double d = oracle::ecdf_sweep_d(a, b);
        if (!r.exact) return fail("n1=" + std::to_string(n1) + " n2=" + std::to_string(n2) + " not exact");
        if (std::abs(r.p_value - want) > tol || std::abs(r.d_stat - d) > 1e-12)
          return fail("n1=" + std::to_string(n1) + " n2=" + std::to_string(n2) + " p " + str(r.p_value) +
                      " vs permutation " + str(want));
      }
    }
  }
  return {};
}

Outcome mean_var_linearity(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int t = 0; t < trials; ++t) {
    const auto x = window_values(rng, 72);
    const double c = u(rng);
    const double k = 10.0 * u(rng);
    std::vector<double> y(x.size());
    std::transform(x.begin(), x.end(), y.begin(), [&](double v) { return c * v + k; });
    const auto mx = stats::mean_var(x);
    const auto my = stats::mean_var(y);
    if (!close_rel(my.mean, c * mx.mean + k, 1e-9) || !close_rel(my.variance, c * c * mx.variance, 1e-9))
      return fail("trial " + std::to_string(t) + ": c=" + str(c) + " k=" + str(k));
  }
  return {};
}

Outcome kl_self_zero_and_nonnegative(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> width(0.25, 4.0);
  for (int t = 0; t < trials; ++t) {
    const double w = width(rng);
    const auto a = window_values(rng, 300);
    const auto b = oracle::normal_sample(rng, 250, 25.0, 8.0);
    const auto ha = stats::build_histogram(a, w);
    const auto hb = stats::build_histogram(b, w);
    const double self = stats::kl_divergence(ha, ha);
    const double ab = stats::kl_divergence(ha, hb);
    const double ba = stats::kl_divergence(hb, ha);
    if (std::abs(self) > 1e-12) return fail("self divergence " + str(self));
    if (!(ab >= 0.0) || !(ba >= 0.0)) return fail("negative divergence " + str(ab) + ", " + str(ba));
  }
  return {};
}

// --- proxy ------------------------------------------------------------------

Outcome no_site_is_its_own_proxy(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(2, 12);
  for (int t = 0; t < trials; ++t) {
    const auto sites = random_sites(rng, count(rng), t % 2 == 1);
    for (const auto& list : {proxy::select_knn(sites), proxy::select_nearest_geo(sites)}) {
      if (list.size() != sites.size()) return fail("missing assignments");
      for (const auto& a : list) {
        if (a.site_id == a.proxy_id) return fail(a.site_id + " assigned to itself");
      }
    }
  }
  // min_kl on small synthetic networks, including identical series.
  for (int t = 0; t < std::max(1, trials / 10); ++t) {
    auto spec = sim::same_group_pair(seed + static_cast<std::uint64_t>(t), 300);
    spec.sites.push_back(spec.sites[0]);
    spec.sites.back().site_id = "C";
    const auto data = sim::generate(spec).dataset;
    for (const auto& a : proxy::select_min_kl(data).assignments) {
      if (a.site_id == a.proxy_id) return fail("min_kl assigned " + a.site_id + " to itself");
    }
  }
  return {};
}

Outcome knn_affine_rescaling_invariance(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(3, 12);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  std::uniform_real_distribution<double> shift(0.0, 1000.0);
  for (int t = 0; t < trials; ++t) {
    auto sites = random_sites(rng, count(rng), false);
    const auto before = proxy::select_knn(sites);
    const double a[3] = {scale(rng), scale(rng), scale(rng)};
    const double b[3] = {shift(rng), shift(rng), shift(rng)};
    for (auto& s : sites) {
      s.features.dist_to_motorway_m = a[0] * s.features.dist_to_motorway_m + b[0];
      s.features.elevation_m = a[1] * s.features.elevation_m + b[1];
      s.features.road_length_1km_m = a[2] * s.features.road_length_1km_m + b[2];
    }
    const auto after = proxy::select_knn(sites);
    for (std::size_t i = 0; i < before.size(); ++i) {
      if (before[i].proxy_id != after[i].proxy_id)
        return fail("trial " + std::to_string(t) + ": " + before[i].site_id + " moved from " + before[i].proxy_id +
                    " to " + after[i].proxy_id);
    }
  }
  return {};
}

Outcome haversine_symmetry(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lat(-89.0, 89.0);
  std::uniform_real_distribution<double> lon(-180.0, 180.0);
  for (int t = 0; t < trials; ++t) {
    const double a1 = lat(rng), o1 = lon(rng), a2 = lat(rng), o2 = lon(rng);
    const double d12 = proxy::haversine_km(a1, o1, a2, o2);
    const double d21 = proxy::haversine_km(a2, o2, a1, o1);
    if (d12 != d21) return fail("d(a,b)=" + str(d12) + " d(b,a)=" + str(d21));
    if (proxy::haversine_km(a1, o1, a1, o1) != 0.0) return fail("d(a,a) != 0");
  }
  return {};
}

Outcome selection_determinism(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(2, 10);
  for (int t = 0; t < trials; ++t) {
    auto sites = random_sites(rng, count(rng), true);
    const auto knn = proxy::select_knn(sites);
    const auto geo = proxy::select_nearest_geo(sites);
    std::shuffle(sites.begin(), sites.end(), rng);
    if (proxy::select_knn(sites) != knn) return fail("knn depends on input order");
    if (proxy::select_nearest_geo(sites) != geo) return fail("nearest_geo depends on input order");
  }
  return {};
}

// --- drift ------------------------------------------------------------------

Outcome slope_scale_equivariance(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cdist(0.2, 5.0);
  std::uniform_real_distribution<double> kdist(-10.0, 10.0);
  const drift::FrameworkConfig cfg;
  for (int t = 0; t < trials; ++t) {
    const auto y = window_values(rng, 72);
    const auto z = window_values(rng, 72);
    const double c = cdist(rng);
    const double k = kdist(rng);
    std::vector<double> y2(y.size());
    std::transform(y.begin(), y.end(), y2.begin(), [&](double v) { return c * v + k; });
    const auto base = drift::evaluate_window(optional_of(y), optional_of(z), cfg);
    const auto moved = drift::evaluate_window(optional_of(y2), optional_of(z), cfg);
    if (!close_rel(*moved.slope, *base.slope / c, 1e-9))
      return fail("slope " + str(*moved.slope) + " expected " + str(*base.slope / c));
    // The recovered map must carry Y onto the proxy's first two moments.
    std::vector<double> mapped(y2.size());
    std::transform(y2.begin(), y2.end(), mapped.begin(), [&](double v) { return *moved.intercept + *moved.slope * v; });
    const auto mm = stats::mean_var(mapped);
    const auto mz = stats::mean_var(z);
    if (!close_rel(mm.mean, mz.mean, 1e-9) || !close_rel(mm.variance, mz.variance, 1e-9))
      return fail("recovered map misses the proxy moments");
  }
  return {};
}

namespace {

bool same_vector(const drift::TestVector& a, const drift::TestVector& b) {
  return a.at == b.at && a.ks_p == b.ks_p && a.slope == b.slope && a.intercept == b.intercept &&
         a.alarms == b.alarms && a.completeness == b.completeness;
}

}  // namespace

Outcome window_locality(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  const drift::FrameworkConfig cfg;
  const std::size_t n = 400;
  std::uniform_int_distribution<std::size_t> pick(cfg.window_hours, n - 1);
  std::normal_distribution<double> bump(0.0, 30.0);
  for (int t = 0; t < trials; ++t) {
    const auto y = window_values(rng, n);
    const auto z = window_values(rng, n);
    const auto site = oracle::make_series("A", kStart, y);
    const auto prox = oracle::make_series("B", kStart, z);
    const auto base = drift::run_framework(site, prox, cfg);

    const std::size_t end = pick(rng);
    const std::size_t begin = end + 1 - static_cast<std::size_t>(cfg.window_hours);
    auto site2 = site;
    auto prox2 = prox;
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= begin && i <= end) continue;
      site2.samples[i].no2_ppb = std::abs(*site2.samples[i].no2_ppb + bump(rng));
      if (i % 3 == 0) prox2.samples[i].no2_ppb.reset();
    }
    const auto moved = drift::run_framework(site2, prox2, cfg);
    const std::size_t entry = end + 1 - static_cast<std::size_t>(cfg.window_hours);
    if (!same_vector(base.trail.at(entry), moved.trail.at(entry)))
      return fail("entry at hour index " + std::to_string(end) + " changed with out-of-window data");
  }
  return {};
}

Outcome failure_spans_match_brute_force(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(1, 400);
  std::uniform_int_distribution<int> stride_d(1, 6);
  std::uniform_int_distribution<int> fail_d(1, 60);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    const int n = len(rng);
    const int stride = stride_d(rng);
    const int fh = fail_d(rng);
    const double stay = 0.7 + 0.29 * u(rng);
    std::vector<Hour> at(n);
    std::vector<bool> alarm(n);
    bool state = u(rng) < 0.5;
    for (int i = 0; i < n; ++i) {
      at[i] = kStart + static_cast<std::int64_t>(i) * stride;
      if (u(rng) > stay) state = !state;
      alarm[i] = state;
    }
    const auto fast = drift::failure_spans(at, alarm, fh, stride);
    const auto slow = oracle::brute_failure_spans(at, alarm, fh, stride);
    if (fast != slow) return fail("trial " + std::to_string(t) + ": span lists differ");
    for (const auto& s : fast) {
      // The alarm must have held for failure_hours when the span opens.
      std::size_t i = static_cast<std::size_t>((s.start - kStart) / stride);
      std::size_t j = i;
      while (j > 0 && alarm[j - 1]) --j;
      if ((at[i] - at[j]) + stride < fh) return fail("span opened early");
    }
  }
  return {};
}

Outcome framework_determinism(std::uint64_t seed) {
  const auto sc = small_pair(seed, 600, 8.0);
  const auto& a = sc.dataset.series.at("A");
  const auto& b = sc.dataset.series.at("B");
  const drift::FrameworkConfig cfg;
  const auto s1 = drift::run_framework(a, b, cfg);
  const auto s2 = drift::run_framework(a, b, cfg);
  if (io::trail_rows(s1) != io::trail_rows(s2) || s1.failure_spans != s2.failure_spans ||
      s1.correction_active_spans != s2.correction_active_spans)
    return fail("two runs differ");
  return {};
}

// --- correct ----------------------------------------------------------------

Outcome moment_matching_exact(std::uint64_t seed, int trials, double rel_tol) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(24, 240);
  std::uniform_real_distribution<double> gain(0.3, 3.0);
  std::uniform_real_distribution<double> off(-20.0, 20.0);
  for (int t = 0; t < trials; ++t) {
    const std::size_t n = size(rng);
    auto y = window_values(rng, n);
    const double g = gain(rng);
    const double o = off(rng);
    std::transform(y.begin(), y.end(), y.begin(), [&](double v) { return g * v + o; });
    const auto z = window_values(rng, n);
    const auto p = correct::fit_parameters(y, z);
    if (!p) return fail("fit failed");
    std::vector<double> xh(n);
    std::transform(y.begin(), y.end(), xh.begin(), [&](double v) { return p->intercept + p->slope * v; });
    const auto got = oracle::wide_moments(xh);
    const auto want = oracle::wide_moments(z);
    if (!close_rel(static_cast<double>(got.mean), static_cast<double>(want.mean), rel_tol) ||
        !close_rel(static_cast<double>(got.variance), static_cast<double>(want.variance), rel_tol))
      return fail("trial " + std::to_string(t) + ": mean " + str(static_cast<double>(got.mean)) + " vs " +
                  str(static_cast<double>(want.mean)));
  }
  return {};
}

Outcome correction_idempotence(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const auto y = window_values(rng, 72);
    const auto z = window_values(rng, 72);
    const auto p = correct::fit_parameters(y, z);
    std::vector<double> xh(y.size());
    std::transform(y.begin(), y.end(), xh.begin(), [&](double v) { return p->intercept + p->slope * v; });
    const auto again = correct::fit_parameters(xh, z);
    if (!again || std::abs(again->intercept) > 1e-9 || std::abs(again->slope - 1.0) > 1e-9)
      return fail("refit gave a0=" + str(again ? again->intercept : NAN) + " a1=" + str(again ? again->slope : NAN));
  }
  return {};
}

Outcome correction_affine_covariance(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cdist(0.3, 3.0);
  std::uniform_real_distribution<double> kdist(0.0, 15.0);
  const drift::FrameworkConfig cfg;
  const std::size_t n = 200;
  for (int t = 0; t < trials; ++t) {
    const auto y = window_values(rng, n);
    const auto z = window_values(rng, n);
    const double c = cdist(rng);
    const double k = kdist(rng);
    std::vector<double> y2(n);
    std::transform(y.begin(), y.end(), y2.begin(), [&](double v) { return c * v + k; });
    const auto prox = oracle::make_series("B", kStart, z);
    drift::FrameworkState state;
    state.site_id = "A";
    state.proxy_id = "B";
    state.correction_active_spans = {{kStart, kStart + static_cast<std::int64_t>(n - 1)}};
    const auto r1 = correct::apply_correction(oracle::make_series("A", kStart, y), state, prox, cfg);
    const auto r2 = correct::apply_correction(oracle::make_series("A", kStart, y2), state, prox, cfg);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = r1.rows[i];
      const auto& b = r2.rows[i];
      if (a.flag != b.flag) return fail("flags differ at row " + std::to_string(i));
      if (a.flag == correct::CorrectionFlag::kCorrected && !close_rel(*a.corrected_ppb, *b.corrected_ppb, 1e-9))
        return fail("row " + std::to_string(i) + ": " + str(*a.corrected_ppb) + " vs " + str(*b.corrected_ppb));
    }
  }
  return {};
}

// --- met --------------------------------------------------------------------

Outcome wind_cells_sum_to_evaluable_hours(std::uint64_t seed) {
  auto sc = small_pair(seed, 800, 8.0);
  auto& a = sc.dataset.series.at("A");
  for (std::size_t i = 0; i < a.size(); i += 17) a.samples[i].wind_dir_deg.reset();
  const auto state = drift::run_framework(a, sc.dataset.series.at("B"), {});
  const auto grid = met::bin_alarms_by_wind(state, a);
  std::size_t cells = 0;
  for (const auto& [k, c] : grid.cells) {
    cells += c.n_hours;
    if (c.mean_alarm_sum() < 0.0 || c.mean_alarm_sum() > 3.0) return fail("cell mean outside [0, 3]");
  }
  if (cells + grid.missing_wind_hours != grid.evaluable_hours) return fail("cell hours do not add up");
  return {};
}

Outcome wind_grid_row_order_invariance(std::uint64_t seed) {
  const auto sc = small_pair(seed, 800, 8.0);
  const auto& a = sc.dataset.series.at("A");
  auto state = drift::run_framework(a, sc.dataset.series.at("B"), {});
  const auto grid = met::bin_alarms_by_wind(state, a);
  std::mt19937_64 rng(seed);
  std::shuffle(state.trail.begin(), state.trail.end(), rng);
  const auto shuffled = met::bin_alarms_by_wind(state, a);
  if (io::polar_grid_rows(grid) != io::polar_grid_rows(shuffled)) return fail("grid depends on row order");
  return {};
}

// --- model, io, sim ---------------------------------------------------------

Outcome validation_idempotence(std::uint64_t seed) {
  auto data = small_pair(seed, 200, 0.0).dataset;
  data.series.at("A").samples[5].no2_ppb = -2.0;
  data.series.at("B").samples[9].no2_ppb.reset();
  const ValidationOptions clamp{true};
  const auto once = validate_dataset(data, clamp);
  if (!once.ok()) return fail("clamped dataset rejected");
  const auto twice = validate_dataset(*once.dataset, clamp);
  if (!twice.ok() || *twice.dataset != *once.dataset) return fail("second validation changed the dataset");
  const auto strict1 = validate_dataset(data);
  const auto strict2 = validate_dataset(data);
  if (strict1.ok() || strict1.violations.size() != strict2.violations.size()) return fail("strict outcomes differ");
  return {};
}

Outcome csv_round_trips(std::uint64_t seed) {
  auto spec = sim::same_group_pair(seed, 400);
  spec.sites[0].low_wind_source_ppb = 8.0;
  spec.drifts.push_back({"A", 200, sim::DriftKind::kGainRamp, 1.6, 24});
  auto sc = sim::generate(spec);
  auto& a = sc.dataset.series.at("A");
  a.samples[3].no2_ppb.reset();
  a.samples[4].wind_speed_ms.reset();
  a.samples[4].wind_dir_deg.reset();

  auto obs = io::parse_observations(io::observations_csv(sc.dataset));
  obs.dataset.sites = io::parse_sites(io::sites_csv(sc.dataset.sites));
  if (obs.dataset != sc.dataset) return fail("dataset round trip");
  if (io::parse_ingest_report(io::ingest_report_csv(obs.report)) != obs.report) return fail("ingest report round trip");

  const auto assignments = proxy::select_knn(sc.dataset.sites);
  if (io::parse_assignments(io::assignments_csv(assignments)) != assignments) return fail("assignments round trip");

  const auto state = drift::run_framework(a, sc.dataset.series.at("B"), {});
  const auto trail = io::trail_rows(state);
  if (io::parse_trail(io::trail_csv(trail)) != trail) return fail("trail round trip");

  const auto corrected = correct::apply_correction(a, state, sc.dataset.series.at("B"), {});
  const auto back = io::parse_corrected(io::corrected_csv(corrected.rows));
  if (back.size() != corrected.rows.size()) return fail("corrected row count");
  for (std::size_t i = 0; i < back.size(); ++i) {
    const auto& x = back[i];
    const auto& y = corrected.rows[i];
    const bool params_equal = x.params.has_value() == y.params.has_value() &&
                              (!x.params || (x.params->intercept == y.params->intercept &&
                                             x.params->slope == y.params->slope));
    if (x.at != y.at || x.raw_ppb != y.raw_ppb || x.corrected_ppb != y.corrected_ppb || x.flag != y.flag ||
        !params_equal)
      return fail("corrected series round trip at row " + std::to_string(i));
  }

  const auto grid = io::polar_grid_rows(met::bin_alarms_by_wind(state, a));
  if (io::parse_polar_grid(io::polar_grid_csv(grid)) != grid) return fail("polar grid round trip");

  const auto sched = io::parse_drift_schedule(io::drift_schedule_csv(sc.truth.schedule), sc.truth.schedule.epoch_start);
  if (sched.events != sc.truth.schedule.events) return fail("drift schedule round trip");

  const auto cfg_text = io::analysis_config_text(io::AnalysisConfig{});
  if (io::analysis_config_text(io::parse_analysis_config(cfg_text)) != cfg_text) return fail("config round trip");
  return {};
}

Outcome csv_byte_determinism(std::uint64_t seed) {
  const auto sc = small_pair(seed, 300, 5.0);
  const auto state = drift::run_framework(sc.dataset.series.at("A"), sc.dataset.series.at("B"), {});
  const auto rows = io::trail_rows(state);
  if (io::observations_csv(sc.dataset) != io::observations_csv(sc.dataset)) return fail("observations bytes");
  if (io::trail_csv(rows) != io::trail_csv(rows)) return fail("trail bytes");
  const auto text = io::trail_csv(rows);
  if (text.find('\r') != std::string::npos) return fail("CR in output");
  return {};
}

Outcome simulator_determinism(std::uint64_t seed) {
  auto spec = sim::default_network(seed);
  spec.hours = 500;
  const auto a = sim::generate(spec);
  const auto b = sim::generate(spec);
  if (a.dataset != b.dataset || a.truth.true_ppb != b.truth.true_ppb) return fail("datasets differ");
  if (io::observations_csv(a.dataset) != io::observations_csv(b.dataset)) return fail("bytes differ");
  return {};
}

Outcome zero_noise_drift_invertible(std::uint64_t seed) {
  auto spec = sim::same_group_pair(seed, 600);
  for (auto& s : spec.sites) s.noise_sd_ppb = 0.0;
  spec.drifts.push_back({"A", 100, sim::DriftKind::kGainRamp, 1.3, 48});
  spec.drifts.push_back({"A", 300, sim::DriftKind::kOffsetStep, 10.0, 0});
  spec.drifts.push_back({"B", 50, sim::DriftKind::kGainRamp, 0.7, 0});
  const auto sc = sim::generate(spec);
  for (const auto& [id, series] : sc.dataset.series) {
    const auto& truth = sc.truth.true_ppb.at(id);
    for (std::size_t i = 0; i < series.size(); ++i) {
      const auto d = sim::drift_at(spec.drifts, id, static_cast<std::int64_t>(i));
      const double x = (*series.samples[i].no2_ppb - d.offset) / d.gain;
      if (std::abs(x - truth[i]) > 1e-9) return fail(id + " hour " + std::to_string(i) + ": " + str(x));
    }
  }
  return {};
}

std::vector<NamedProperty> all_properties(std::uint64_t seed) {
  return {
      {"ks symmetry", [=] { return ks_symmetry(seed, 200); }},
      {"ks monotone-transform invariance", [=] { return ks_monotone_transform_invariance(seed, 200); }},
      {"ks exact p vs permutation (n1=n2=6 and all n1+n2<=12)",
       [=] { return ks_exact_matches_permutation(seed, 12, 1e-6); }},
      {"mean_var linearity", [=] { return mean_var_linearity(seed, 500); }},
      {"kl self-zero and non-negative", [=] { return kl_self_zero_and_nonnegative(seed, 100); }},
      {"no site is its own proxy", [=] { return no_site_is_its_own_proxy(seed, 100); }},
      {"knn affine rescaling invariance", [=] { return knn_affine_rescaling_invariance(seed, 200); }},
      {"haversine symmetry", [=] { return haversine_symmetry(seed, 500); }},
      {"selection determinism", [=] { return selection_determinism(seed, 100); }},
      {"slope scale equivariance", [=] { return slope_scale_equivariance(seed, 300); }},
      {"window locality", [=] { return window_locality(seed, 20); }},
      {"failure spans vs brute force", [=] { return failure_spans_match_brute_force(seed, 500); }},
      {"framework determinism", [=] { return framework_determinism(seed); }},
      {"moment matching exact", [=] { return moment_matching_exact(seed, 300, 1e-9); }},
      {"correction idempotence", [=] { return correction_idempotence(seed, 300); }},
      {"correction affine covariance", [=] { return correction_affine_covariance(seed, 20); }},
      {"wind cells sum to evaluable hours", [=] { return wind_cells_sum_to_evaluable_hours(seed); }},
      {"wind grid row-order invariance", [=] { return wind_grid_row_order_invariance(seed); }},
      {"validation idempotence", [=] { return validation_idempotence(seed); }},
      {"csv round trips", [=] { return csv_round_trips(seed); }},
      {"csv byte determinism", [=] { return csv_byte_determinism(seed); }},
      {"simulator determinism", [=] { return simulator_determinism(seed); }},
      {"zero-noise drift invertible", [=] { return zero_noise_drift_invertible(seed); }},
  };
}

}  // namespace proxycal::props
