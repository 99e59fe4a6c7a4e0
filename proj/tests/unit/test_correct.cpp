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

#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "proxycal/correct.hpp"
#include "proxycal/error.hpp"
#include "proxycal/sim.hpp"

using namespace proxycal;
using doctest::Approx;

namespace {

const Hour kJan1 = hour_from_civil(2018, 1, 1, 0);

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

drift::FrameworkState active_over(const HourlySeries& site, const HourlySeries& proxy, Hour from, Hour to) {
  drift::FrameworkState st;
  st.site_id = site.site_id;
  st.proxy_id = proxy.site_id;
  st.correction_active_spans.push_back({from, to});
  return st;
}

}  // namespace

TEST_CASE("fit_parameters worked examples") {
  const std::vector<double> y{1, 2, 3};
  auto p = correct::fit_parameters(y, y);
  REQUIRE(p);
  CHECK(p->intercept == Approx(0.0));
  CHECK(p->slope == Approx(1.0));

  p = correct::fit_parameters(y, std::vector<double>{2, 4, 6});
  REQUIRE(p);
  CHECK(p->intercept == Approx(0.0));
  CHECK(p->slope == Approx(2.0));

  p = correct::fit_parameters(y, std::vector<double>{6, 7, 8});
  REQUIRE(p);
  CHECK(p->intercept == Approx(5.0));
  CHECK(p->slope == Approx(1.0));

  CHECK_FALSE(correct::fit_parameters(std::vector<double>{1}, y));
  CHECK_FALSE(correct::fit_parameters(std::vector<double>{4, 4, 4}, y));
}

TEST_CASE("no active spans leaves the series untouched") {
  const auto data = sim::generate(sim::same_group_pair(5, 300)).dataset;
  const auto& a = data.series.at("A");
  const auto& b = data.series.at("B");
  const auto st = drift::run_framework(a, b, {});
  REQUIRE(st.correction_active_spans.empty());
  const auto res = correct::apply_correction(a, st, b, {});
  CHECK(res.corrected == a);
  CHECK(res.corrected_hours() == 0);
  CHECK(res.parameter_trail().empty());
}

TEST_CASE("site reading 1/1.5 of the proxy is restored") {
  std::mt19937_64 rng(11);
  const auto z = oracle::normal_sample(rng, 200, 30.0, 6.0);
  std::vector<double> y;
  for (double v : z) y.push_back(v / 1.5);
  const auto site = oracle::make_series("S", kJan1, y);
  const auto proxy = oracle::make_series("P", kJan1, z);
  const auto st = active_over(site, proxy, kJan1 + 71, kJan1 + 199);
  const auto res = correct::apply_correction(site, st, proxy, {});
  CHECK(res.corrected_hours() == 129);
  for (std::size_t i = 71; i < 200; ++i) {
    REQUIRE(res.rows[i].params);
    CHECK(res.rows[i].params->slope == Approx(1.5).epsilon(1e-12));
    CHECK(res.rows[i].params->intercept == Approx(0.0).scale(30.0).epsilon(1e-10));
    CHECK(*res.corrected.samples[i].no2_ppb == Approx(z[i]).epsilon(1e-10));
  }
  CHECK(res.rows[70].flag == correct::CorrectionFlag::kPassThrough);
  CHECK(*res.corrected.samples[70].no2_ppb == y[70]);
}

TEST_CASE("corrected gain-drifted site lines up with the truth") {
  auto spec = sim::same_group_pair(21, 1500);
  spec.drifts.push_back({"A", 100, sim::DriftKind::kGainRamp, 1.3, 0});
  const auto sc = sim::generate(spec);
  const auto& a = sc.dataset.series.at("A");
  const auto& b = sc.dataset.series.at("B");
  const auto& x = sc.truth.true_ppb.at("A");
  const auto st = active_over(a, b, a.first_hour() + 172, a.last_hour());
  const auto res = correct::apply_correction(a, st, b, {});

  std::vector<double> truth, before, after;
  for (std::size_t i = 300; i < a.size(); ++i) {
    truth.push_back(x[i]);
    before.push_back(*a.samples[i].no2_ppb);
    after.push_back(*res.corrected.samples[i].no2_ppb);
  }
  CHECK(ols_slope(truth, before) == Approx(1.3).epsilon(0.05));
  CHECK(std::abs(ols_slope(truth, after) - 1.0) < 0.1);
}

TEST_CASE("negative corrected values are clamped") {
  // The proxy sits 40 ppb lower, so low site hours map below zero.
  std::mt19937_64 rng(3);
  const auto y = oracle::normal_sample(rng, 100, 40.0, 10.0);
  std::vector<double> z;
  for (double v : y) z.push_back(v - 40.0 + 2.0);
  const auto site = oracle::make_series("S", kJan1, y);
  const auto proxy = oracle::make_series("P", kJan1, z);
  const auto res = correct::apply_correction(site, active_over(site, proxy, kJan1, kJan1 + 99), proxy, {});
  CHECK(res.clamped_hours() > 0);
  for (const auto& r : res.rows) {
    if (r.flag == correct::CorrectionFlag::kClamped) CHECK(*r.corrected_ppb == 0.0);
    if (r.corrected_ppb) CHECK(*r.corrected_ppb >= 0.0);
  }
}

TEST_CASE("apply_correction errors") {
  const std::vector<double> v(100, 1.0);
  const auto site = oracle::make_series("S", kJan1, v);
  const auto proxy = oracle::make_series("P", kJan1, v);
  auto st = active_over(site, proxy, kJan1, kJan1 + 10);
  st.proxy_id = "Q";
  CHECK_THROWS_AS(correct::apply_correction(site, st, proxy, {}), Error);
  const auto shifted = oracle::make_series("P", kJan1 + 1, v);
  CHECK_THROWS_AS(correct::apply_correction(site, active_over(site, shifted, kJan1, kJan1), shifted, {}), Error);
  CHECK_THROWS_AS(correct::apply_correction(site, active_over(site, proxy, kJan1, kJan1 + 500), proxy, {}), Error);
}
