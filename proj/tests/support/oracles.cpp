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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace proxycal::oracle {

double ecdf_sweep_d(std::span<const double> a, std::span<const double> b) {
  auto ecdf = [](std::span<const double> s, double x) {
    std::size_t c = 0;
    for (double v : s) c += v <= x ? 1 : 0;
    return static_cast<double>(c) / static_cast<double>(s.size());
  };
  double d = 0.0;
  for (auto sample : {a, b}) {
    for (double x : sample) d = std::max(d, std::abs(ecdf(a, x) - ecdf(b, x)));
  }
  return d;
}

namespace {

// D scaled by n1*n2 so that comparisons are exact integers.
std::int64_t scaled_d(const std::vector<double>& pooled, const std::vector<bool>& in_a, std::int64_t n1,
                      std::int64_t n2) {
  std::int64_t best = 0;
  for (double x : pooled) {
    std::int64_t ca = 0;
    std::int64_t cb = 0;
    for (std::size_t k = 0; k < pooled.size(); ++k) {
      if (pooled[k] <= x) (in_a[k] ? ca : cb) += 1;
    }
    best = std::max(best, std::abs(ca * n2 - cb * n1));
  }
  return best;
}

}  // namespace

double permutation_p_value(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto n1 = static_cast<std::int64_t>(a.size());
  const auto n2 = static_cast<std::int64_t>(b.size());
  std::vector<bool> in_a(pooled.size(), false);
  std::fill(in_a.begin(), in_a.begin() + n1, true);
  const std::int64_t observed = scaled_d(pooled, in_a, n1, n2);

  // Walk every n1-subset through the permutations of a sorted mask.
  std::vector<bool> mask(pooled.size(), false);
  std::fill(mask.end() - n1, mask.end(), true);
  std::uint64_t total = 0;
  std::uint64_t extreme = 0;
  do {
    ++total;
    if (scaled_d(pooled, mask, n1, n2) >= observed) ++extreme;
  } while (std::next_permutation(mask.begin(), mask.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

double kl_closed_form(std::span<const double> p, std::span<const double> q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) d += p[i] * std::log(p[i] / q[i]);
  }
  return d;
}

WideMoments wide_moments(std::span<const double> x) {
  long double s = 0;
  for (double v : x) s += v;
  const long double m = s / static_cast<long double>(x.size());
  long double ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  return {m, ss / static_cast<long double>(x.size() - 1)};
}

std::vector<drift::Span> brute_failure_spans(std::span<const Hour> at, const std::vector<bool>& alarm,
                                             int failure_hours, int stride) {
  const std::size_t n = at.size();
  std::vector<bool> failing(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    // Walk back to the start of the alarm run containing i.
    if (!alarm[i]) continue;
    std::size_t j = i;
    while (j > 0 && alarm[j - 1]) --j;
    const std::int64_t covered = (at[i] - at[j]) + stride;
    if (covered >= failure_hours) {
      // Once failing, the rest of the run stays failing.
      for (std::size_t k = i; k < n && alarm[k]; ++k) failing[k] = true;
    }
  }
  std::vector<drift::Span> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!failing[i] || (i > 0 && failing[i - 1])) continue;
    std::size_t e = i;
    while (e + 1 < n && failing[e + 1]) ++e;
    out.push_back({at[i], at[e]});
  }
  return out;
}

HourlySeries make_series(const std::string& id, Hour start, std::span<const double> values) {
  HourlySeries s;
  s.site_id = id;
  for (std::size_t i = 0; i < values.size(); ++i)
    s.samples.push_back({start + static_cast<std::int64_t>(i), values[i], std::nullopt, std::nullopt});
  return s;
}

std::vector<double> normal_sample(std::mt19937_64& rng, std::size_t n, double mean, double sd) {
  std::normal_distribution<double> d(mean, sd);
  std::vector<double> out(n);
  for (auto& v : out) v = d(rng);
  return out;
}

}  // namespace proxycal::oracle
