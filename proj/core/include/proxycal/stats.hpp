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

#ifndef PROXYCAL_STATS_HPP_
#define PROXYCAL_STATS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace proxycal::stats {

struct Moments {
  double mean = 0.0;
  // Unbiased sample variance (n - 1 denominator).
  double variance = 0.0;
  std::size_t n = 0;
};

// Throws Error(kInsufficientData) for fewer than two values.
Moments mean_var(std::span<const double> sample);

// Moment-matching parameters of the affine measurement model
// corrected = intercept + slope * observed, chosen so that the corrected site
// window has the proxy window's mean and variance.
//
// Conventions for degenerate windows:
//   site var > 0, proxy var > 0  -> slope = sqrt(var_proxy / var_site)
//   both variances zero          -> slope = 1, intercept = mean difference
//   exactly one variance zero    -> slope and intercept indeterminate
struct MomentMatch {
  std::optional<double> slope;
  std::optional<double> intercept;
  bool degenerate = false;
};

MomentMatch match_moments(const Moments& site, const Moments& proxy);

struct KsOptions {
  // Smallest accepted size of either sample.
  std::size_t min_size = 10;
  // Exact permutation p-values are used while n1 + n2 <= exact_cutoff.
  std::size_t exact_cutoff = 20;
};

struct KsResult {
  double d_stat = 0.0;
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  bool exact = false;
};

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       const KsOptions& options = {});

// sup_x |F_a(x) - F_b(x)| scaled by n1 * n2, so that the statistic is an
// exact integer. d_stat = ks_scaled_statistic / (n1 * n2).
std::int64_t ks_scaled_statistic(std::span<const double> a, std::span<const double> b);

// P(D >= d_observed) over all C(n1 + n2, n1) relabelings of the pooled data,
// counted by dynamic programming over the sorted pooled sequence. Ties are
// only split at boundaries between distinct values.
double ks_exact_p_value(std::span<const double> a, std::span<const double> b);

// Survival function of the Kolmogorov distribution,
// Q(lambda) = 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

struct Histogram {
  double bin_width = 1.0;
  // Left edge of the first bin.
  double origin = 0.0;
  std::vector<std::uint64_t> counts;
  std::uint64_t n = 0;

  std::size_t bins() const { return counts.size(); }
  double left_edge(std::size_t bin) const { return origin + static_cast<double>(bin) * bin_width; }
  std::vector<double> probabilities() const;
};

// Bin i of the returned histogram covers
// [origin + k*w, origin + (k+1)*w) for the grid anchored at `origin`;
// only bins between the sample minimum and maximum are kept.
Histogram build_histogram(std::span<const double> sample, double bin_width, double origin = 0.0);

struct KlOptions {
  // Adds 1 / (10 * n) to every bin probability of each histogram over the
  // union support, then renormalizes.
  bool smoothing = true;
};

// D(p || q) in nats. Both histograms must lie on the same bin grid; they are
// re-binned onto the union of their supports before comparison.
double kl_divergence(const Histogram& p, const Histogram& q, const KlOptions& options = {});

}  // namespace proxycal::stats

#endif  // PROXYCAL_STATS_HPP_
