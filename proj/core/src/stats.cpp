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

#include "proxycal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "proxycal/error.hpp"

namespace proxycal::stats {

Moments mean_var(std::span<const double> sample) {
  if (sample.size() < 2) {
    throw Error(ErrorCode::kInsufficientData,
                "mean_var needs at least 2 values, got " + std::to_string(sample.size()));
  }
  const double n = static_cast<double>(sample.size());
  double sum = 0.0;
  for (double v : sample) sum += v;
  const double mean = sum / n;
  // Two-pass with the compensation term keeps var(c*x + k) = c^2 var(x)
  // to rounding error.
  double ss = 0.0;
  double comp = 0.0;
  for (double v : sample) {
    const double d = v - mean;
    ss += d * d;
    comp += d;
  }
  const double variance = std::max(0.0, (ss - comp * comp / n) / (n - 1.0));
  return {mean, variance, sample.size()};
}

MomentMatch match_moments(const Moments& site, const Moments& proxy) {
  MomentMatch out;
  const bool site_flat = site.variance == 0.0;
  const bool proxy_flat = proxy.variance == 0.0;
  if (site_flat && proxy_flat) {
    out.slope = 1.0;
    out.intercept = proxy.mean - site.mean;
    out.degenerate = true;
  } else if (site_flat || proxy_flat) {
    out.degenerate = true;
  } else {
    const double slope = std::sqrt(proxy.variance / site.variance);
    out.slope = slope;
    out.intercept = proxy.mean - slope * site.mean;
  }
  return out;
}

namespace {

std::vector<double> sorted_copy(std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  std::sort(out.begin(), out.end());
  return out;
}

void require_finite(std::span<const double> x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidInput, std::string(what) + ": non-finite value");
  }
}

}  // namespace

std::int64_t ks_scaled_statistic(std::span<const double> a, std::span<const double> b) {
  const auto sa = sorted_copy(a);
  const auto sb = sorted_copy(b);
  const auto n1 = static_cast<std::int64_t>(sa.size());
  const auto n2 = static_cast<std::int64_t>(sb.size());
  std::int64_t i = 0;
  std::int64_t j = 0;
  std::int64_t best = 0;
  while (i < n1 || j < n2) {
    double v;
    if (i == n1) {
      v = sb[j];
    } else if (j == n2) {
      v = sa[i];
    } else {
      v = std::min(sa[i], sb[j]);
    }
    while (i < n1 && sa[i] <= v) ++i;
    while (j < n2 && sb[j] <= v) ++j;
    best = std::max(best, std::abs(i * n2 - j * n1));
  }
  return best;
}

double ks_exact_p_value(std::span<const double> a, std::span<const double> b) {
  const std::int64_t d_obs = ks_scaled_statistic(a, b);
  if (d_obs == 0) return 1.0;
  const auto n1 = static_cast<std::int64_t>(a.size());
  const auto n2 = static_cast<std::int64_t>(b.size());
  const std::int64_t n = n1 + n2;

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());

  // safe[i] counts label paths through (i, k - i) that never reached
  // |i/n1 - j/n2| >= d_obs at a value boundary; total[i] counts all paths.
  std::vector<double> safe(static_cast<std::size_t>(n1) + 1, 0.0);
  std::vector<double> total(static_cast<std::size_t>(n1) + 1, 0.0);
  safe[0] = 1.0;
  total[0] = 1.0;
  for (std::int64_t k = 0; k < n; ++k) {
    const std::int64_t step = k + 1;
    const std::int64_t i_hi = std::min(n1, step);
    const std::int64_t i_lo = std::max<std::int64_t>(0, step - n2);
    for (std::int64_t i = n1; i >= 0; --i) {
      if (i < i_lo || i > i_hi) {
        safe[i] = 0.0;
        total[i] = 0.0;
      } else if (i > 0) {
        safe[i] += safe[i - 1];
        total[i] += total[i - 1];
      }
    }
    const bool boundary = step == n || pooled[k] != pooled[k + 1];
    if (boundary) {
      for (std::int64_t i = i_lo; i <= i_hi; ++i) {
        const std::int64_t j = step - i;
        if (std::abs(i * n2 - j * n1) >= d_obs) safe[i] = 0.0;
      }
    }
  }
  const double p = 1.0 - safe[n1] / total[n1];
  return std::clamp(p, 0.0, 1.0);
}

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  constexpr double kPi = std::numbers::pi;
  if (lambda < 1.18) {
    // Theta-function form converges quickly for small lambda.
    const double y = -kPi * kPi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(odd * odd * y);
      sum += term;
      if (term < 1e-10 * sum) break;
    }
    const double cdf = std::sqrt(2.0 * kPi) / lambda * sum;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-10) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       const KsOptions& options) {
  if (a.size() < options.min_size || b.size() < options.min_size || a.empty() || b.empty()) {
    throw Error(ErrorCode::kInsufficientData,
                "ks_two_sample needs at least " + std::to_string(std::max<std::size_t>(options.min_size, 1)) +
                    " values per sample, got " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()));
  }
  require_finite(a, "ks_two_sample");
  require_finite(b, "ks_two_sample");

  KsResult out;
  out.n1 = a.size();
  out.n2 = b.size();
  const double n1 = static_cast<double>(out.n1);
  const double n2 = static_cast<double>(out.n2);
  out.d_stat = static_cast<double>(ks_scaled_statistic(a, b)) / (n1 * n2);
  if (out.n1 + out.n2 <= options.exact_cutoff) {
    out.p_value = ks_exact_p_value(a, b);
    out.exact = true;
  } else {
    const double effective_n = n1 * n2 / (n1 + n2);
    out.p_value = kolmogorov_survival(std::sqrt(effective_n) * out.d_stat);
  }
  return out;
}

std::vector<double> Histogram::probabilities() const {
  std::vector<double> p(counts.size(), 0.0);
  if (n == 0) return p;
  for (std::size_t i = 0; i < counts.size(); ++i)
    p[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  return p;
}

Histogram build_histogram(std::span<const double> sample, double bin_width, double origin) {
  if (sample.empty()) throw Error(ErrorCode::kInsufficientData, "build_histogram: empty sample");
  if (!(bin_width > 0.0) || !std::isfinite(bin_width))
    throw Error(ErrorCode::kInvalidInput, "build_histogram: bin_width must be > 0");
  if (!std::isfinite(origin)) throw Error(ErrorCode::kInvalidInput, "build_histogram: non-finite origin");
  require_finite(sample, "build_histogram");

  auto index = [&](double v) { return static_cast<std::int64_t>(std::floor((v - origin) / bin_width)); };
  const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
  const std::int64_t first = index(*lo);
  const std::int64_t last = index(*hi);
  constexpr std::int64_t kMaxBins = 10'000'000;
  if (last - first + 1 > kMaxBins)
    throw Error(ErrorCode::kInvalidInput, "build_histogram: sample range needs too many bins");

  Histogram h;
  h.bin_width = bin_width;
  h.origin = origin + static_cast<double>(first) * bin_width;
  h.counts.assign(static_cast<std::size_t>(last - first + 1), 0);
  for (double v : sample) ++h.counts[static_cast<std::size_t>(index(v) - first)];
  h.n = sample.size();
  return h;
}

double kl_divergence(const Histogram& p, const Histogram& q, const KlOptions& options) {
  if (p.n == 0 || q.n == 0) throw Error(ErrorCode::kInsufficientData, "kl_divergence: empty histogram");
  const double w = p.bin_width;
  if (std::abs(p.bin_width - q.bin_width) > 1e-12 * w)
    throw Error(ErrorCode::kMismatch, "kl_divergence: histograms use different bin widths");
  const double offset = (q.origin - p.origin) / w;
  const double shift_f = std::round(offset);
  if (std::abs(offset - shift_f) > 1e-6)
    throw Error(ErrorCode::kMismatch, "kl_divergence: histogram bin edges are not aligned");
  const auto shift = static_cast<std::int64_t>(shift_f);

  // Union support in p's bin coordinates: [begin, end).
  const std::int64_t begin = std::min<std::int64_t>(0, shift);
  const std::int64_t end = std::max<std::int64_t>(static_cast<std::int64_t>(p.bins()),
                                                  shift + static_cast<std::int64_t>(q.bins()));
  const auto k = static_cast<std::size_t>(end - begin);

  auto spread = [&](const Histogram& h, std::int64_t at) {
    std::vector<double> probs(k, 0.0);
    const double n = static_cast<double>(h.n);
    for (std::size_t i = 0; i < h.counts.size(); ++i)
      probs[static_cast<std::size_t>(at - begin) + i] = static_cast<double>(h.counts[i]) / n;
    if (options.smoothing) {
      const double eps = 1.0 / (10.0 * n);
      const double norm = 1.0 + static_cast<double>(k) * eps;
      for (double& v : probs) v = (v + eps) / norm;
    }
    return probs;
  };
  const auto pp = spread(p, 0);
  const auto qq = spread(q, shift);

  double d = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (pp[i] <= 0.0) continue;
    if (qq[i] <= 0.0) return std::numeric_limits<double>::infinity();
    d += pp[i] * std::log(pp[i] / qq[i]);
  }
  return std::max(0.0, d);
}

}  // namespace proxycal::stats
