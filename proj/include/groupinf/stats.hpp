// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "groupinf/error.hpp"

namespace groupinf {

// 1-based ranks; tied values share the average of their positions.
inline std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo + 1;
    while (hi < n && v[order[hi]] == v[order[lo]]) ++hi;
    const double r = 0.5 * static_cast<double>(lo + 1 + hi);
    for (std::size_t q = lo; q < hi; ++q) ranks[order[q]] = r;
    lo = hi;
  }
  return ranks;
}

// Pearson correlation; empty when either side has zero variance.
inline std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  detail::require(a.size() == b.size(), "pearson: length mismatch");
  const std::size_t n = a.size();
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

// Spearman rank correlation. Empty (not NaN) when a side is constant.
inline std::optional<double> spearman(std::span<const double> a, std::span<const double> b) {
  detail::require(a.size() == b.size(), "spearman: length mismatch");
  detail::require(a.size() >= 2, "spearman: need at least two observations");
  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  return pearson(ra, rb);
}

inline double mean(std::span<const double> v) {
  detail::require(!v.empty(), "mean: empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Bootstrap distribution of the sample mean.
inline std::vector<double> bootstrap_means(std::span<const double> v, std::size_t resamples,
                                           std::uint64_t seed) {
  detail::require(!v.empty(), "bootstrap: empty sample");
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
  std::vector<double> out(resamples);
  for (double& m : out) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[pick(gen)];
    m = s / static_cast<double>(v.size());
  }
  return out;
}

inline double bootstrap_se(std::span<const double> v, std::size_t resamples = 1000,
                           std::uint64_t seed = 0x5eed) {
  const std::vector<double> means = bootstrap_means(v, resamples, seed);
  const double mu = mean(means);
  double ss = 0.0;
  for (double m : means) ss += (m - mu) * (m - mu);
  return resamples > 1 ? std::sqrt(ss / static_cast<double>(resamples - 1)) : 0.0;
}

// Percentile interval of the bootstrap mean.
inline std::pair<double, double> bootstrap_ci(std::span<const double> v, double level = 0.95,
                                              std::size_t resamples = 1000,
                                              std::uint64_t seed = 0x5eed) {
  std::vector<double> means = bootstrap_means(v, resamples, seed);
  std::sort(means.begin(), means.end());
  const double alpha = (1.0 - level) / 2.0;
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(means.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, means.size() - 1);
    return means[lo] + (pos - lo) * (means[hi] - means[lo]);
  };
  return {at(alpha), at(1.0 - alpha)};
}

// Interval for mean(after - before) over paired observations.
inline std::pair<double, double> paired_bootstrap_ci(std::span<const double> before,
                                                     std::span<const double> after,
                                                     double level = 0.95,
                                                     std::size_t resamples = 1000,
                                                     std::uint64_t seed = 0x5eed) {
  detail::require(before.size() == after.size(), "paired bootstrap: length mismatch");
  std::vector<double> diff(before.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = after[i] - before[i];
  return bootstrap_ci(diff, level, resamples, seed);
}

}  // namespace groupinf
