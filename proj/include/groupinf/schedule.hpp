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

// Progressive-pruning schedule. rho is the fraction of the pool that survives
// each step; the pool evaluated at step j+1 is max(k, ceil(rho * |pool_j|)).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "groupinf/error.hpp"

namespace groupinf {

// Slack for products such as 0.1 * 30 that land one ulp above an integer.
inline constexpr double kRoundingSlack = 1e-9;

struct PruneSchedule {
  std::size_t m = 0;
  std::size_t k = 0;
  double rho = 1.0;
  std::size_t t_total = 0;
  std::vector<std::size_t> sizes;     // pool evaluated at each step
  std::optional<std::size_t> t_star;  // empty when rho == 1 and m > k
  std::uint64_t nfe = 0;              // sum of sizes
};

inline void validate_schedule_args(std::size_t m, std::size_t k, double rho,
                                   std::size_t t_total) {
  detail::require(k >= 1, "schedule: k must be >= 1");
  detail::require(m >= k, "schedule: m=" + std::to_string(m) + " < k=" +
                              std::to_string(k));
  detail::require(std::isfinite(rho) && rho > 0.0 && rho <= 1.0,
                  "schedule: rho must lie in (0, 1]");
  detail::require(t_total >= 1, "schedule: steps must be >= 1");
}

// Pool size after pruning a pool of `n` live candidates.
inline std::size_t retained_count(std::size_t n, double rho, std::size_t k) {
  if (rho >= 1.0 || n <= k) return n;
  const double kept = std::ceil(rho * static_cast<double>(n) - kRoundingSlack);
  const auto c = static_cast<std::size_t>(kept);
  return std::max(k, std::min(c, n));
}

inline std::optional<std::size_t> crossover_step(std::size_t m, std::size_t k,
                                                 double rho) {
  if (m == k) return 0;
  if (rho >= 1.0) return std::nullopt;
  const double x = std::log(static_cast<double>(k) / static_cast<double>(m)) /
                   std::log(rho);
  return static_cast<std::size_t>(std::ceil(x - kRoundingSlack));
}

inline PruneSchedule build_schedule(std::size_t m, std::size_t k, double rho,
                                    std::size_t t_total) {
  validate_schedule_args(m, k, rho, t_total);
  PruneSchedule s;
  s.m = m;
  s.k = k;
  s.rho = rho;
  s.t_total = t_total;
  s.sizes.reserve(t_total);
  std::size_t pool = m;
  for (std::size_t j = 0; j < t_total; ++j) {
    s.sizes.push_back(pool);
    pool = retained_count(pool, rho, k);
  }
  s.t_star = crossover_step(m, k, rho);
  s.nfe = std::accumulate(s.sizes.begin(), s.sizes.end(), std::uint64_t{0});
  return s;
}

inline std::uint64_t nfe_naive(std::size_t m, std::size_t t_total) {
  detail::require(m >= 1 && t_total >= 1, "nfe_naive: m and steps must be >= 1");
  return static_cast<std::uint64_t>(m) * t_total;
}

inline double savings_ratio(const PruneSchedule& s) {
  const std::uint64_t naive = nfe_naive(s.m, s.t_total);
  // One correctly rounded division: (naive - nfe) / naive.
  return static_cast<double>(naive - s.nfe) / static_cast<double>(naive);
}

}  // namespace groupinf
