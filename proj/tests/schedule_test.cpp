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

#include "groupinf/schedule.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "oracles.hpp"

namespace groupinf {
namespace {

TEST(BuildSchedule, SixtyFourToFourOverTwentySteps) {
  const PruneSchedule s = build_schedule(64, 4, 0.5, 20);
  std::vector<std::size_t> expected{64, 32, 16, 8};
  expected.resize(20, 4);
  EXPECT_EQ(s.sizes, expected);
  ASSERT_TRUE(s.t_star.has_value());
  EXPECT_EQ(*s.t_star, 4u);
  EXPECT_EQ(s.nfe, 184u);
  EXPECT_EQ(nfe_naive(64, 20), 1280u);
  EXPECT_EQ(savings_ratio(s), 0.85625);
}

TEST(BuildSchedule, NothingToPrune) {
  const PruneSchedule s = build_schedule(5, 5, 0.3, 7);
  EXPECT_EQ(s.sizes, std::vector<std::size_t>(7, 5));
  EXPECT_EQ(*s.t_star, 0u);
  EXPECT_EQ(s.nfe, 35u);
  EXPECT_EQ(savings_ratio(s), 0.0);
}

TEST(BuildSchedule, RetentionOneMeansNoPruning) {
  const PruneSchedule s = build_schedule(16, 4, 1.0, 6);
  EXPECT_EQ(s.sizes, std::vector<std::size_t>(6, 16));
  EXPECT_FALSE(s.t_star.has_value());
  EXPECT_EQ(s.nfe, 96u);
  EXPECT_EQ(savings_ratio(s), 0.0);
}

TEST(BuildSchedule, CrossoverFormula) {
  EXPECT_EQ(*crossover_step(64, 4, 0.5), 4u);  // ceil(log(1/16) / log(1/2))
  EXPECT_EQ(*crossover_step(100, 10, 0.1), 1u);
  EXPECT_EQ(*crossover_step(10, 3, 0.5), 2u);
}

TEST(BuildSchedule, RoundsRetainedCountUp) {
  // 0.1 * 30 evaluates to 3.0000000000000004 in binary floating point.
  EXPECT_EQ(retained_count(30, 0.1, 1), 3u);
  EXPECT_EQ(retained_count(7, 0.5, 1), 4u);
  EXPECT_EQ(retained_count(9, 0.5, 6), 6u);
}

TEST(BuildSchedule, RejectsInvalidArguments) {
  EXPECT_THROW(build_schedule(3, 4, 0.5, 10), ValidationError);
  EXPECT_THROW(build_schedule(8, 0, 0.5, 10), ValidationError);
  EXPECT_THROW(build_schedule(8, 4, 0.0, 10), ValidationError);
  EXPECT_THROW(build_schedule(8, 4, 1.5, 10), ValidationError);
  EXPECT_THROW(build_schedule(8, 4, std::nan(""), 10), ValidationError);
  EXPECT_THROW(build_schedule(8, 4, 0.5, 0), ValidationError);
  EXPECT_THROW(nfe_naive(0, 3), ValidationError);
}

TEST(NfeNaive, Products) {
  EXPECT_EQ(nfe_naive(1, 1), 1u);
  EXPECT_EQ(nfe_naive(128, 4), 512u);
}

// ---- properties -----------------------------------------------------------

const std::vector<std::size_t> kMs{1, 2, 3, 4, 5, 8, 13, 16, 31, 64, 100, 128};
const std::vector<std::size_t> kKs{1, 2, 3, 4, 7};
const std::vector<double> kRhos{0.1, 0.25, 0.3, 0.5, 0.75, 0.9, 1.0};
const std::vector<std::size_t> kTs{1, 2, 4, 8, 20};

TEST(ScheduleProperty, StructuralInvariants) {
  for (std::size_t m : kMs)
    for (std::size_t k : kKs) {
      if (k > m) continue;
      for (double rho : kRhos)
        for (std::size_t T : kTs) {
          const PruneSchedule s = build_schedule(m, k, rho, T);
          ASSERT_EQ(s.sizes.size(), T);
          ASSERT_EQ(s.sizes.front(), m);
          ASSERT_EQ(s.nfe, std::accumulate(s.sizes.begin(), s.sizes.end(), std::uint64_t{0}));
          ASSERT_GE(s.nfe, static_cast<std::uint64_t>(k) * T);
          ASSERT_LE(s.nfe, static_cast<std::uint64_t>(m) * T);
          for (std::size_t j = 0; j < T; ++j) {
            ASSERT_GE(s.sizes[j], k);
            if (j > 0) {
              ASSERT_LE(s.sizes[j], s.sizes[j - 1]);
              // Authoritative recurrence.
              ASSERT_EQ(s.sizes[j], retained_count(s.sizes[j - 1], rho, k));
            }
          }
        }
    }
}

TEST(ScheduleProperty, ReachesTargetAfterCrossover) {
  // With exact powers the pool hits k at step t* + 1 and stays there.
  for (std::size_t m : {8u, 16u, 64u, 128u})
    for (std::size_t k : {1u, 2u, 4u}) {
      const PruneSchedule s = build_schedule(m, k, 0.5, 20);
      ASSERT_TRUE(s.t_star.has_value());
      for (std::size_t j = *s.t_star; j < 20; ++j) ASSERT_EQ(s.sizes[j], k);
      ASSERT_GT(s.sizes[*s.t_star - 1], k);
    }
}

TEST(ScheduleProperty, ClosedFormMatchesRecurrenceWhenIntegral) {
  for (std::size_t m : {4u, 8u, 16u, 32u, 64u, 128u, 256u})
    for (std::size_t k : {1u, 2u, 4u, 8u}) {
      if (k > m) continue;
      for (std::size_t T : {8u, 12u, 20u}) {
        const PruneSchedule s = build_schedule(m, k, 0.5, T);
        const double ts = static_cast<double>(*s.t_star);
        if (ts > T) continue;
        EXPECT_DOUBLE_EQ(static_cast<double>(s.nfe),
                         testing::closed_form_nfe(m, k, 0.5, T, ts))
            << m << " " << k << " " << T;
      }
    }
}

TEST(ScheduleProperty, NfeMonotone) {
  for (std::size_t k : {1u, 2u, 4u})
    for (double rho : kRhos)
      for (std::size_t T : kTs) {
        std::uint64_t prev = 0;
        for (std::size_t m = k; m <= 130; ++m) {
          const std::uint64_t nfe = build_schedule(m, k, rho, T).nfe;
          ASSERT_GE(nfe, prev) << "m=" << m;
          prev = nfe;
        }
      }
  for (std::size_t m : kMs) {
    for (double rho : kRhos) {
      std::uint64_t prev_k = 0;
      for (std::size_t k = 1; k <= m; ++k) {
        const std::uint64_t nfe = build_schedule(m, k, rho, 10).nfe;
        ASSERT_GE(nfe, prev_k);
        prev_k = nfe;
      }
      std::uint64_t prev_t = 0;
      for (std::size_t T = 1; T <= 25; ++T) {
        const std::uint64_t nfe = build_schedule(m, 1, rho, T).nfe;
        ASSERT_GE(nfe, prev_t);
        prev_t = nfe;
      }
    }
    std::uint64_t prev_r = 0;
    for (int r = 1; r <= 100; ++r) {
      const std::uint64_t nfe = build_schedule(m, 1, r / 100.0, 12).nfe;
      ASSERT_GE(nfe, prev_r) << "rho=" << r / 100.0;
      prev_r = nfe;
    }
  }
}

}  // namespace
}  // namespace groupinf
