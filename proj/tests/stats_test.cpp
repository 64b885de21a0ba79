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

#include "groupinf/stats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"

namespace groupinf {
namespace {

using Vec = std::vector<double>;

TEST(Spearman, HandExamples) {
  EXPECT_DOUBLE_EQ(*spearman(Vec{1, 2, 3, 4}, Vec{1, 3, 2, 4}), 0.8);
  EXPECT_DOUBLE_EQ(*spearman(Vec{1, 2, 3}, Vec{10, 20, 30}), 1.0);
  EXPECT_DOUBLE_EQ(*spearman(Vec{1, 2, 3}, Vec{3, 2, 1}), -1.0);
}

TEST(Spearman, ConstantSideIsUndefined) {
  EXPECT_FALSE(spearman(Vec{2, 2, 2}, Vec{1, 2, 3}).has_value());
  EXPECT_FALSE(spearman(Vec{1, 2, 3}, Vec{0, 0, 0}).has_value());
  EXPECT_THROW(spearman(Vec{1}, Vec{1}), ValidationError);
  EXPECT_THROW(spearman(Vec{1, 2}, Vec{1}), ValidationError);
}

TEST(Spearman, TiesUseAverageRanks) {
  EXPECT_EQ(average_ranks(Vec{5, 1, 5, 3}), (Vec{3.5, 1, 3.5, 2}));
  // ranks (1.5, 1.5, 3) vs (1, 2, 3): pearson = 0.8660...
  EXPECT_NEAR(*spearman(Vec{0, 0, 1}, Vec{1, 2, 3}), std::sqrt(3.0) / 2.0, 1e-15);
}

TEST(SpearmanProperty, MatchesTextbookFormulaAndInvariances) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 40;
    Vec a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = normal(rng);
      b[i] = 0.5 * a[i] + normal(rng);
    }
    const double r = *spearman(a, b);
    ASSERT_NEAR(r, testing::spearman_distinct(a, b), 1e-12);
    ASSERT_GE(r, -1.0);
    ASSERT_LE(r, 1.0);
    ASSERT_EQ(r, *spearman(b, a));
    Vec mono(n);
    std::transform(a.begin(), a.end(), mono.begin(), [](double x) { return std::exp(3 * x) - 7; });
    ASSERT_NEAR(*spearman(mono, b), r, 1e-12);
    ASSERT_NEAR(*spearman(a, a), 1.0, 1e-12);
  }
}

TEST(Bootstrap, SeMatchesAnalyticForLargeSample) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 2.0);
  Vec v(400);
  for (double& x : v) x = normal(rng);
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double analytic = std::sqrt(ss / v.size()) / std::sqrt(static_cast<double>(v.size()));
  EXPECT_NEAR(bootstrap_se(v, 4000, 1), analytic, 0.1 * analytic);
}

TEST(Bootstrap, DeterministicAndDegenerate) {
  const Vec v{1.0, 4.0, 2.0, 8.0, 5.0};
  EXPECT_EQ(bootstrap_se(v, 1000, 7), bootstrap_se(v, 1000, 7));
  EXPECT_EQ(bootstrap_se(Vec{3.0, 3.0, 3.0}), 0.0);
  EXPECT_THROW(bootstrap_se(Vec{}), ValidationError);
}

TEST(Bootstrap, CiBracketsMeanAndPairedShift) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  Vec before(50), after(50);
  for (std::size_t i = 0; i < 50; ++i) {
    before[i] = normal(rng);
    after[i] = before[i] + 1.0 + 0.1 * normal(rng);
  }
  const auto [lo, hi] = bootstrap_ci(before);
  EXPECT_LE(lo, mean(before));
  EXPECT_GE(hi, mean(before));
  const auto [plo, phi] = paired_bootstrap_ci(before, after);
  EXPECT_GT(plo, 0.9);
  EXPECT_LT(phi, 1.1);
  const auto [zlo, zhi] = paired_bootstrap_ci(before, before);
  EXPECT_EQ(zlo, 0.0);
  EXPECT_EQ(zhi, 0.0);
}

}  // namespace
}  // namespace groupinf
