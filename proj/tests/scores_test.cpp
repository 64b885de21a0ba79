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

#include "groupinf/scores.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"

namespace groupinf {
namespace {

MixtureSpec single(FeatureVec mu, double sigma) {
  MixtureSpec m;
  m.weights = {1.0};
  m.means = {std::move(mu)};
  m.sigma = sigma;
  return m;
}

MixtureSpec three_modes() {
  MixtureSpec m;
  m.weights = {0.2, 0.5, 0.3};
  m.means = {{0.0, 1.0, -1.0}, {2.0, -0.5, 0.5}, {-1.5, -1.0, 2.0}};
  m.sigma = 0.8;
  return m;
}

TEST(Unary, LogLikAtTheMean) {
  const MixtureSpec m = single({0.3, -1.2}, 1.0);
  EXPECT_NEAR(mixture_loglik({0.3, -1.2}, m), -std::log(2.0 * std::numbers::pi), 1e-12);
  EXPECT_NEAR(mixture_loglik({0.3, -1.2}, m), -1.8378770664093453, 1e-12);
}

TEST(Unary, LogLikMatchesDirectSum) {
  const MixtureSpec m = three_modes();
  std::vector<std::vector<double>> means;
  for (const auto& mu : m.means) means.push_back(mu.values);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal(0.0, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    FeatureVec x{normal(rng), normal(rng), normal(rng)};
    const double direct = std::log(testing::mixture_density(x.values, m.weights, means, m.sigma));
    ASSERT_NEAR(mixture_loglik(x, m), direct, 1e-9);
  }
  // One point by hand: x = mu_1, only component 1 matters to ~1e-9 here.
  const double hand = std::log(0.5) - 1.5 * std::log(2.0 * std::numbers::pi * 0.64);
  EXPECT_NEAR(mixture_loglik(m.means[1], m), hand, 1e-3);
}

TEST(Unary, NegDistIsZeroAtModes) {
  const MixtureSpec m = default_mixture();
  ScoreSpec spec;
  spec.unary = UnaryKind::kNegDistToMode;
  const std::vector<double> u = unary_scores(m.means, m, spec);
  for (double v : u) EXPECT_EQ(v, 0.0);
  const std::vector<FeatureVec> off{{0.0, 0.0}};
  EXPECT_LT(unary_scores(off, m, spec)[0], 0.0);
}

TEST(Unary, LogLikPeaksAtModesWhenSeparated) {
  const MixtureSpec m = default_mixture();  // modes 20 sigma apart
  for (std::size_t a = 0; a < m.components(); ++a)
    for (std::size_t b = a + 1; b < m.components(); ++b) {
      FeatureVec mid{0.5 * (m.means[a][0] + m.means[b][0]), 0.5 * (m.means[a][1] + m.means[b][1])};
      EXPECT_GT(mixture_loglik(m.means[a], m), mixture_loglik(mid, m));
    }
}

TEST(Unary, ExternalRequiresCallback) {
  ScoreSpec spec;
  spec.unary = UnaryKind::kExternal;
  const std::vector<FeatureVec> xs{{1.0, 2.0}};
  EXPECT_THROW(unary_scores(xs, default_mixture(), spec), ConfigError);
  spec.unary_callback = [](std::span<const FeatureVec> v) {
    std::vector<double> out;
    for (const auto& x : v) out.push_back(x[0] + x[1]);
    return out;
  };
  EXPECT_EQ(unary_scores(xs, default_mixture(), spec), std::vector<double>{3.0});
  spec.unary_callback = [](std::span<const FeatureVec>) { return std::vector<double>{}; };
  EXPECT_THROW(unary_scores(xs, default_mixture(), spec), ValidationError);
}

TEST(Binary, IdenticalVectorsScoreZero) {
  const FeatureVec x{0.3, -2.7, 1.1};
  const std::vector<FeatureVec> xs{x, x};
  const MixtureSpec m = three_modes();
  for (BinaryKind kind : {BinaryKind::kEuclidean, BinaryKind::kOneMinusCosine}) {
    ScoreSpec spec;
    spec.binary = kind;
    EXPECT_EQ(binary_scores(xs, m, spec)(0, 1), 0.0) << to_string(kind);
  }
}

TEST(Binary, OppositeVectorsCosineTwo) {
  EXPECT_EQ(one_minus_cosine({1.5, -2.0}, {-1.5, 2.0}), 2.0);
  EXPECT_EQ(one_minus_cosine({0.0, 0.0}, {1.0, 1.0}), 1.0);
  EXPECT_NEAR(one_minus_cosine({1.0, 0.0}, {0.0, 3.0}), 1.0, 1e-15);
}

TEST(Binary, ModeLabelMismatch) {
  const MixtureSpec m = default_mixture();
  ScoreSpec spec;
  spec.binary = BinaryKind::kModeLabelMismatch;
  const std::vector<FeatureVec> xs{{9.5, 10.4}, {10.2, 9.1}, {-10.0, -9.3}};
  const Matrix b = binary_scores(xs, m, spec);
  EXPECT_EQ(b(0, 1), 0.0);
  EXPECT_EQ(b(0, 2), 1.0);
  EXPECT_EQ(b(1, 2), 1.0);
}

TEST(Binary, ExternalRequiresCallback) {
  ScoreSpec spec;
  spec.binary = BinaryKind::kExternal;
  const std::vector<FeatureVec> xs{{1.0, 2.0}, {0.0, 1.0}};
  EXPECT_THROW(binary_scores(xs, default_mixture(), spec), ConfigError);
  spec.binary_callback = [](std::span<const FeatureVec> v) { return Matrix(v.size(), 1); };
  EXPECT_THROW(binary_scores(xs, default_mixture(), spec), ValidationError);
}

TEST(Binary, AllKindsSymmetricZeroDiagonalNonnegative) {
  const MixtureSpec m = default_mixture();
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 1.2);
  std::vector<FeatureVec> xs;
  for (int i = 0; i < 40; ++i) xs.push_back({normal(rng), normal(rng)});
  xs.push_back({0.0, 0.0});
  for (BinaryKind kind :
       {BinaryKind::kEuclidean, BinaryKind::kOneMinusCosine, BinaryKind::kModeLabelMismatch}) {
    ScoreSpec spec;
    spec.binary = kind;
    const Matrix b = binary_scores(xs, m, spec, 3);
    EXPECT_EQ(b, binary_scores(xs, m, spec, 1));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      EXPECT_EQ(b(i, i), 0.0);
      for (std::size_t j = 0; j < xs.size(); ++j) {
        EXPECT_EQ(b(i, j), b(j, i));
        EXPECT_GE(b(i, j), 0.0);
        if (kind == BinaryKind::kOneMinusCosine) {
          EXPECT_LE(b(i, j), 2.0);
        }
      }
    }
    EXPECT_NO_THROW(assemble(std::vector<double>(xs.size(), 0.0), b));
  }
}

TEST(Assemble, ValidatesInputs) {
  Matrix b = Matrix::square(3);
  b(0, 1) = b(1, 0) = 0.5;
  EXPECT_EQ(assemble({1, 2, 3}, b).size(), 3u);
  Matrix asym = b;
  asym(2, 0) = 1.0;
  EXPECT_THROW(assemble({1, 2, 3}, asym), ValidationError);
  EXPECT_THROW(assemble({1, std::nan(""), 3}, b), ValidationError);
}

TEST(Kinds, NamesRoundTrip) {
  for (auto k : {UnaryKind::kMixtureLogLik, UnaryKind::kNegDistToMode, UnaryKind::kExternal})
    EXPECT_EQ(parse_unary_kind(to_string(k)), k);
  for (auto k : {BinaryKind::kEuclidean, BinaryKind::kOneMinusCosine,
                 BinaryKind::kModeLabelMismatch, BinaryKind::kExternal})
    EXPECT_EQ(parse_binary_kind(to_string(k)), k);
  EXPECT_THROW(parse_unary_kind("clip"), ValidationError);
  EXPECT_THROW(parse_binary_kind("dino"), ValidationError);
}

}  // namespace
}  // namespace groupinf
