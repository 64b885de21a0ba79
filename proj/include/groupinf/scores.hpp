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

// Quality (unary) and diversity (binary) scores over feature vectors.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "groupinf/error.hpp"
#include "groupinf/parallel.hpp"
#include "groupinf/qip.hpp"
#include "groupinf/toygen.hpp"

namespace groupinf {

enum class UnaryKind { kMixtureLogLik, kNegDistToMode, kExternal };
enum class BinaryKind { kEuclidean, kOneMinusCosine, kModeLabelMismatch, kExternal };

using UnaryCallback = std::function<std::vector<double>(std::span<const FeatureVec>)>;
using BinaryCallback = std::function<Matrix(std::span<const FeatureVec>)>;

struct ScoreSpec {
  UnaryKind unary = UnaryKind::kMixtureLogLik;
  BinaryKind binary = BinaryKind::kEuclidean;
  std::map<std::string, double> params;
  // Required by the kExternal kinds.
  UnaryCallback unary_callback;
  BinaryCallback binary_callback;
};

inline std::string_view to_string(UnaryKind k) {
  switch (k) {
    case UnaryKind::kMixtureLogLik:
      return "mixture-loglik";
    case UnaryKind::kNegDistToMode:
      return "neg-dist-to-nearest-mode";
    case UnaryKind::kExternal:
      return "external";
  }
  return "external";
}

inline std::string_view to_string(BinaryKind k) {
  switch (k) {
    case BinaryKind::kEuclidean:
      return "euclidean";
    case BinaryKind::kOneMinusCosine:
      return "one-minus-cosine";
    case BinaryKind::kModeLabelMismatch:
      return "mode-label-mismatch";
    case BinaryKind::kExternal:
      return "external";
  }
  return "external";
}

inline UnaryKind parse_unary_kind(std::string_view s) {
  for (auto k : {UnaryKind::kMixtureLogLik, UnaryKind::kNegDistToMode, UnaryKind::kExternal})
    if (to_string(k) == s) return k;
  throw ValidationError("unknown unary score kind '" + std::string(s) + "'");
}

inline BinaryKind parse_binary_kind(std::string_view s) {
  for (auto k : {BinaryKind::kEuclidean, BinaryKind::kOneMinusCosine,
                 BinaryKind::kModeLabelMismatch, BinaryKind::kExternal})
    if (to_string(k) == s) return k;
  throw ValidationError("unknown binary score kind '" + std::string(s) + "'");
}

// log sum_c w_c N(x; mu_c, sigma^2 I)
inline double mixture_loglik(const FeatureVec& x, const MixtureSpec& cond) {
  detail::require(x.dim() == cond.dim(), "mixture_loglik: dimension mismatch");
  const double s2 = cond.sigma * cond.sigma;
  const double d = static_cast<double>(x.dim());
  const double log_norm = -0.5 * d * std::log(2.0 * std::numbers::pi * s2);
  std::vector<double> terms(cond.components());
  for (std::size_t c = 0; c < terms.size(); ++c) {
    double dist2 = 0.0;
    for (std::size_t q = 0; q < x.dim(); ++q) {
      const double diff = x[q] - cond.means[c][q];
      dist2 += diff * diff;
    }
    terms[c] = std::log(cond.weights[c]) + log_norm - dist2 / (2.0 * s2);
  }
  const double top = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double v : terms) sum += std::exp(v - top);
  return top + std::log(sum);
}

inline double euclidean_distance(const FeatureVec& a, const FeatureVec& b) {
  double s = 0.0;
  for (std::size_t q = 0; q < a.dim(); ++q) s += (a[q] - b[q]) * (a[q] - b[q]);
  return std::sqrt(s);
}

// Index of the closest mixture mean; lowest index on ties.
inline std::size_t nearest_mode(const FeatureVec& x, const MixtureSpec& cond) {
  std::size_t best = 0;
  double best_d = euclidean_distance(x, cond.means[0]);
  for (std::size_t c = 1; c < cond.components(); ++c) {
    const double dc = euclidean_distance(x, cond.means[c]);
    if (dc < best_d) {
      best_d = dc;
      best = c;
    }
  }
  return best;
}

// 1 - cos(a, b), clamped to [0, 2]. A zero vector on either side gives 1.
inline double one_minus_cosine(const FeatureVec& a, const FeatureVec& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t q = 0; q < a.dim(); ++q) {
    dot += a[q] * b[q];
    na += a[q] * a[q];
    nb += b[q] * b[q];
  }
  if (na == 0.0 || nb == 0.0) return 1.0;
  const double cosine = std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
  return 1.0 - cosine;
}

inline std::vector<double> unary_scores(std::span<const FeatureVec> previews,
                                        const MixtureSpec& cond, const ScoreSpec& spec) {
  detail::require(!previews.empty(), "unary_scores: empty preview list");
  std::vector<double> out;
  switch (spec.unary) {
    case UnaryKind::kMixtureLogLik:
      out.reserve(previews.size());
      for (const auto& x : previews) out.push_back(mixture_loglik(x, cond));
      break;
    case UnaryKind::kNegDistToMode:
      out.reserve(previews.size());
      for (const auto& x : previews)
        out.push_back(-euclidean_distance(x, cond.means[nearest_mode(x, cond)]));
      break;
    case UnaryKind::kExternal:
      if (!spec.unary_callback)
        throw ConfigError("unary score kind 'external' has no registered callback");
      out = spec.unary_callback(previews);
      detail::require(out.size() == previews.size(),
                      "external unary callback returned " + std::to_string(out.size()) +
                          " scores for " + std::to_string(previews.size()) + " previews");
      break;
  }
  return out;
}

inline Matrix binary_scores(std::span<const FeatureVec> previews, const MixtureSpec& cond,
                            const ScoreSpec& spec, std::size_t workers = 1) {
  detail::require(!previews.empty(), "binary_scores: empty preview list");
  const std::size_t n = previews.size();
  if (spec.binary == BinaryKind::kExternal) {
    if (!spec.binary_callback)
      throw ConfigError("binary score kind 'external' has no registered callback");
    Matrix out = spec.binary_callback(previews);
    detail::require(out.rows() == n && out.cols() == n,
                    "external binary callback returned a matrix of the wrong shape");
    return out;
  }
  std::vector<std::size_t> labels;
  if (spec.binary == BinaryKind::kModeLabelMismatch) {
    labels.reserve(n);
    for (const auto& x : previews) labels.push_back(nearest_mode(x, cond));
  }
  Matrix out = Matrix::square(n);
  // Upper triangle row by row; each row writes only its own entries.
  parallel_for(n, workers, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = 0.0;
      switch (spec.binary) {
        case BinaryKind::kEuclidean:
          v = euclidean_distance(previews[i], previews[j]);
          break;
        case BinaryKind::kOneMinusCosine:
          v = one_minus_cosine(previews[i], previews[j]);
          break;
        case BinaryKind::kModeLabelMismatch:
          v = labels[i] != labels[j] ? 1.0 : 0.0;
          break;
        case BinaryKind::kExternal:
          break;
      }
      out(i, j) = v;
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out(j, i) = out(i, j);
  return out;
}

inline ScoreSet assemble(std::vector<double> unary, Matrix binary) {
  return ScoreSet::create(std::move(unary), std::move(binary));
}

}  // namespace groupinf
