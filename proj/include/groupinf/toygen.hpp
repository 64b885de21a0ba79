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

// Analytic rectified-flow sampler toward an isotropic Gaussian mixture.
//
// Forward process: x_t = (1 - t) x_0 + t eps, eps ~ N(0, I), x_0 ~ mixture.
// The posterior mean E[x_0 | x_t] is closed form, so it doubles as the
// denoiser and as the mid-trajectory preview of the final sample.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "groupinf/error.hpp"

namespace groupinf {

struct FeatureVec {
  std::vector<double> values;

  FeatureVec() = default;
  explicit FeatureVec(std::vector<double> v) : values(std::move(v)) {}
  FeatureVec(std::initializer_list<double> v) : values(v) {}

  std::size_t dim() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  bool operator==(const FeatureVec&) const = default;
};

inline void validate_feature(const FeatureVec& x, const char* what) {
  detail::require(x.dim() >= 1, std::string(what) + ": empty feature vector");
  for (double v : x.values)
    detail::require(std::isfinite(v), std::string(what) + ": non-finite entry");
}

struct MixtureSpec {
  std::vector<double> weights;
  std::vector<FeatureVec> means;
  double sigma = 1.0;

  std::size_t components() const { return weights.size(); }
  std::size_t dim() const { return means.empty() ? 0 : means.front().dim(); }

  void validate() const {
    detail::require(!weights.empty(), "mixture: needs at least one component");
    detail::require(weights.size() == means.size(),
                    "mixture: weights and means differ in length");
    double total = 0.0;
    for (double w : weights) {
      detail::require(std::isfinite(w) && w > 0.0, "mixture: weights must be positive");
      total += w;
    }
    detail::require(std::abs(total - 1.0) <= 1e-9, "mixture: weights must sum to 1");
    for (const auto& mu : means) {
      validate_feature(mu, "mixture mean");
      detail::require(mu.dim() == dim(), "mixture: means differ in dimension");
    }
    detail::require(std::isfinite(sigma) && sigma > 0.0, "mixture: sigma must be > 0");
  }
};

// Four equally weighted unit-variance modes on the corners of a square in
// 2-D, 20 standard deviations apart along each edge. The modes sit far out
// relative to the unit latent noise, so which mode a candidate is heading
// for shows up in its preview within the first few steps.
inline MixtureSpec default_mixture() {
  MixtureSpec m;
  m.weights = {0.25, 0.25, 0.25, 0.25};
  m.means = {{10.0, 10.0}, {-10.0, 10.0}, {-10.0, -10.0}, {10.0, -10.0}};
  m.sigma = 1.0;
  return m;
}

struct FlowState {
  FeatureVec x;
  double t = 1.0;
  std::size_t candidate_id = 0;
};

struct DenoiseOutput {
  FeatureVec preview;
  FlowState next;
};

// Standard-normal latent for candidate `id`. Each candidate owns a stream
// seeded from (seed, id), so larger pools extend smaller ones.
inline FeatureVec candidate_latent(std::uint64_t seed, std::size_t id, std::size_t d) {
  const auto id64 = static_cast<std::uint64_t>(id);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id64), static_cast<std::uint32_t>(id64 >> 32),
                    0x70726576u};
  std::mt19937_64 gen(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  FeatureVec x;
  x.values.resize(d);
  for (double& v : x.values) v = normal(gen);
  return x;
}

inline std::vector<FlowState> init_candidates(std::uint64_t seed, std::size_t m,
                                              std::size_t d) {
  detail::require(m >= 1 && d >= 1, "init_candidates: m and d must be >= 1");
  std::vector<FlowState> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.push_back({candidate_latent(seed, i, d), 1.0, i});
  return out;
}

inline FeatureVec posterior_mean(const FeatureVec& x, double t, const MixtureSpec& cond) {
  detail::require(t > 0.0 && t <= 1.0, "posterior_mean: t must lie in (0, 1]");
  detail::require(x.dim() == cond.dim(), "posterior_mean: dimension mismatch");
  const std::size_t d = x.dim();
  const std::size_t C = cond.components();
  const double a = 1.0 - t;
  const double s2 = cond.sigma * cond.sigma;
  const double var = a * a * s2 + t * t;

  // Responsibilities via log-sum-exp; the Gaussian normaliser is shared.
  std::vector<double> logr(C);
  for (std::size_t c = 0; c < C; ++c) {
    double dist2 = 0.0;
    for (std::size_t q = 0; q < d; ++q) {
      const double diff = x[q] - a * cond.means[c][q];
      dist2 += diff * diff;
    }
    logr[c] = std::log(cond.weights[c]) - dist2 / (2.0 * var);
  }
  const double top = *std::max_element(logr.begin(), logr.end());
  double z = 0.0;
  for (double& l : logr) {
    l = std::exp(l - top);
    z += l;
  }

  FeatureVec out;
  out.values.assign(d, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    const double r = logr[c] / z;
    for (std::size_t q = 0; q < d; ++q)
      out[q] += r * (a * s2 * x[q] + t * t * cond.means[c][q]) / var;
  }
  return out;
}

// One Euler step of the probability-flow ODE using the posterior-mean
// velocity v = (x - preview) / t.
inline DenoiseOutput denoise_step(const FlowState& state, double t_next,
                                  const MixtureSpec& cond) {
  detail::require(t_next >= 0.0 && t_next < state.t,
                  "denoise_step: need 0 <= t_next < t");
  DenoiseOutput out;
  out.preview = posterior_mean(state.x, state.t, cond);
  out.next.t = t_next;
  out.next.candidate_id = state.candidate_id;
  if (t_next == 0.0) {
    out.next.x = out.preview;
    return out;
  }
  const double h = (t_next - state.t) / state.t;
  out.next.x.values.resize(state.x.dim());
  for (std::size_t q = 0; q < state.x.dim(); ++q)
    out.next.x[q] = state.x[q] + h * (state.x[q] - out.preview[q]);
  return out;
}

// Uniform grid from 1 down to 0 with t_total + 1 knots.
inline std::vector<double> make_timesteps(std::size_t t_total) {
  detail::require(t_total >= 1, "make_timesteps: steps must be >= 1");
  std::vector<double> ts(t_total + 1);
  for (std::size_t j = 0; j <= t_total; ++j)
    ts[j] = static_cast<double>(t_total - j) / static_cast<double>(t_total);
  return ts;
}

}  // namespace groupinf
