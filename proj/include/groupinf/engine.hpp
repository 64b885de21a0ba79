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

// Group inference with progressive pruning.
//
// Every step advances each live candidate once and collects its preview of
// the final sample. While the pool is larger than k, the previews are scored
// and the selection program is solved at the scheduled size; the survivors
// form the next pool. Pools are nested, and the number of generator
// evaluations equals the schedule's total exactly.
//
// The loop is generic over the generator: ToyGenerator drives the analytic
// flow sampler, CallbackGenerator drives anything that can hand back preview
// buffers for a list of live candidate ids.

#pragma once

#include <chrono>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "groupinf/error.hpp"
#include "groupinf/parallel.hpp"
#include "groupinf/qip.hpp"
#include "groupinf/schedule.hpp"
#include "groupinf/scores.hpp"
#include "groupinf/toygen.hpp"

namespace groupinf {

// advance(step, live) moves every listed candidate one step forward and
// returns one preview per id, in the order given. Steps are 1-based.
template <class G>
concept CandidateGenerator = requires(G& g, std::size_t step,
                                      std::span<const std::size_t> live) {
  { g.pool_size() } -> std::convertible_to<std::size_t>;
  { g.advance(step, live) } -> std::same_as<std::vector<FeatureVec>>;
};

struct Scorer {
  std::function<std::vector<double>(std::span<const FeatureVec>)> unary;
  std::function<Matrix(std::span<const FeatureVec>)> binary;
};

inline Scorer make_scorer(const MixtureSpec& cond, const ScoreSpec& spec,
                          std::size_t workers = 1) {
  return {[cond, spec](std::span<const FeatureVec> xs) { return unary_scores(xs, cond, spec); },
          [cond, spec, workers](std::span<const FeatureVec> xs) {
            return binary_scores(xs, cond, spec, workers);
          }};
}

struct PruneParams {
  std::size_t m = 64;
  std::size_t k = 4;
  double rho = 0.5;
  std::size_t t_total = 20;
  double lambda = 1.0;
  Strategy strategy = Strategy::kAuto;
  SolverLimits limits;
  bool normalize_scores = false;  // z-score before solving; report stays raw
  bool score_final = true;        // evaluate the objective on final samples
};

struct StepRecord {
  std::size_t step = 0;       // 1-based
  std::size_t pool_size = 0;  // candidates evaluated this step
  std::vector<std::size_t> selected;  // live ids after the step
  bool solved = false;
  std::optional<Strategy> strategy;
  double wall_ms = 0.0;
};

struct RunReport {
  std::vector<std::size_t> final_indices;
  std::vector<FeatureVec> final_samples;
  double objective = 0.0;
  double mean_unary = 0.0;
  double mean_binary = 0.0;  // mean b_ij over selected pairs
  std::vector<StepRecord> steps;
  std::uint64_t nfe_counted = 0;
  std::uint64_t nfe_predicted = 0;
  double wall_ms = 0.0;
};

// Objective and per-set means of the selected group, evaluated on `samples`.
struct GroupScore {
  double objective = 0.0;
  double mean_unary = 0.0;
  double mean_binary = 0.0;
};

inline GroupScore score_group(std::span<const FeatureVec> samples, const Scorer& scorer,
                              double lambda) {
  const std::size_t n = samples.size();
  ScoreSet ss = assemble(scorer.unary(samples), scorer.binary(samples));
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  GroupScore g;
  g.objective = objective_value({ss, n, lambda}, all);
  g.mean_unary = std::accumulate(ss.unary().begin(), ss.unary().end(), 0.0) / n;
  if (n >= 2) {
    double pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pairs += ss.b(i, j);
    g.mean_binary = pairs / (static_cast<double>(n) * (n - 1) / 2.0);
  }
  return g;
}

template <CandidateGenerator G>
RunReport run_group_inference(G& gen, const PruneParams& params, const Scorer& scorer) {
  using Clock = std::chrono::steady_clock;
  const auto run_start = Clock::now();
  detail::require(std::isfinite(params.lambda) && params.lambda >= 0.0,
                  "group inference: lambda must be finite and >= 0");
  const PruneSchedule sched =
      build_schedule(params.m, params.k, params.rho, params.t_total);
  detail::require(gen.pool_size() >= params.m,
                  "group inference: generator holds fewer than m candidates");

  RunReport report;
  report.nfe_predicted = sched.nfe;
  std::vector<std::size_t> alive(params.m);
  std::iota(alive.begin(), alive.end(), std::size_t{0});
  std::vector<FeatureVec> previews;

  for (std::size_t step = 1; step <= params.t_total; ++step) {
    const auto step_start = Clock::now();
    if (alive.size() != sched.sizes[step - 1]) {
      throw std::logic_error("group inference: pool size diverged from schedule at step " +
                             std::to_string(step));
    }
    previews = gen.advance(step, std::span<const std::size_t>(alive));
    if (previews.size() != alive.size()) {
      throw ValidationError("step " + std::to_string(step) + ": generator returned " +
                            std::to_string(previews.size()) + " previews for " +
                            std::to_string(alive.size()) + " candidates");
    }
    report.nfe_counted += alive.size();

    StepRecord rec;
    rec.step = step;
    rec.pool_size = alive.size();
    if (alive.size() > params.k) {
      const bool last = step == params.t_total;
      const std::size_t target = last ? params.k : sched.sizes[step];
      if (target < alive.size()) {
        ScoreSet ss = assemble(scorer.unary(previews), scorer.binary(previews));
        if (params.normalize_scores) ss = zscore_normalize(ss);
        Selection sel;
        try {
          sel = solve({std::move(ss), target, params.lambda}, params.strategy, params.limits);
        } catch (const BudgetExceededError& e) {
          throw BudgetExceededError("step " + std::to_string(step) + ": " + e.what());
        }
        std::vector<std::size_t> next_alive;
        std::vector<FeatureVec> next_previews;
        next_alive.reserve(target);
        next_previews.reserve(target);
        for (std::size_t local : sel.indices) {
          next_alive.push_back(alive[local]);
          next_previews.push_back(std::move(previews[local]));
        }
        alive = std::move(next_alive);
        previews = std::move(next_previews);
        rec.solved = true;
        rec.strategy = sel.strategy;
      }
    }
    rec.selected = alive;
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - step_start).count();
    report.steps.push_back(std::move(rec));
  }

  report.final_indices = alive;
  report.final_samples = std::move(previews);
  if (params.score_final) {
    const GroupScore g = score_group(report.final_samples, scorer, params.lambda);
    report.objective = g.objective;
    report.mean_unary = g.mean_unary;
    report.mean_binary = g.mean_binary;
  }
  report.wall_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - run_start).count();
  return report;
}

// Drives the analytic flow sampler. Candidates advance concurrently when
// workers > 1; each writes only its own slot.
class ToyGenerator {
 public:
  ToyGenerator(std::uint64_t seed, std::size_t m, MixtureSpec cond, std::size_t t_total,
               std::size_t workers = 1)
      : cond_(std::move(cond)),
        timesteps_(make_timesteps(t_total)),
        states_(init_candidates(seed, m, cond_.dim())),
        workers_(workers) {}

  std::size_t pool_size() const { return states_.size(); }
  const FlowState& state(std::size_t id) const { return states_.at(id); }

  std::vector<FeatureVec> advance(std::size_t step, std::span<const std::size_t> live) {
    detail::require(step >= 1 && step < timesteps_.size(), "toy generator: step out of range");
    const double t = timesteps_[step - 1];
    const double t_next = timesteps_[step];
    for (std::size_t id : live) {
      detail::require(id < states_.size(), "toy generator: unknown candidate id");
      detail::require(states_[id].t == t, "toy generator: candidate " + std::to_string(id) +
                                              " is not at the time of step " +
                                              std::to_string(step));
    }
    std::vector<FeatureVec> previews(live.size());
    parallel_for(live.size(), workers_, [&](std::size_t a) {
      DenoiseOutput out = denoise_step(states_[live[a]], t_next, cond_);
      previews[a] = std::move(out.preview);
      states_[live[a]] = std::move(out.next);
    });
    return previews;
  }

 private:
  MixtureSpec cond_;
  std::vector<double> timesteps_;
  std::vector<FlowState> states_;
  std::size_t workers_;
};

// Previews arrive as a flat row-major buffer of live.size() x dim doubles.
using StepCallback =
    std::function<std::vector<double>(std::size_t step, std::span<const std::size_t> live)>;
// Flat callbacks see previews as (buffer, rows, dim). Binary returns rows x rows.
using FlatUnaryCallback =
    std::function<std::vector<double>(std::span<const double>, std::size_t, std::size_t)>;
using FlatBinaryCallback =
    std::function<std::vector<double>(std::span<const double>, std::size_t, std::size_t)>;

class CallbackGenerator {
 public:
  CallbackGenerator(std::size_t m, std::size_t dim, StepCallback step)
      : m_(m), dim_(dim), step_(std::move(step)) {
    detail::require(dim_ >= 1, "callback generator: dimension must be >= 1");
    detail::require(static_cast<bool>(step_), "callback generator: no step callback");
  }

  std::size_t pool_size() const { return m_; }

  std::vector<FeatureVec> advance(std::size_t step, std::span<const std::size_t> live) {
    std::vector<double> flat;
    try {
      flat = step_(step, live);
    } catch (const std::exception& e) {
      throw std::runtime_error("step " + std::to_string(step) + ": step callback failed: " +
                               e.what());
    }
    if (flat.size() != live.size() * dim_) {
      throw ValidationError("step " + std::to_string(step) + ": step callback returned " +
                            std::to_string(flat.size()) + " values, expected " +
                            std::to_string(live.size() * dim_));
    }
    std::vector<FeatureVec> out(live.size());
    for (std::size_t a = 0; a < live.size(); ++a)
      out[a].values.assign(flat.begin() + a * dim_, flat.begin() + (a + 1) * dim_);
    return out;
  }

 private:
  std::size_t m_;
  std::size_t dim_;
  StepCallback step_;
};

inline std::vector<double> flatten(std::span<const FeatureVec> xs) {
  std::vector<double> flat;
  for (const auto& x : xs) flat.insert(flat.end(), x.values.begin(), x.values.end());
  return flat;
}

inline Scorer make_flat_scorer(FlatUnaryCallback unary, FlatBinaryCallback binary) {
  detail::require(unary && binary, "flat scorer: both callbacks are required");
  Scorer s;
  s.unary = [unary](std::span<const FeatureVec> xs) {
    const std::size_t dim = xs.empty() ? 0 : xs.front().dim();
    std::vector<double> u = unary(flatten(xs), xs.size(), dim);
    detail::require(u.size() == xs.size(), "unary callback returned the wrong count");
    return u;
  };
  s.binary = [binary](std::span<const FeatureVec> xs) {
    const std::size_t n = xs.size();
    const std::size_t dim = xs.empty() ? 0 : xs.front().dim();
    std::vector<double> b = binary(flatten(xs), n, dim);
    detail::require(b.size() == n * n, "binary callback returned the wrong count");
    Matrix out = Matrix::square(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) = b[i * n + j];
    return out;
  };
  return s;
}

// Callback-driven entry point for external pipelines.
inline RunReport group_inference_with_callbacks(std::size_t dim, StepCallback step,
                                                FlatUnaryCallback unary,
                                                FlatBinaryCallback binary,
                                                const PruneParams& params) {
  CallbackGenerator gen(params.m, dim, std::move(step));
  return run_group_inference(gen, params, make_flat_scorer(std::move(unary), std::move(binary)));
}

struct RunConfig {
  std::size_t m = 64;
  std::size_t k = 4;
  double rho = 0.5;
  std::size_t t_total = 20;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  std::size_t dimension = 2;
  MixtureSpec condition = default_mixture();
  ScoreSpec score_spec;
  Strategy strategy = Strategy::kAuto;
  SolverLimits limits;
  bool normalize_scores = false;
  std::size_t workers = 1;

  void validate() const {
    validate_schedule_args(m, k, rho, t_total);
    detail::require(std::isfinite(lambda) && lambda >= 0.0, "config: lambda must be >= 0");
    condition.validate();
    detail::require(dimension == condition.dim(),
                    "config: dimension " + std::to_string(dimension) +
                        " does not match mixture dimension " +
                        std::to_string(condition.dim()));
  }

  PruneParams prune_params() const {
    PruneParams p;
    p.m = m;
    p.k = k;
    p.rho = rho;
    p.t_total = t_total;
    p.lambda = lambda;
    p.strategy = strategy;
    p.limits = limits;
    p.normalize_scores = normalize_scores;
    return p;
  }
};

inline RunReport group_inference(const RunConfig& cfg) {
  cfg.validate();
  ToyGenerator gen(cfg.seed, cfg.m, cfg.condition, cfg.t_total, cfg.workers);
  return run_group_inference(gen, cfg.prune_params(),
                             make_scorer(cfg.condition, cfg.score_spec, cfg.workers));
}

// The first k candidates of the seeded pool, denoised without selection.
inline RunReport iid_baseline(const RunConfig& cfg) {
  cfg.validate();
  RunConfig base = cfg;
  base.m = cfg.k;
  return group_inference(base);
}

// All m candidates denoised to the end, then a single solve.
inline RunReport final_select_baseline(const RunConfig& cfg) {
  cfg.validate();
  RunConfig base = cfg;
  base.rho = 1.0;
  return group_inference(base);
}

}  // namespace groupinf
