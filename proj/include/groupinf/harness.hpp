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

// Experiment harness: parameter sweeps, preview/final score correlation, and
// tidy CSV output (one row per observation).

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "groupinf/engine.hpp"
#include "groupinf/error.hpp"
#include "groupinf/parallel.hpp"
#include "groupinf/stats.hpp"

namespace groupinf {

enum class SweepAxis { kLambda, kM, kRho, kTTotal };

inline std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::kLambda:
      return "lambda";
    case SweepAxis::kM:
      return "m";
    case SweepAxis::kRho:
      return "rho";
    case SweepAxis::kTTotal:
      return "t_total";
  }
  return "lambda";
}

inline SweepAxis parse_axis(std::string_view s) {
  for (auto a : {SweepAxis::kLambda, SweepAxis::kM, SweepAxis::kRho, SweepAxis::kTTotal})
    if (to_string(a) == s) return a;
  throw ValidationError("unknown sweep axis '" + std::string(s) +
                        "' (expected lambda, m, rho or t_total)");
}

struct SweepSpec {
  RunConfig base;
  SweepAxis axis = SweepAxis::kM;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  std::size_t repeats = 1;  // wall time is averaged over this many runs
  std::size_t bootstrap_resamples = 1000;
};

struct SweepRow {
  std::string axis;
  double value = 0.0;
  std::uint64_t seed = 0;
  double objective = 0.0;
  double mean_unary = 0.0;
  double mean_binary = 0.0;
  std::uint64_t nfe = 0;
  double wall_ms = 0.0;
  double boot_se_objective = 0.0;

  bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool operator==(const SweepResult&) const = default;
};

inline std::size_t as_count(double v, const char* what) {
  detail::require(v >= 0.0 && v == std::floor(v) && v < 1e15,
                  std::string("sweep: ") + what + " values must be non-negative integers");
  return static_cast<std::size_t>(v);
}

inline RunConfig apply_axis(RunConfig cfg, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::kLambda:
      cfg.lambda = value;
      break;
    case SweepAxis::kM:
      cfg.m = as_count(value, "m");
      break;
    case SweepAxis::kRho:
      cfg.rho = value;
      break;
    case SweepAxis::kTTotal:
      cfg.t_total = as_count(value, "t_total");
      break;
  }
  return cfg;
}

inline void validate_sweep(const SweepSpec& spec) {
  detail::require(!spec.values.empty(), "sweep: no axis values");
  detail::require(!spec.seeds.empty(), "sweep: no seeds");
  detail::require(spec.repeats >= 1, "sweep: repeats must be >= 1");
  detail::require(spec.bootstrap_resamples >= 2, "sweep: need >= 2 bootstrap resamples");
  for (double v : spec.values) apply_axis(spec.base, spec.axis, v).validate();
}

// Rows are ordered value-major, seed-minor whatever order cells finish in.
inline SweepResult run_sweep(const SweepSpec& spec, std::size_t workers = 1) {
  validate_sweep(spec);
  const std::size_t nv = spec.values.size();
  const std::size_t ns = spec.seeds.size();
  SweepResult result;
  result.rows.resize(nv * ns);
  parallel_for(nv * ns, workers, [&](std::size_t cell) {
    const std::size_t vi = cell / ns;
    const std::size_t si = cell % ns;
    RunConfig cfg = apply_axis(spec.base, spec.axis, spec.values[vi]);
    cfg.seed = spec.seeds[si];
    if (workers > 1) cfg.workers = 1;
    RunReport rep;
    double wall = 0.0;
    try {
      for (std::size_t r = 0; r < spec.repeats; ++r) {
        rep = group_inference(cfg);
        wall += rep.wall_ms;
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("sweep cell (" + std::string(to_string(spec.axis)) + "=" +
                               std::to_string(spec.values[vi]) + ", seed=" +
                               std::to_string(spec.seeds[si]) + "): " + e.what());
    }
    SweepRow& row = result.rows[cell];
    row.axis = std::string(to_string(spec.axis));
    row.value = spec.values[vi];
    row.seed = spec.seeds[si];
    row.objective = rep.objective;
    row.mean_unary = rep.mean_unary;
    row.mean_binary = rep.mean_binary;
    row.nfe = rep.nfe_counted;
    row.wall_ms = wall / static_cast<double>(spec.repeats);
  });
  for (std::size_t vi = 0; vi < nv; ++vi) {
    std::vector<double> obj(ns);
    for (std::size_t si = 0; si < ns; ++si) obj[si] = result.rows[vi * ns + si].objective;
    const double se = bootstrap_se(obj, spec.bootstrap_resamples, 0x5eed + vi);
    for (std::size_t si = 0; si < ns; ++si) result.rows[vi * ns + si].boot_se_objective = se;
  }
  return result;
}

struct CorrelationRow {
  std::size_t step = 0;
  double t = 0.0;  // time at which the preview was taken
  std::optional<double> unary;
  std::optional<double> binary;
};

// Runs every candidate to the end without pruning and, per step, correlates
// scores of previews with scores of the final samples. Binary scores are
// compared over a fixed random sample of candidate pairs.
inline std::vector<CorrelationRow> correlate_run(const RunConfig& cfg,
                                                 std::size_t sample_count = 1024) {
  cfg.validate();
  detail::require(cfg.rho == 1.0, "correlate: requires rho = 1 (no pruning)");
  detail::require(cfg.m >= 2, "correlate: needs at least two candidates");
  detail::require(sample_count >= 2, "correlate: needs at least two pairs");

  ToyGenerator gen(cfg.seed, cfg.m, cfg.condition, cfg.t_total, cfg.workers);
  std::vector<std::size_t> all(cfg.m);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const std::vector<double> ts = make_timesteps(cfg.t_total);

  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_int_distribution<std::size_t> pick(0, cfg.m - 1);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(sample_count);
  while (pairs.size() < sample_count) {
    const std::size_t a = pick(rng), b = pick(rng);
    if (a != b) pairs.emplace_back(std::min(a, b), std::max(a, b));
  }

  std::vector<std::vector<double>> unary(cfg.t_total), binary(cfg.t_total);
  for (std::size_t step = 1; step <= cfg.t_total; ++step) {
    const std::vector<FeatureVec> previews = gen.advance(step, all);
    unary[step - 1] = unary_scores(previews, cfg.condition, cfg.score_spec);
    const Matrix b = binary_scores(previews, cfg.condition, cfg.score_spec, cfg.workers);
    auto& col = binary[step - 1];
    col.reserve(pairs.size());
    for (auto [i, j] : pairs) col.push_back(b(i, j));
  }

  std::vector<CorrelationRow> rows;
  for (std::size_t step = 1; step <= cfg.t_total; ++step) {
    CorrelationRow r;
    r.step = step;
    r.t = ts[step - 1];
    r.unary = spearman(unary[step - 1], unary.back());
    r.binary = spearman(binary[step - 1], binary.back());
    rows.push_back(r);
  }
  return rows;
}

// ---- CSV ----------------------------------------------------------------

// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ValidationError("csv: bad number '" + std::string(s) + "'");
  return v;
}

inline std::uint64_t parse_uint(std::string_view s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ValidationError("csv: bad integer '" + std::string(s) + "'");
  return v;
}

inline constexpr std::string_view kSweepHeader =
    "axis,value,seed,objective,mean_unary,mean_binary,nfe,wall_ms,boot_se_objective";

inline std::string emit_sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << kSweepHeader << '\n';
  for (const auto& row : r.rows) {
    os << row.axis << ',' << format_double(row.value) << ',' << row.seed << ','
       << format_double(row.objective) << ',' << format_double(row.mean_unary) << ','
       << format_double(row.mean_binary) << ',' << row.nfe << ','
       << format_double(row.wall_ms) << ',' << format_double(row.boot_se_objective) << '\n';
  }
  return os.str();
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline SweepResult parse_sweep_csv(std::string_view text) {
  SweepResult r;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != kSweepHeader) throw ValidationError("csv: unexpected sweep header");
      header = false;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw ValidationError("csv: expected 9 fields per row");
    SweepRow row;
    row.axis = std::string(f[0]);
    row.value = parse_double(f[1]);
    row.seed = parse_uint(f[2]);
    row.objective = parse_double(f[3]);
    row.mean_unary = parse_double(f[4]);
    row.mean_binary = parse_double(f[5]);
    row.nfe = parse_uint(f[6]);
    row.wall_ms = parse_double(f[7]);
    row.boot_se_objective = parse_double(f[8]);
    r.rows.push_back(std::move(row));
  }
  if (header) throw ValidationError("csv: missing header");
  return r;
}

inline constexpr std::string_view kUndefined = "NA";

inline std::string emit_correlation_csv(const std::vector<CorrelationRow>& rows) {
  std::ostringstream os;
  os << "step,t,unary_spearman,binary_spearman\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string(kUndefined);
  };
  for (const auto& r : rows)
    os << r.step << ',' << format_double(r.t) << ',' << opt(r.unary) << ',' << opt(r.binary)
       << '\n';
  return os.str();
}

inline std::string emit_steps_csv(const RunReport& rep, bool timings = true) {
  std::ostringstream os;
  os << "step,pool_size,solved,strategy,selected" << (timings ? ",wall_ms" : "") << '\n';
  for (const auto& s : rep.steps) {
    os << s.step << ',' << s.pool_size << ',' << (s.solved ? 1 : 0) << ','
       << (s.strategy ? std::string(to_string(*s.strategy)) : std::string()) << ',';
    for (std::size_t a = 0; a < s.selected.size(); ++a)
      os << (a ? " " : "") << s.selected[a];
    if (timings) os << ',' << format_double(s.wall_ms);
    os << '\n';
  }
  return os.str();
}

}  // namespace groupinf
