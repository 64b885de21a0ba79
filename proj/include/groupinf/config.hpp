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

// JSON documents read and written by the CLI: run configs, sweep specs,
// score files, selections and run reports. Unknown keys are errors.

#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "groupinf/engine.hpp"
#include "groupinf/error.hpp"
#include "groupinf/harness.hpp"
#include "groupinf/qip.hpp"
#include "json.hpp"

namespace groupinf {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                       const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

inline void check_schema(const Json& j, const std::string& where, bool required) {
  if (!j.contains("schema_version")) {
    if (required) throw ConfigError(where + ": missing schema_version");
    return;
  }
  if (!j.at("schema_version").is_number_integer() ||
      j.at("schema_version").get<int>() != kSchemaVersion) {
    throw ConfigError(where + ": unsupported schema_version (expected " +
                      std::to_string(kSchemaVersion) + ")");
  }
}

template <class T>
T get_as(const Json& j, const char* key, const std::string& where) {
  require(j.contains(key), where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ValidationError(where + ": bad value for '" + key + "': " + e.what());
  }
}

inline void require_key(const Json& j, const char* key, const std::string& where) {
  require(j.contains(key), where + ": missing '" + key + "'");
}

inline std::size_t get_count(const Json& j, const char* key, const std::string& where) {
  require_key(j, key, where);
  const Json& v = j.at(key);
  require(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0),
          where + ": '" + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

inline double get_number(const Json& j, const char* key, const std::string& where) {
  require_key(j, key, where);
  require(j.at(key).is_number(), where + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace detail

inline Json parse_json_text(std::string_view text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(where + ": malformed JSON: " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline MixtureSpec mixture_from_json(const Json& j) {
  const std::string where = "mixture";
  detail::check_keys(j, {"sigma", "components"}, where);
  MixtureSpec m;
  m.sigma = detail::get_number(j, "sigma", where);
  detail::require_key(j, "components", where);
  detail::require(j.at("components").is_array(), where + ": components must be an array");
  for (const Json& c : j.at("components")) {
    detail::check_keys(c, {"weight", "mean"}, where + " component");
    m.weights.push_back(detail::get_number(c, "weight", where));
    m.means.emplace_back(detail::get_as<std::vector<double>>(c, "mean", where));
  }
  m.validate();
  return m;
}

inline Json mixture_to_json(const MixtureSpec& m) {
  Json comps = Json::array();
  for (std::size_t c = 0; c < m.components(); ++c)
    comps.push_back({{"weight", m.weights[c]}, {"mean", m.means[c].values}});
  return {{"sigma", m.sigma}, {"components", comps}};
}

inline ScoreSpec score_spec_from_json(const Json& j) {
  const std::string where = "scores";
  detail::check_keys(j, {"unary", "binary", "params"}, where);
  ScoreSpec s;
  if (j.contains("unary")) s.unary = parse_unary_kind(detail::get_as<std::string>(j, "unary", where));
  if (j.contains("binary"))
    s.binary = parse_binary_kind(detail::get_as<std::string>(j, "binary", where));
  if (j.contains("params"))
    s.params = detail::get_as<std::map<std::string, double>>(j, "params", where);
  return s;
}

// Missing keys keep RunConfig defaults. External score kinds cannot be
// satisfied from a file; they are rejected when scoring starts.
inline RunConfig run_config_from_json(const Json& j, bool require_schema = true) {
  const std::string where = "run config";
  detail::check_keys(j,
                     {"schema_version", "m", "k", "rho", "steps", "lambda", "seed",
                      "dimension", "mixture", "scores", "solver", "normalize_scores"},
                     where);
  detail::check_schema(j, where, require_schema);
  RunConfig c;
  if (j.contains("m")) c.m = detail::get_count(j, "m", where);
  if (j.contains("k")) c.k = detail::get_count(j, "k", where);
  if (j.contains("rho")) c.rho = detail::get_number(j, "rho", where);
  if (j.contains("steps")) c.t_total = detail::get_count(j, "steps", where);
  if (j.contains("lambda")) c.lambda = detail::get_number(j, "lambda", where);
  if (j.contains("seed")) c.seed = detail::get_count(j, "seed", where);
  if (j.contains("mixture")) c.condition = mixture_from_json(j.at("mixture"));
  c.dimension = c.condition.dim();
  if (j.contains("dimension")) c.dimension = detail::get_count(j, "dimension", where);
  if (j.contains("scores")) c.score_spec = score_spec_from_json(j.at("scores"));
  if (j.contains("solver"))
    c.strategy = parse_strategy(detail::get_as<std::string>(j, "solver", where));
  if (j.contains("normalize_scores"))
    c.normalize_scores = detail::get_as<bool>(j, "normalize_scores", where);
  c.validate();
  return c;
}

inline Json run_config_to_json(const RunConfig& c) {
  return {{"schema_version", kSchemaVersion},
          {"m", c.m},
          {"k", c.k},
          {"rho", c.rho},
          {"steps", c.t_total},
          {"lambda", c.lambda},
          {"seed", c.seed},
          {"dimension", c.dimension},
          {"mixture", mixture_to_json(c.condition)},
          {"scores",
           {{"unary", std::string(to_string(c.score_spec.unary))},
            {"binary", std::string(to_string(c.score_spec.binary))},
            {"params", c.score_spec.params}}},
          {"solver", std::string(to_string(c.strategy))},
          {"normalize_scores", c.normalize_scores}};
}

inline SweepSpec sweep_from_json(const Json& j) {
  const std::string where = "sweep";
  detail::check_keys(j,
                     {"schema_version", "base", "axis", "values", "seeds", "repeats",
                      "bootstrap_resamples"},
                     where);
  detail::check_schema(j, where, true);
  SweepSpec s;
  if (j.contains("base")) s.base = run_config_from_json(j.at("base"), false);
  s.axis = parse_axis(detail::get_as<std::string>(j, "axis", where));
  s.values = detail::get_as<std::vector<double>>(j, "values", where);
  s.seeds = detail::get_as<std::vector<std::uint64_t>>(j, "seeds", where);
  if (j.contains("repeats")) s.repeats = detail::get_count(j, "repeats", where);
  if (j.contains("bootstrap_resamples"))
    s.bootstrap_resamples = detail::get_count(j, "bootstrap_resamples", where);
  validate_sweep(s);
  return s;
}

// Score file: {"unary": [...], "binary": [[...], ...]} with optional k and
// lambda defaults for the solve command.
struct ScoreFile {
  ScoreSet scores;
  std::optional<std::size_t> k;
  std::optional<double> lambda;
};

inline ScoreFile score_file_from_json(const Json& j) {
  const std::string where = "score file";
  detail::check_keys(j, {"schema_version", "unary", "binary", "k", "lambda"}, where);
  detail::check_schema(j, where, false);
  const auto unary = detail::get_as<std::vector<double>>(j, "unary", where);
  const auto rows = detail::get_as<std::vector<std::vector<double>>>(j, "binary", where);
  Matrix b(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    detail::require(rows[i].size() == b.cols(), where + ": ragged binary matrix");
    for (std::size_t c = 0; c < rows[i].size(); ++c) b(i, c) = rows[i][c];
  }
  ScoreFile f;
  f.scores = ScoreSet::create(unary, std::move(b));
  if (j.contains("k")) f.k = detail::get_count(j, "k", where);
  if (j.contains("lambda")) f.lambda = detail::get_number(j, "lambda", where);
  return f;
}

inline Json selection_to_json(const Selection& s) {
  return {{"indices", s.indices},
          {"objective", s.objective},
          {"strategy", std::string(to_string(s.strategy))}};
}

// Timings are opt-in so that identical configs give byte-identical reports.
inline Json report_to_json(const RunReport& r, bool timings = false) {
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    Json row = {{"step", s.step},
                {"pool_size", s.pool_size},
                {"selected", s.selected},
                {"solved", s.solved},
                {"strategy", s.strategy ? Json(std::string(to_string(*s.strategy))) : Json()}};
    if (timings) row["wall_ms"] = s.wall_ms;
    steps.push_back(std::move(row));
  }
  Json samples = Json::array();
  for (const auto& x : r.final_samples) samples.push_back(x.values);
  Json out = {{"schema_version", kSchemaVersion},
              {"final_indices", r.final_indices},
              {"final_samples", samples},
              {"objective", r.objective},
              {"mean_unary", r.mean_unary},
              {"mean_binary", r.mean_binary},
              {"nfe_counted", r.nfe_counted},
              {"nfe_predicted", r.nfe_predicted},
              {"steps", steps}};
  if (timings) out["wall_ms"] = r.wall_ms;
  return out;
}

}  // namespace groupinf
