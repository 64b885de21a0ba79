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

// groupinf command line.
//
//   groupinf solve SCORES.json [--k K] [--lambda L] [--strategy auto|exact|greedy]
//   groupinf infer CONFIG.json [--steps-csv PATH] [--timings]
//   groupinf sweep SWEEP.json
//   groupinf correlate CONFIG.json [--pairs N]
//   groupinf nfe --m M --k K --rho R --steps T [--json]
//
// Every subcommand accepts --out PATH (default: stdout) and --workers N
// (default: $GROUPINF_WORKERS, else 1).
//
// Exit status: 0 success, 1 validation or usage error, 2 runtime or budget
// error.

#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "groupinf/config.hpp"
#include "groupinf/engine.hpp"
#include "groupinf/harness.hpp"
#include "groupinf/parallel.hpp"
#include "groupinf/qip.hpp"
#include "groupinf/schedule.hpp"

namespace groupinf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

namespace detail {

inline void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

inline std::string format_sizes(const std::vector<std::size_t>& sizes) {
  std::string s;
  for (std::size_t a = 0; a < sizes.size(); ++a) {
    if (a) s += ',';
    s += std::to_string(sizes[a]);
  }
  return s;
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Group inference: select k diverse, high-quality outputs from m candidates"};
  app.require_subcommand(1);

  std::string out_path;
  std::optional<std::size_t> workers_flag;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Output path (default: stdout)");
    sub->add_option("--workers", workers_flag, "Worker threads (overrides GROUPINF_WORKERS)")
        ->check(CLI::PositiveNumber);
  };

  // solve
  std::string score_path;
  std::optional<std::size_t> solve_k;
  std::optional<double> solve_lambda;
  std::string strategy_name = "auto";
  auto* solve_cmd = app.add_subcommand("solve", "Solve the selection program for a score file");
  solve_cmd->add_option("scores", score_path, "Score file (JSON)")->required();
  solve_cmd->add_option("--k", solve_k, "Subset size (overrides the file)");
  solve_cmd->add_option("--lambda", solve_lambda, "Diversity weight (overrides the file)");
  solve_cmd->add_option("--strategy", strategy_name, "auto, exact or greedy");
  add_common(solve_cmd);

  // infer
  std::string config_path;
  std::string steps_csv;
  bool timings = false;
  auto* infer_cmd = app.add_subcommand("infer", "Run group inference from a config file");
  infer_cmd->add_option("config", config_path, "Run config (JSON)")->required();
  infer_cmd->add_option("--steps-csv", steps_csv, "Also write per-step records as CSV");
  infer_cmd->add_flag("--timings", timings, "Include wall times in the report");
  add_common(infer_cmd);

  // sweep
  std::string sweep_path;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep, emit CSV");
  sweep_cmd->add_option("sweep", sweep_path, "Sweep spec (JSON)")->required();
  add_common(sweep_cmd);

  // correlate
  std::size_t pairs = 1024;
  auto* corr_cmd =
      app.add_subcommand("correlate", "Correlate preview scores with final scores per step");
  corr_cmd->add_option("config", config_path, "Run config (JSON, rho must be 1)")->required();
  corr_cmd->add_option("--pairs", pairs, "Random pairs used for the binary correlation");
  add_common(corr_cmd);

  // nfe
  std::size_t nfe_m = 0, nfe_k = 0, nfe_steps = 0;
  double nfe_rho = 0.0;
  bool as_json = false;
  auto* nfe_cmd = app.add_subcommand("nfe", "Print the pruning schedule and evaluation count");
  nfe_cmd->add_option("--m", nfe_m, "Initial pool size")->required();
  nfe_cmd->add_option("--k", nfe_k, "Target group size")->required();
  nfe_cmd->add_option("--rho", nfe_rho, "Retention ratio in (0, 1]")->required();
  nfe_cmd->add_option("--steps", nfe_steps, "Number of steps")->required();
  nfe_cmd->add_flag("--json", as_json, "Machine-readable output");
  add_common(nfe_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  const std::size_t workers = workers_flag ? *workers_flag : workers_from_env();

  try {
    if (solve_cmd->parsed()) {
      ScoreFile f = score_file_from_json(parse_json_text(read_file(score_path), score_path));
      SelectionProblem p{std::move(f.scores), 0, 1.0};
      if (solve_k) {
        p.k = *solve_k;
      } else if (f.k) {
        p.k = *f.k;
      } else {
        throw ValidationError("solve: no k given (use --k or a 'k' field)");
      }
      if (solve_lambda) {
        p.lambda = *solve_lambda;
      } else if (f.lambda) {
        p.lambda = *f.lambda;
      }
      const Selection sel = solve(p, parse_strategy(strategy_name));
      detail::write_output(selection_to_json(sel).dump() + "\n", out_path, out);
    } else if (infer_cmd->parsed()) {
      RunConfig cfg = run_config_from_json(parse_json_text(read_file(config_path), config_path));
      cfg.workers = workers;
      const RunReport rep = group_inference(cfg);
      detail::write_output(report_to_json(rep, timings).dump(2) + "\n", out_path, out);
      if (!steps_csv.empty()) detail::write_output(emit_steps_csv(rep, timings), steps_csv, out);
    } else if (sweep_cmd->parsed()) {
      SweepSpec spec = sweep_from_json(parse_json_text(read_file(sweep_path), sweep_path));
      detail::write_output(emit_sweep_csv(run_sweep(spec, workers)), out_path, out);
    } else if (corr_cmd->parsed()) {
      RunConfig cfg = run_config_from_json(parse_json_text(read_file(config_path), config_path));
      cfg.workers = workers;
      detail::write_output(emit_correlation_csv(correlate_run(cfg, pairs)), out_path, out);
    } else if (nfe_cmd->parsed()) {
      const PruneSchedule s = build_schedule(nfe_m, nfe_k, nfe_rho, nfe_steps);
      const std::uint64_t naive = nfe_naive(nfe_m, nfe_steps);
      std::string text;
      if (as_json) {
        Json j = {{"m", s.m},         {"k", s.k},         {"rho", s.rho},
                  {"steps", s.t_total}, {"sizes", s.sizes}, {"nfe", s.nfe},
                  {"naive", naive},   {"savings", savings_ratio(s)}};
        j["t_star"] = s.t_star ? Json(*s.t_star) : Json();
        text = j.dump() + "\n";
      } else {
        text = "sizes=" + detail::format_sizes(s.sizes) + "\n" +
               "t_star=" + (s.t_star ? std::to_string(*s.t_star) : std::string("none")) +
               "\n" + "nfe=" + std::to_string(s.nfe) + "\n" +
               "naive=" + std::to_string(naive) + "\n" +
               "savings=" + format_double(savings_ratio(s)) + "\n";
      }
      detail::write_output(text, out_path, out);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace groupinf::cli
