// Copyright 2026 The lqscale Authors.
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

// bench: strong-scaling harness for the even/odd preconditioned Wilson CG
// solver.
//
//   bench run            --global 8x8x8x16 --grid 2x2x1x2 [...]
//   bench sweep          --global 8x8x8x16 --grids 1x1x1x1,2x1x1x1 [...]
//   bench validate-paper --table data/table1.csv
//   bench predict        --model r=1e9,alpha=2e-6,beta=1e-9 --global ... --grid ... --iters N
//   bench fit-model      --rows file.csv --iters N
//
// Any subcommand accepts --config FILE with key=value lines using the flag
// names; flags given on the command line win.
//
// Exit codes: 0 ok, 1 usage, 2 consistency or solve failure, 3 timeout.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lqs/bench/model.hpp"
#include "lqs/bench/paper.hpp"
#include "lqs/bench/record.hpp"
#include "lqs/bench/runner.hpp"
#include "lqs/error.hpp"

namespace {

using namespace lqs;
using namespace lqs::bench;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;
constexpr int kExitTimeout = 3;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::Timeout:
      return kExitTimeout;
    case Errc::ConsistencyViolation:
    case Errc::SolveFailed:
    case Errc::BreakdownPAp:
    case Errc::Underdetermined:
    case Errc::NoPositiveFit:
      return kExitFailure;
    default:
      return kExitUsage;
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Rewrites argv so that key=value lines of --config come right after the
// subcommand; options take their last value, so later command-line flags win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string path;
  std::size_t at = 0;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      at = i;
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      at = i;
      break;
    }
  }
  if (path.empty()) return args;
  args.erase(args.begin() + static_cast<std::ptrdiff_t>(at),
             args.begin() + static_cast<std::ptrdiff_t>(args[at] == "--config" ? at + 2 : at + 1));

  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open config " + path);
  std::vector<std::string> injected;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::ParseError, path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    injected.push_back("--" + trim(line.substr(0, eq)));
    injected.push_back(trim(line.substr(eq + 1)));
  }
  const std::size_t sub = args.size() > 1 ? 2 : 1;
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub), injected.begin(), injected.end());
  return args;
}

std::vector<Coord4> parse_grid_list(const std::string& text) {
  std::vector<Coord4> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_dims(item));
  }
  if (out.empty()) throw Error(Errc::InvalidParams, "empty grid list");
  return out;
}

struct RunFlags {
  std::string global = "8x8x8x16";
  std::string grid = "1x1x1x1";
  std::string grids;
  double kappa = 0.15;
  double tol = 1e-8;
  int max_iter = 10000;
  std::uint64_t seed = 7;
  std::string transport = "concurrent";
  int width = 1;
  std::string out;
  std::string format = "csv";
  std::optional<double> timeout_s;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool sweep) {
  cmd->add_option("--global", f.global, "global lattice, e.g. 8x8x8x16")->capture_default_str();
  if (sweep) {
    cmd->add_option("--grids", f.grids, "comma-separated process grids")->required();
    cmd->add_option("--grid", f.grid, "ignored by sweep");
  } else {
    cmd->add_option("--grid", f.grid, "process grid, e.g. 2x2x1x2")->capture_default_str();
    cmd->add_option("--grids", f.grids, "ignored by run");
  }
  cmd->add_option("--kappa", f.kappa, "hopping parameter")->capture_default_str();
  cmd->add_option("--tol", f.tol, "relative residual target")->capture_default_str();
  cmd->add_option("--max-iter", f.max_iter, "CG iteration cap")->capture_default_str();
  cmd->add_option("--seed", f.seed, "gauge and source seed")->capture_default_str();
  cmd->add_option("--transport", f.transport, "serial|concurrent")
      ->check(CLI::IsMember({"serial", "concurrent"}))
      ->capture_default_str();
  cmd->add_option("--width", f.width, "in-rank data-parallel width")->capture_default_str();
  cmd->add_option("--out", f.out, "output file (default stdout)");
  cmd->add_option("--format", f.format, "csv|md|json")->check(CLI::IsMember({"csv", "md", "json"}))->capture_default_str();
  cmd->add_option("--timeout-s", f.timeout_s, "abort a solve after this many seconds");
}

RunConfig to_config(const RunFlags& f) {
  RunConfig cfg;
  cfg.global = GlobalLattice::make(parse_dims(f.global));
  cfg.grid = parse_dims(f.grid);
  cfg.kappa = f.kappa;
  cfg.tol = f.tol;
  cfg.max_iter = f.max_iter;
  cfg.seed = f.seed;
  cfg.transport = parse_transport(f.transport);
  cfg.width = f.width;
  cfg.timeout_s = f.timeout_s;
  return cfg;
}

template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw Error(Errc::IoError, "cannot write " + path);
  fn(os);
}

int cmd_run(const RunFlags& f) {
  const RunConfig cfg = to_config(f);
  std::vector<SweepRow> rows(1);
  rows[0].grid = cfg.grid;
  rows[0].record = run_benchmark(cfg);
  with_output(f.out, [&](std::ostream& os) { render_report(os, rows, report_context(cfg), parse_format(f.format)); });
  return kExitOk;
}

int cmd_sweep(const RunFlags& f) {
  SweepConfig sweep;
  sweep.base = to_config(f);
  sweep.grids = parse_grid_list(f.grids);
  // Invalid grids are rejected before any solve starts.
  for (const Coord4& g : sweep.grids) decompose(sweep.base.global, ProcessGrid::make(g));
  const auto rows = scaling_sweep(sweep);
  with_output(f.out,
              [&](std::ostream& os) { render_report(os, rows, report_context(sweep.base), parse_format(f.format)); });
  int code = kExitOk;
  for (const SweepRow& r : rows) {
    if (r.record) continue;
    std::cerr << "grid " << format_dims(r.grid) << ": " << r.error << '\n';
    code = std::max(code, r.error_code ? exit_code_for(*r.error_code) : kExitFailure);
  }
  return code;
}

int cmd_validate(const std::string& table) {
  const auto rows = read_paper_csv(table);
  const PaperValidation v = validate_paper(rows);
  std::printf("table %s: %zu rows, mean work W = %.6e Gflop, max deviation %.4f%%\n", table.c_str(), v.rows.size(),
              v.mean_work_gflop, 100.0 * v.max_work_deviation);
  for (std::size_t i = 0; i < v.rows.size(); ++i) {
    const RowCheck& c = v.rows[i];
    std::printf("  row %zu: cores %d, %d*%.2f/1000 = %.2f vs %.2f (%.4f%%) %s; W = %.6e (%.4f%%) %s\n", i + 1,
                c.row.cores, c.row.cores, c.row.mflops_per_core, c.derived_gflops, c.row.gflops_overall,
                100.0 * c.rate_rel_error, c.rate_ok ? "ok" : "FAIL", c.work_gflop, 100.0 * c.work_rel_deviation,
                c.work_ok ? "ok" : "FAIL");
  }
  require_consistent(v);
  return kExitOk;
}

int cmd_predict(const std::string& model_text, const std::string& global_text, const std::string& grid_text,
                int iters, int bytes, int width) {
  const ModelParams model = parse_model(model_text);
  const GlobalLattice global = GlobalLattice::make(parse_dims(global_text));
  const double work = cg_work_flops(global.volume(), iters);
  const auto points = predict_grids(model, work, global, parse_grid_list(grid_text), width, iters, bytes);
  std::printf("W = %.6e flop (%d iterations on %s)\n", work, iters, format_dims(global.dims).c_str());
  std::printf("%-12s %-14s %10s %14s %14s %14s %10s %10s\n", "grid", "local", "p", "time_s", "compute_s", "comm_s",
              "comm_share", "efficiency");
  for (const PredictedPoint& pt : points) {
    std::printf("%-12s %-14s %10.0f %14.6e %14.6e %14.6e %10.4f %10.4f\n", format_dims(pt.grid).c_str(),
                format_dims(pt.local).c_str(), pt.parallelism, pt.prediction.time_s, pt.prediction.compute_s,
                pt.prediction.comm_s, pt.prediction.comm_share(), pt.efficiency);
  }
  return kExitOk;
}

int cmd_fit(const std::string& path, int iters, int bytes) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  std::string first;
  while (std::getline(in, first)) {
    first = trim(first);
    if (!first.empty() && first.front() != '#') break;
  }
  in.clear();
  in.seekg(0);
  std::vector<ScalingSample> samples;
  if (first == kPaperCsvHeader) {
    for (const PaperRow& r : parse_paper_csv(in)) samples.push_back(sample_of(r));
  } else {
    for (const RunRecord& r : parse_runs_csv(in)) samples.push_back(sample_of(r));
  }
  const FitResult fit = fit_model(samples, iters, bytes);
  std::printf("r=%.9g,alpha=%.9g,beta=%.9g\n", fit.params.rate, fit.params.alpha, fit.params.beta);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::printf("  row %zu: p %.0f, measured %.6g s, residual %+.4f%%\n", i + 1, samples[i].parallelism,
                samples[i].time_s, 100.0 * fit.rel_residuals[i]);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strong-scaling harness for the even/odd preconditioned Wilson CG solver", "bench"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  RunFlags run_flags;
  RunFlags sweep_flags;
  auto* run = app.add_subcommand("run", "time one solve on one process grid");
  add_run_flags(run, run_flags, false);
  auto* sweep = app.add_subcommand("sweep", "time one solve per process grid and report scaling");
  add_run_flags(sweep, sweep_flags, true);

  std::string table;
  auto* validate = app.add_subcommand("validate-paper", "check a bundled scaling table for internal consistency");
  validate->add_option("--table", table, "table CSV")->required();

  std::string model_text, global_text = "8x8x8x16", grid_text = "1x1x1x1";
  int iters = 0;
  int bytes = kDefaultBytesPerSite;
  int width = 1;
  auto* predict_cmd = app.add_subcommand("predict", "evaluate the scaling model on process grids");
  predict_cmd->add_option("--model", model_text, "r=...,alpha=...,beta=...")->required();
  predict_cmd->add_option("--global", global_text, "global lattice")->capture_default_str();
  predict_cmd->add_option("--grid", grid_text, "process grid, or a comma-separated list")->capture_default_str();
  predict_cmd->add_option("--iters", iters, "CG iterations")->required()->check(CLI::PositiveNumber);
  predict_cmd->add_option("--bytes-per-site", bytes, "halo bytes per site")->capture_default_str();
  predict_cmd->add_option("--width", width, "in-rank width")->capture_default_str();

  std::string rows_path;
  int fit_iters = 0;
  int fit_bytes = kDefaultBytesPerSite;
  auto* fit = app.add_subcommand("fit-model", "fit rate, latency and inverse bandwidth to measured rows");
  fit->add_option("--rows", rows_path, "scaling table or run CSV")->required();
  fit->add_option("--iters", fit_iters, "CG iterations per row")->required()->check(CLI::PositiveNumber);
  fit->add_option("--bytes-per-site", fit_bytes, "halo bytes per site")->capture_default_str();

  try {
    const std::vector<std::string> args = expand_config(argc, argv);
    std::vector<const char*> cargs;
    for (const auto& a : args) cargs.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return kExitUsage;
    }

    if (*run) return cmd_run(run_flags);
    if (*sweep) return cmd_sweep(sweep_flags);
    if (*validate) return cmd_validate(table);
    if (*predict_cmd) return cmd_predict(model_text, global_text, grid_text, iters, bytes, width);
    if (*fit) return cmd_fit(rows_path, fit_iters, fit_bytes);
  } catch (const Error& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kExitUsage;
}
