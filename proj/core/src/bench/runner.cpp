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

#include "lqs/bench/runner.hpp"

#include <chrono>
#include <mutex>

#include "lqs/error.hpp"
#include "lqs/field.hpp"
#include "lqs/hopping.hpp"
#include "lqs/solver.hpp"

namespace lqs::bench {

RunRecord run_benchmark(const RunConfig& cfg) {
  if (cfg.width <= 0) throw Error(Errc::InvalidParams, "width must be positive");
  if (cfg.timeout_s && !(*cfg.timeout_s > 0.0)) throw Error(Errc::InvalidParams, "timeout must be positive");
  const Decomposition decomp = decompose(cfg.global, ProcessGrid::make(cfg.grid));
  const HoppingParams params = HoppingParams::make(cfg.kappa, HoppingParams{}.phases);
  CGConfig cg;
  cg.tol = cfg.tol;
  cg.max_iter = cfg.max_iter;
  cg.validate();

  std::optional<Seconds> watchdog;
  if (cfg.timeout_s) watchdog = Seconds(*cfg.timeout_s);

  std::mutex mu;
  RunRecord record;
  run_ranks(cfg.transport, decomp.grid, [&](Communicator& comm) {
    const LayoutPtr layout = FieldLayout::make(decomp, comm.topology(), cfg.width);
    GaugeField gauge = random_gauge(layout, cfg.seed);
    const FermionField b = random_fermion(layout, Parity::Even, cfg.seed + 1);
    WilsonOperator op(comm, gauge, params);

    CGConfig local_cg = cg;
    comm.barrier();
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.timeout_s) {
      local_cg.on_iterate = [&, limit = *cfg.timeout_s](int iter, const FermionField&) {
        const double spent = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (spent > limit) {
          throw Error(Errc::Timeout, "watchdog: solve exceeded " + std::to_string(limit) + " s at iteration " +
                                         std::to_string(iter));
        }
      };
    }
    const CGResult res = cg_solve(op, b, local_cg);
    comm.barrier();
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!res.converged) {
      throw Error(Errc::SolveFailed, "CG did not converge in " + std::to_string(res.iterations) +
                                         " iterations (residual " + std::to_string(res.residual_history.back()) +
                                         ")");
    }
    if (comm.rank() == 0) {
      std::lock_guard lock(mu);
      record = make_record(decomp.ranks(), cfg.width, decomp.local, res.iterations, elapsed, res.flops);
    }
  }, watchdog);
  check_record(record, cfg.global);
  return record;
}

std::vector<SweepRow> scaling_sweep(const SweepConfig& cfg) {
  if (cfg.grids.empty()) throw Error(Errc::InvalidParams, "sweep needs at least one grid");
  std::vector<SweepRow> rows;
  for (const Coord4& g : cfg.grids) {
    SweepRow row;
    row.grid = g;
    RunConfig one = cfg.base;
    one.grid = g;
    try {
      row.record = run_benchmark(one);
    } catch (const Error& e) {
      row.error = e.what();
      row.error_code = e.code();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ReportContext report_context(const RunConfig& cfg) {
  ReportContext ctx;
  ctx.global = cfg.global.dims;
  ctx.kappa = cfg.kappa;
  ctx.tol = cfg.tol;
  ctx.seed = cfg.seed;
  ctx.transport = std::string(to_string(cfg.transport));
  return ctx;
}

}  // namespace lqs::bench
