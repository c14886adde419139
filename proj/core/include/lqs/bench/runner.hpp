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

#pragma once

// Timed solver runs over one or more process grids of a fixed global lattice.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lqs/bench/record.hpp"
#include "lqs/comm.hpp"
#include "lqs/geometry.hpp"

namespace lqs::bench {

struct RunConfig {
  GlobalLattice global = GlobalLattice::make({8, 8, 8, 16});
  Coord4 grid{1, 1, 1, 1};
  double kappa = 0.15;
  double tol = 1e-8;
  int max_iter = 10000;
  std::uint64_t seed = 7;
  TransportKind transport = TransportKind::Concurrent;
  int width = 1;
  std::optional<double> timeout_s;  // watchdog; off by default
};

struct SweepConfig {
  RunConfig base;  // grid is ignored
  std::vector<Coord4> grids;
};

// One solve on cfg.grid. The gauge field is random_gauge(seed), the source
// random_fermion(even, seed + 1). Only the solve itself is timed.
// Throws NonDivisible/OddLocalExtent before any work, SolveFailed when CG does
// not converge and Timeout when the watchdog fires.
RunRecord run_benchmark(const RunConfig& cfg);

// One row per grid; a failing grid records its error and the sweep goes on.
std::vector<SweepRow> scaling_sweep(const SweepConfig& cfg);

ReportContext report_context(const RunConfig& cfg);

}  // namespace lqs::bench
