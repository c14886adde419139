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

// Latency-bandwidth-compute model of one strong-scaling point:
//
//   T = W / (p * rate) + iterations * (8 * alpha + beta * (S / 2) * bytes_per_site)
//
// W is the total work in flops, p the number of compute units (ranks times
// in-rank width), S the surface_count of the local lattice. The halo of one
// single-parity field exchanges S/2 sites in 8 messages per hopping pair.

#include <string_view>
#include <vector>

#include "lqs/bench/record.hpp"
#include "lqs/geometry.hpp"

namespace lqs::bench {

inline constexpr int kDefaultBytesPerSite = 192;

struct ModelParams {
  double rate = 1.0;   // flop/s per compute unit
  double alpha = 0.0;  // s per message
  double beta = 0.0;   // s per byte

  // rate > 0, alpha >= 0, beta >= 0, all finite; throws InvalidParams.
  static ModelParams make(double rate, double alpha, double beta);
};

// "r=1e9,alpha=2e-6,beta=1e-9"; throws InvalidParams.
ModelParams parse_model(std::string_view text);

struct ScalingSample {
  double parallelism = 1.0;
  Coord4 local{};
  double time_s = 0.0;
  double work_flops = 0.0;
};

ScalingSample sample_of(const PaperRow& row);
ScalingSample sample_of(const RunRecord& record);

struct Prediction {
  double time_s = 0.0;
  double compute_s = 0.0;
  double comm_s = 0.0;
  double comm_share() const noexcept { return comm_s / time_s; }
};

Prediction predict(const ModelParams& model, double work_flops, double parallelism, const Coord4& local,
                   int iterations, int bytes_per_site = kDefaultBytesPerSite);

struct PredictedPoint {
  Coord4 grid{};
  Coord4 local{};
  double parallelism = 1.0;
  Prediction prediction;
  double efficiency = 1.0;  // relative to the first grid
};

// Predictions for a list of grids of one global lattice; efficiency is
// T(p0) p0 / (T(p) p) against the first entry. Throws on invalid grids.
std::vector<PredictedPoint> predict_grids(const ModelParams& model, double work_flops, const GlobalLattice& global,
                                          const std::vector<Coord4>& grids, int width, int iterations,
                                          int bytes_per_site = kDefaultBytesPerSite);

// Work of `iterations` CG iterations of this solver on a lattice of
// `global_volume` sites (one normal-operator application plus the vector
// updates per iteration).
double cg_work_flops(std::int64_t global_volume, int iterations);

struct FitResult {
  ModelParams params;
  std::vector<double> rel_residuals;  // (T_pred - T_meas) / T_meas per row
};

// Nonnegative least squares of (1/rate, alpha, beta) minimizing
// sum ((T_pred - T_meas) / T_meas)^2. Throws Underdetermined (fewer than
// three rows or collinear rows) or NoPositiveFit (no finite rate).
FitResult fit_model(const std::vector<ScalingSample>& rows, int iterations,
                    int bytes_per_site = kDefaultBytesPerSite);

}  // namespace lqs::bench
