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

// Report rows and their file formats.
//
// Run records are written as CSV with the fixed header
//   ranks,width,lx,ly,lz,lt,iterations,total_time_s,flops_total,mflops_per_rank,gflops_overall
// and as markdown/text tables whose columns follow the published strong
// scaling tables (ranks, local lattice, total time, per-rank and overall
// rates), followed by speedup and efficiency.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lqs/error.hpp"
#include "lqs/geometry.hpp"

namespace lqs::bench {

inline constexpr std::string_view kRunCsvHeader =
    "ranks,width,lx,ly,lz,lt,iterations,total_time_s,flops_total,mflops_per_rank,gflops_overall";

struct RunRecord {
  int ranks = 1;
  int width = 1;
  Coord4 local{};
  int iterations = 0;
  double total_time_s = 0.0;
  std::int64_t flops_total = 0;
  double mflops_per_rank = 0.0;
  double gflops_overall = 0.0;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

// Builds a record whose rates follow from flops and time; throws ZeroElapsed.
RunRecord make_record(int ranks, int width, const Coord4& local, int iterations, double total_time_s,
                      std::int64_t flops_total);

// Re-checks the rate identities and, given the global lattice, that the local
// lattice tiles it with `ranks` domains. Throws ConsistencyViolation.
void check_record(const RunRecord& r, const std::optional<GlobalLattice>& global = std::nullopt);

struct PaperRow {
  int table = 1;
  int cores = 0;
  int ranks = 0;
  int width = 1;
  Coord4 local{};
  double total_time_s = 0.0;
  double mflops_per_core = 0.0;
  double gflops_overall = 0.0;
};

inline constexpr std::string_view kPaperCsvHeader =
    "table,cores,ranks,width,local_lattice,total_time_s,mflops_per_core,gflops_overall";

// CSV io. Parsers throw ParseError with the offending line number.
void write_runs_csv(std::ostream& os, const std::vector<RunRecord>& rows);
std::vector<RunRecord> parse_runs_csv(std::istream& is);
std::vector<RunRecord> read_runs_csv(const std::filesystem::path& path);

std::vector<PaperRow> parse_paper_csv(std::istream& is);
std::vector<PaperRow> read_paper_csv(const std::filesystem::path& path);

// Strong-scaling columns relative to the smallest parallel width p0:
// speedup(p) = T(p0) / T(p), efficiency(p) = speedup * p0 / p.
struct ScalingPoint {
  double parallelism = 1.0;
  double time_s = 0.0;
  double speedup = 1.0;
  double efficiency = 1.0;
};

std::vector<ScalingPoint> derive_scaling(const std::vector<std::pair<double, double>>& parallelism_and_time);

enum class ReportFormat { Csv, Markdown, Json };

ReportFormat parse_format(std::string_view name);

struct ReportContext {
  Coord4 global{};
  double kappa = 0.0;
  double tol = 0.0;
  std::uint64_t seed = 0;
  std::string transport;
};

// One row per attempted run; failed runs carry an error and no record.
struct SweepRow {
  Coord4 grid{};
  std::optional<RunRecord> record;
  std::string error;
  std::optional<Errc> error_code;
};

void render_report(std::ostream& os, const std::vector<SweepRow>& rows, const ReportContext& ctx,
                   ReportFormat format);

}  // namespace lqs::bench
