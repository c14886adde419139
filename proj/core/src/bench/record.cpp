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

#include "lqs/bench/record.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "lqs/error.hpp"
#include "lqs/flops.hpp"
#include "lqs/hopping.hpp"

namespace lqs::bench {

namespace {

std::string fmt_double(double v, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw Error(Errc::ParseError, "line " + std::to_string(line) + ": " + msg);
}

template <class T>
T parse_number(const std::string& field, int line) {
  std::istringstream is(field);
  T v{};
  is >> v;
  if (!is || !is.eof()) parse_fail(line, "bad number \"" + field + "\"");
  return v;
}

bool skippable(const std::string& line) { return line.empty() || line.front() == '#'; }

std::string local_with_spaces(const Coord4& l) {
  return std::to_string(l[0]) + " x " + std::to_string(l[1]) + " x " + std::to_string(l[2]) + " x " +
         std::to_string(l[3]);
}

}  // namespace

RunRecord make_record(int ranks, int width, const Coord4& local, int iterations, double total_time_s,
                      std::int64_t flops_total) {
  const FlopRates rates = flop_report(flops_total, total_time_s, ranks);
  RunRecord r;
  r.ranks = ranks;
  r.width = width;
  r.local = local;
  r.iterations = iterations;
  r.total_time_s = total_time_s;
  r.flops_total = flops_total;
  r.mflops_per_rank = rates.mflops_per_rank;
  r.gflops_overall = rates.gflops_overall;
  return r;
}

void check_record(const RunRecord& r, const std::optional<GlobalLattice>& global) {
  if (r.gflops_overall != static_cast<double>(r.ranks) * r.mflops_per_rank / 1000.0) {
    throw Error(Errc::ConsistencyViolation, "gflops_overall != ranks * mflops_per_rank / 1000");
  }
  if (r.total_time_s > 0.0) {
    const double expected = static_cast<double>(r.flops_total) / (r.total_time_s * 1e9);
    if (std::abs(r.gflops_overall - expected) > 1e-12 * std::abs(expected)) {
      throw Error(Errc::ConsistencyViolation, "gflops_overall != flops_total / (time * 1e9)");
    }
  }
  if (global) {
    if (volume(r.local) * r.ranks != global->volume()) {
      throw Error(Errc::ConsistencyViolation, "local volume x ranks != global volume");
    }
    for (int mu = 0; mu < kNd; ++mu) {
      if (r.local[mu] <= 0 || global->dims[mu] % r.local[mu] != 0) {
        throw Error(Errc::ConsistencyViolation, "local lattice does not tile the global lattice");
      }
    }
  }
}

void write_runs_csv(std::ostream& os, const std::vector<RunRecord>& rows) {
  os << kRunCsvHeader << '\n';
  for (const RunRecord& r : rows) {
    os << r.ranks << ',' << r.width << ',' << r.local[0] << ',' << r.local[1] << ',' << r.local[2] << ','
       << r.local[3] << ',' << r.iterations << ',' << fmt_double(r.total_time_s) << ',' << r.flops_total << ','
       << fmt_double(r.mflops_per_rank) << ',' << fmt_double(r.gflops_overall) << '\n';
  }
}

std::vector<RunRecord> parse_runs_csv(std::istream& is) {
  std::vector<RunRecord> rows;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (skippable(line)) continue;
    if (!header_seen) {
      if (line != kRunCsvHeader) parse_fail(lineno, "expected header \"" + std::string(kRunCsvHeader) + "\"");
      header_seen = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 11) parse_fail(lineno, "expected 11 fields, got " + std::to_string(f.size()));
    RunRecord r;
    r.ranks = parse_number<int>(f[0], lineno);
    r.width = parse_number<int>(f[1], lineno);
    for (int mu = 0; mu < kNd; ++mu) r.local[mu] = parse_number<int>(f[2 + mu], lineno);
    r.iterations = parse_number<int>(f[6], lineno);
    r.total_time_s = parse_number<double>(f[7], lineno);
    r.flops_total = parse_number<std::int64_t>(f[8], lineno);
    r.mflops_per_rank = parse_number<double>(f[9], lineno);
    r.gflops_overall = parse_number<double>(f[10], lineno);
    rows.push_back(r);
  }
  if (!header_seen) throw Error(Errc::ParseError, "missing CSV header");
  return rows;
}

std::vector<RunRecord> read_runs_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(Errc::IoError, "cannot open " + path.string());
  return parse_runs_csv(is);
}

std::vector<PaperRow> parse_paper_csv(std::istream& is) {
  std::vector<PaperRow> rows;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (skippable(line)) continue;
    if (!header_seen) {
      if (line != kPaperCsvHeader) parse_fail(lineno, "expected header \"" + std::string(kPaperCsvHeader) + "\"");
      header_seen = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 8) parse_fail(lineno, "expected 8 fields, got " + std::to_string(f.size()));
    PaperRow r;
    r.table = parse_number<int>(f[0], lineno);
    r.cores = parse_number<int>(f[1], lineno);
    r.ranks = parse_number<int>(f[2], lineno);
    r.width = parse_number<int>(f[3], lineno);
    try {
      r.local = parse_dims(f[4]);
    } catch (const Error& e) {
      parse_fail(lineno, e.what());
    }
    r.total_time_s = parse_number<double>(f[5], lineno);
    r.mflops_per_core = parse_number<double>(f[6], lineno);
    r.gflops_overall = parse_number<double>(f[7], lineno);
    if (r.ranks * r.width != r.cores) parse_fail(lineno, "cores != ranks * width");
    rows.push_back(r);
  }
  if (!header_seen) throw Error(Errc::ParseError, "missing CSV header");
  return rows;
}

std::vector<PaperRow> read_paper_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(Errc::IoError, "cannot open " + path.string());
  return parse_paper_csv(is);
}

std::vector<ScalingPoint> derive_scaling(const std::vector<std::pair<double, double>>& parallelism_and_time) {
  std::vector<ScalingPoint> out;
  if (parallelism_and_time.empty()) return out;
  const auto base = *std::min_element(parallelism_and_time.begin(), parallelism_and_time.end(),
                                      [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [p, t] : parallelism_and_time) {
    ScalingPoint s;
    s.parallelism = p;
    s.time_s = t;
    s.speedup = base.second / t;
    s.efficiency = s.speedup * base.first / p;
    out.push_back(s);
  }
  return out;
}

ReportFormat parse_format(std::string_view name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "md") return ReportFormat::Markdown;
  if (name == "json") return ReportFormat::Json;
  throw Error(Errc::InvalidParams, "unknown report format \"" + std::string(name) + "\"");
}

void render_report(std::ostream& os, const std::vector<SweepRow>& rows, const ReportContext& ctx,
                   ReportFormat format) {
  std::vector<RunRecord> ok;
  std::vector<std::pair<double, double>> pt;
  for (const SweepRow& row : rows) {
    if (row.record) {
      ok.push_back(*row.record);
      pt.emplace_back(static_cast<double>(row.record->ranks), row.record->total_time_s);
    }
  }
  const auto scaling = derive_scaling(pt);

  if (format == ReportFormat::Csv) {
    write_runs_csv(os, ok);
    return;
  }

  const std::string convention = "fp64; flops counted as " + std::to_string(kFlopsPerHoppingSite) +
                                 "/site per hopping application, " + std::to_string(kFlopsAxpyPerComplex) +
                                 "/complex axpy, " + std::to_string(kFlopsDotPerComplex) + "/complex dot, " +
                                 std::to_string(kFlopsNorm2PerComplex) + "/complex norm2";
  const std::string gauge = "synthetic seeded SU(3) gauge field";

  if (format == ReportFormat::Json) {
    nlohmann::json j;
    j["global"] = format_dims(ctx.global);
    j["kappa"] = ctx.kappa;
    j["tol"] = ctx.tol;
    j["seed"] = ctx.seed;
    j["transport"] = ctx.transport;
    j["flop_convention"] = convention;
    j["gauge"] = gauge;
    j["runs"] = nlohmann::json::array();
    std::size_t k = 0;
    for (const SweepRow& row : rows) {
      nlohmann::json r;
      r["grid"] = format_dims(row.grid);
      if (row.record) {
        const RunRecord& rec = *row.record;
        r["ranks"] = rec.ranks;
        r["width"] = rec.width;
        r["local"] = format_dims(rec.local);
        r["iterations"] = rec.iterations;
        r["total_time_s"] = rec.total_time_s;
        r["flops_total"] = rec.flops_total;
        r["mflops_per_rank"] = rec.mflops_per_rank;
        r["gflops_overall"] = rec.gflops_overall;
        r["speedup"] = scaling[k].speedup;
        r["efficiency"] = scaling[k].efficiency;
        ++k;
      } else {
        r["error"] = row.error;
      }
      j["runs"].push_back(r);
    }
    os << j.dump(2) << '\n';
    return;
  }

  os << "# Strong scaling of the even/odd preconditioned CG solver, " << format_dims(ctx.global) << " lattice\n\n";
  os << "- kappa " << fmt_double(ctx.kappa, "%g") << ", tol " << fmt_double(ctx.tol, "%g") << ", seed " << ctx.seed
     << ", transport " << ctx.transport << "\n";
  os << "- " << convention << "\n";
  os << "- " << gauge << "\n\n";
  os << "| # Ranks | Width | Local Lattice | Total Time [s] | Mean Perf. per Rank [Mflop/s] | Overall Perf. [Gflop/s] "
        "| Iterations | Speedup | Efficiency |\n";
  os << "|---:|---:|:---|---:|---:|---:|---:|---:|---:|\n";
  std::size_t k = 0;
  for (const SweepRow& row : rows) {
    if (!row.record) {
      os << "| grid " << format_dims(row.grid) << " | | | failed: " << row.error << " | | | | | |\n";
      continue;
    }
    const RunRecord& r = *row.record;
    os << "| " << r.ranks << " | " << r.width << " | " << local_with_spaces(r.local) << " | "
       << fmt_double(r.total_time_s, "%.4f") << " | " << fmt_double(r.mflops_per_rank, "%.2f") << " | "
       << fmt_double(r.gflops_overall, "%.4f") << " | " << r.iterations << " | "
       << fmt_double(scaling[k].speedup, "%.3f") << " | " << fmt_double(100.0 * scaling[k].efficiency, "%.1f")
       << "% |\n";
    ++k;
  }
}

}  // namespace lqs::bench
